use serde::{Deserialize, Serialize};

use super::{dot, norm};
use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// Unit vector in R^N.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Accepts `components` only if its Euclidean norm is within 1e-12 of 1.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        let n = norm(&components);
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid(format!(
                "direction must be unit-norm within {UNIT_TOL:e}, got norm {n}"
            )));
        }
        Ok(Self(components))
    }

    pub fn normalized(components: Vec<f64>) -> Result<Self> {
        let n = norm(&components);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self(components.into_iter().map(|c| c / n).collect()))
    }

    pub fn from_angle(theta: f64) -> Self {
        Self(vec![theta.cos(), theta.sin()])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind {
    Ball { center: Vec<f64>, radius: f64 },
    /// Axis-aligned ellipsoid.
    Ellipsoid { center: Vec<f64>, semi_axes: Vec<f64> },
    /// Convex hull of the listed vertices.
    Polytope { vertices: Vec<Vec<f64>> },
    /// `Σ w_i K_i` with `w_i ≥ 0`, at least one positive.
    Blend(Vec<(f64, ConvexBody)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodySpec", into = "BodySpec")]
pub struct ConvexBody {
    dim: usize,
    kind: BodyKind,
}

impl ConvexBody {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_dim(center.len())?;
        check_finite("center", &center)?;
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::invalid(format!("radius must be finite and >= 0, got {radius}")));
        }
        Ok(Self { dim: center.len(), kind: BodyKind::Ball { center, radius } })
    }

    pub fn unit_ball(dim: usize) -> Self {
        Self { dim, kind: BodyKind::Ball { center: vec![0.0; dim], radius: 1.0 } }
    }

    pub fn ellipsoid(center: Vec<f64>, semi_axes: Vec<f64>) -> Result<Self> {
        check_dim(center.len())?;
        check_finite("center", &center)?;
        if semi_axes.len() != center.len() {
            return Err(Error::invalid("semi_axes and center lengths differ"));
        }
        if semi_axes.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::invalid("semi_axes must be finite and >= 0"));
        }
        Ok(Self { dim: center.len(), kind: BodyKind::Ellipsoid { center, semi_axes } })
    }

    pub fn polytope(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::invalid("polytope vertex list is empty"))?;
        let dim = first.len();
        check_dim(dim)?;
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::invalid("polytope vertices have mixed dimensions"));
            }
            check_finite("vertices", v)?;
        }
        Ok(Self { dim, kind: BodyKind::Polytope { vertices } })
    }

    pub fn blend(components: Vec<(f64, ConvexBody)>) -> Result<Self> {
        let dim = components
            .first()
            .map(|(_, b)| b.dim)
            .ok_or_else(|| Error::invalid("blend has no components"))?;
        if components.iter().any(|(_, b)| b.dim != dim) {
            return Err(Error::invalid("blend components have different dimensions"));
        }
        if components.iter().any(|(w, _)| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::invalid("blend weights must be finite and nonnegative"));
        }
        if !components.iter().any(|(w, _)| *w > 0.0) {
            return Err(Error::invalid("blend needs at least one positive weight"));
        }
        Ok(Self { dim, kind: BodyKind::Blend(components) })
    }

    /// Axis-aligned box `[-half_1, half_1] × ...` centred at `center`.
    pub fn cuboid(center: &[f64], half: &[f64]) -> Result<Self> {
        let dim = center.len();
        let mut vertices = Vec::with_capacity(1 << dim);
        for mask in 0..(1usize << dim) {
            vertices.push(
                (0..dim)
                    .map(|k| center[k] + if mask >> k & 1 == 1 { half[k] } else { -half[k] })
                    .collect(),
            );
        }
        Self::polytope(vertices)
    }

    /// Regular polygon with `sides` vertices on the circle of radius `circumradius`.
    pub fn regular_polygon(sides: usize, circumradius: f64, rotation: f64) -> Result<Self> {
        if sides < 3 {
            return Err(Error::invalid("a polygon needs at least 3 sides"));
        }
        let step = std::f64::consts::TAU / sides as f64;
        Self::polytope(
            (0..sides)
                .map(|k| {
                    let a = rotation + step * k as f64;
                    vec![circumradius * a.cos(), circumradius * a.sin()]
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    /// `h_K(ν)` without checking that `nu` is a unit vector.
    pub fn support(&self, nu: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::Ball { center, radius } => dot(center, nu) + radius * norm(nu),
            BodyKind::Ellipsoid { center, semi_axes } => {
                let q: f64 = semi_axes.iter().zip(nu).map(|(a, v)| a * a * v * v).sum();
                dot(center, nu) + q.sqrt()
            }
            BodyKind::Polytope { vertices } => vertices
                .iter()
                .map(|v| dot(v, nu))
                .fold(f64::NEG_INFINITY, f64::max),
            BodyKind::Blend(parts) => parts.iter().map(|(w, b)| w * b.support(nu)).sum(),
        }
    }

    /// A point of `K` where `⟨x, ν⟩ = h_K(ν)`.
    ///
    /// Ties (a facet orthogonal to `nu`) are broken towards the larger value of
    /// `⟨x, tiebreak⟩` when `tiebreak` is given, which selects the one-sided
    /// limit of the gradient map as `nu` rotates towards `tiebreak`.
    pub fn support_point(&self, nu: &[f64], tiebreak: Option<&[f64]>) -> Vec<f64> {
        match &self.kind {
            BodyKind::Ball { center, radius } => {
                let n = norm(nu);
                center.iter().zip(nu).map(|(c, v)| c + radius * v / n).collect()
            }
            BodyKind::Ellipsoid { center, semi_axes } => {
                let q: f64 = semi_axes.iter().zip(nu).map(|(a, v)| a * a * v * v).sum();
                let s = q.sqrt();
                center
                    .iter()
                    .zip(semi_axes.iter().zip(nu))
                    .map(|(c, (a, v))| if s > 0.0 { c + a * a * v / s } else { *c })
                    .collect()
            }
            BodyKind::Polytope { vertices } => {
                let best = vertices.iter().map(|v| dot(v, nu)).fold(f64::NEG_INFINITY, f64::max);
                let scale = vertices.iter().map(|v| norm(v)).fold(1e-300, f64::max);
                let tol = 1e-12 * scale;
                let tied = vertices.iter().filter(|v| dot(v, nu) >= best - tol);
                match tiebreak {
                    Some(t) => tied
                        .max_by(|a, b| dot(a, t).total_cmp(&dot(b, t)))
                        .cloned()
                        .unwrap_or_default(),
                    None => tied.cloned().next().unwrap_or_default(),
                }
            }
            BodyKind::Blend(parts) => {
                let mut out = vec![0.0; self.dim];
                for (w, b) in parts {
                    if *w == 0.0 {
                        continue;
                    }
                    for (o, p) in out.iter_mut().zip(b.support_point(nu, tiebreak)) {
                        *o += w * p;
                    }
                }
                out
            }
        }
    }

    pub fn translated(&self, shift: &[f64]) -> Self {
        let add = |c: &Vec<f64>| c.iter().zip(shift).map(|(a, b)| a + b).collect::<Vec<_>>();
        let kind = match &self.kind {
            BodyKind::Ball { center, radius } => {
                BodyKind::Ball { center: add(center), radius: *radius }
            }
            BodyKind::Ellipsoid { center, semi_axes } => {
                BodyKind::Ellipsoid { center: add(center), semi_axes: semi_axes.clone() }
            }
            BodyKind::Polytope { vertices } => {
                BodyKind::Polytope { vertices: vertices.iter().map(add).collect() }
            }
            BodyKind::Blend(parts) => {
                let mut parts = parts.clone();
                parts.push((1.0, ConvexBody {
                    dim: self.dim,
                    kind: BodyKind::Polytope { vertices: vec![shift.to_vec()] },
                }));
                BodyKind::Blend(parts)
            }
        };
        Self { dim: self.dim, kind }
    }

    /// Dilation `rK` about the origin, `r > 0`.
    pub fn scaled(&self, r: f64) -> Self {
        let mul = |c: &Vec<f64>| c.iter().map(|a| a * r).collect::<Vec<_>>();
        let kind = match &self.kind {
            BodyKind::Ball { center, radius } => {
                BodyKind::Ball { center: mul(center), radius: radius * r }
            }
            BodyKind::Ellipsoid { center, semi_axes } => {
                BodyKind::Ellipsoid { center: mul(center), semi_axes: mul(semi_axes) }
            }
            BodyKind::Polytope { vertices } => {
                BodyKind::Polytope { vertices: vertices.iter().map(mul).collect() }
            }
            BodyKind::Blend(parts) => {
                BodyKind::Blend(parts.iter().map(|(w, b)| (*w, b.scaled(r))).collect())
            }
        };
        Self { dim: self.dim, kind }
    }

    /// Parallel body `K + B(eps)`.
    pub fn dilated(&self, eps: f64) -> Result<Self> {
        if !(eps >= 0.0) {
            return Err(Error::invalid("dilation radius must be nonnegative"));
        }
        Self::blend(vec![(1.0, self.clone()), (eps, Self::unit_ball(self.dim))])
    }

    /// Dimension of the affine hull.
    pub fn affine_dimension(&self) -> usize {
        let mut span = Vec::new();
        self.collect_span(&mut span);
        rank(span, self.dim)
    }

    /// True when the affine hull has dimension < N (zero volume).
    pub fn is_degenerate(&self) -> bool {
        self.affine_dimension() < self.dim
    }

    fn collect_span(&self, out: &mut Vec<Vec<f64>>) {
        match &self.kind {
            BodyKind::Ball { radius, .. } => {
                if *radius > 0.0 {
                    for k in 0..self.dim {
                        let mut e = vec![0.0; self.dim];
                        e[k] = 1.0;
                        out.push(e);
                    }
                }
            }
            BodyKind::Ellipsoid { semi_axes, .. } => {
                for (k, a) in semi_axes.iter().enumerate() {
                    if *a > 0.0 {
                        let mut e = vec![0.0; self.dim];
                        e[k] = 1.0;
                        out.push(e);
                    }
                }
            }
            BodyKind::Polytope { vertices } => {
                let v0 = &vertices[0];
                for v in &vertices[1..] {
                    out.push(v.iter().zip(v0).map(|(a, b)| a - b).collect());
                }
            }
            BodyKind::Blend(parts) => {
                for (w, b) in parts {
                    if *w > 0.0 {
                        b.collect_span(out);
                    }
                }
            }
        }
    }

    /// Radius of a ball about the origin containing the body.
    pub fn outer_radius(&self) -> f64 {
        match &self.kind {
            BodyKind::Ball { center, radius } => norm(center) + radius,
            BodyKind::Ellipsoid { center, semi_axes } => {
                norm(center) + semi_axes.iter().cloned().fold(0.0, f64::max)
            }
            BodyKind::Polytope { vertices } => vertices.iter().map(|v| norm(v)).fold(0.0, f64::max),
            BodyKind::Blend(parts) => parts.iter().map(|(w, b)| w * b.outer_radius()).sum(),
        }
    }

    /// Width of the axis-aligned bounding box in each coordinate: `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for k in 0..self.dim {
            let mut e = vec![0.0; self.dim];
            e[k] = 1.0;
            hi.push(self.support(&e));
            e[k] = -1.0;
            lo.push(-self.support(&e));
        }
        (lo, hi)
    }

    /// Diameter estimated from the support function over `directions` samples.
    pub fn diameter(&self) -> f64 {
        let dirs = super::sphere::direction_set(self.dim, 720);
        dirs.iter()
            .map(|d| {
                let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                self.support(d) + self.support(&neg)
            })
            .fold(0.0, f64::max)
    }

    /// Steiner point `N ⨍_{S^{N-1}} h_K(ν) ν dν`, a Minkowski-additive interior point.
    pub fn steiner_point(&self) -> Vec<f64> {
        match &self.kind {
            BodyKind::Ball { center, .. } | BodyKind::Ellipsoid { center, .. } => center.clone(),
            BodyKind::Polytope { vertices } if self.dim == 2 => steiner_point_polygon(vertices),
            BodyKind::Polytope { vertices } if vertices.len() == 1 => vertices[0].clone(),
            BodyKind::Polytope { .. } => {
                let rule = super::sphere::SphereRule::new(self.dim, 96)
                    .expect("steiner point needs N in {2,3}");
                let mut s = vec![0.0; self.dim];
                for (nu, w) in rule.nodes.iter().zip(&rule.weights) {
                    let h = self.support(nu);
                    for (sk, vk) in s.iter_mut().zip(nu) {
                        *sk += w * h * vk;
                    }
                }
                let scale = self.dim as f64 / rule.total_weight();
                s.iter().map(|v| v * scale).collect()
            }
            BodyKind::Blend(parts) => {
                let mut s = vec![0.0; self.dim];
                for (w, b) in parts {
                    for (sk, p) in s.iter_mut().zip(b.steiner_point()) {
                        *sk += w * p;
                    }
                }
                s
            }
        }
    }

    /// Collects the outward facet normals of polytope components (2D: edge normals).
    pub(crate) fn polytope_normals(&self, out: &mut Vec<Vec<f64>>) {
        match &self.kind {
            BodyKind::Polytope { vertices } => match self.dim {
                2 => {
                    let hull = convex_hull_2d(vertices);
                    if hull.len() >= 2 {
                        for i in 0..hull.len() {
                            let a = hull[i];
                            let b = hull[(i + 1) % hull.len()];
                            let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                            let l = ex.hypot(ey);
                            if l > 0.0 {
                                out.push(vec![ey / l, -ex / l]);
                            }
                        }
                    }
                }
                3 => out.extend(facet_normals_3d(vertices)),
                _ => {}
            },
            BodyKind::Blend(parts) => {
                for (w, b) in parts {
                    if *w > 0.0 {
                        b.polytope_normals(out);
                    }
                }
            }
            _ => {}
        }
    }

    /// True if any component (recursively) has curved boundary.
    pub(crate) fn has_curved_part(&self) -> bool {
        match &self.kind {
            BodyKind::Ball { radius, .. } => *radius > 0.0,
            BodyKind::Ellipsoid { .. } => true,
            BodyKind::Polytope { .. } => false,
            BodyKind::Blend(parts) => parts.iter().any(|(w, b)| *w > 0.0 && b.has_curved_part()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::BodySpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("body serialization cannot fail")
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::invalid(format!("dimension must be >= 2, got {dim}")));
    }
    Ok(())
}

fn check_finite(field: &str, v: &[f64]) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("field `{field}` has non-finite entries")));
    }
    Ok(())
}

fn rank(mut rows: Vec<Vec<f64>>, dim: usize) -> usize {
    let scale = rows.iter().map(|r| norm(r)).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let tol = 1e-10 * scale;
    let mut r = 0;
    for col in 0..dim {
        let pivot = (r..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()));
        let Some(p) = pivot else { break };
        if rows[p][col].abs() <= tol {
            continue;
        }
        rows.swap(r, p);
        let pr = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            let f = row[col] / pr[col];
            for (x, y) in row.iter_mut().zip(&pr) {
                *x -= f * y;
            }
        }
        r += 1;
    }
    r
}

/// Counter-clockwise convex hull (Andrew's monotone chain); collinear points dropped.
pub(crate) fn convex_hull_2d(points: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn steiner_point_polygon(vertices: &[Vec<f64>]) -> Vec<f64> {
    let hull = convex_hull_2d(vertices);
    match hull.len() {
        0 => vec![0.0, 0.0],
        1 => hull[0].to_vec(),
        2 => vec![0.5 * (hull[0][0] + hull[1][0]), 0.5 * (hull[0][1] + hull[1][1])],
        m => {
            // Each vertex is weighted by its exterior angle / 2π.
            let mut s = [0.0, 0.0];
            for i in 0..m {
                let prev = hull[(i + m - 1) % m];
                let cur = hull[i];
                let next = hull[(i + 1) % m];
                let a_in = (cur[1] - prev[1]).atan2(cur[0] - prev[0]);
                let a_out = (next[1] - cur[1]).atan2(next[0] - cur[0]);
                let mut turn = a_out - a_in;
                while turn < 0.0 {
                    turn += std::f64::consts::TAU;
                }
                while turn >= std::f64::consts::TAU {
                    turn -= std::f64::consts::TAU;
                }
                let w = turn / std::f64::consts::TAU;
                s[0] += w * cur[0];
                s[1] += w * cur[1];
            }
            s.to_vec()
        }
    }
}

/// Outward unit normals of the facets of a 3D polytope (brute force over vertex triples).
pub(crate) fn facet_normals_3d(vertices: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = vertices.len();
    let scale = vertices.iter().map(|v| norm(v)).fold(1e-300, f64::max);
    let tol = 1e-10 * scale;
    let mut normals: Vec<Vec<f64>> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let a = &vertices[i];
                let u: Vec<f64> = (0..3).map(|d| vertices[j][d] - a[d]).collect();
                let v: Vec<f64> = (0..3).map(|d| vertices[k][d] - a[d]).collect();
                let n = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                let len = norm(&n);
                if len <= 1e-12 * scale * scale {
                    continue;
                }
                let n: Vec<f64> = n.iter().map(|c| c / len).collect();
                let offset = dot(&n, a);
                let (mut above, mut below) = (false, false);
                for w in vertices {
                    let s = dot(&n, w) - offset;
                    above |= s > tol;
                    below |= s < -tol;
                }
                let outward = match (above, below) {
                    (false, _) => n,
                    (true, false) => n.iter().map(|c| -c).collect(),
                    (true, true) => continue,
                };
                if !normals.iter().any(|p| dot(p, &outward) > 1.0 - 1e-12) {
                    normals.push(outward);
                }
            }
        }
    }
    normals
}

/// On-disk body specification.
///
/// ```json
/// {"dim": 2, "kind": "ball", "center": [0, 0], "radius": 1}
/// {"dim": 2, "kind": "ellipsoid", "center": [0, 0], "semi_axes": [2, 1]}
/// {"dim": 2, "kind": "polytope", "vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]]}
/// {"dim": 2, "kind": "blend", "components": [{"weight": 0.5, "body": {...}}, ...]}
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BodySpec {
    dim: usize,
    #[serde(flatten)]
    kind: KindSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum KindSpec {
    Ball { center: Vec<f64>, radius: f64 },
    Ellipsoid { center: Vec<f64>, semi_axes: Vec<f64> },
    Polytope { vertices: Vec<Vec<f64>> },
    Blend { components: Vec<ComponentSpec> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentSpec {
    weight: f64,
    body: BodySpec,
}

impl TryFrom<BodySpec> for ConvexBody {
    type Error = String;

    fn try_from(spec: BodySpec) -> std::result::Result<Self, String> {
        let dim = spec.dim;
        if dim < 2 {
            return Err(format!("field `dim`: must be >= 2, got {dim}"));
        }
        let mismatch = |field: &str, len: usize| {
            format!("field `{field}`: expected {dim} coordinates, got {len}")
        };
        let body = match spec.kind {
            KindSpec::Ball { center, radius } => {
                if center.len() != dim {
                    return Err(mismatch("center", center.len()));
                }
                if !(radius > 0.0) || !radius.is_finite() {
                    return Err(format!("field `radius`: must be positive and finite, got {radius}"));
                }
                ConvexBody::ball(center, radius)
            }
            KindSpec::Ellipsoid { center, semi_axes } => {
                if center.len() != dim {
                    return Err(mismatch("center", center.len()));
                }
                if semi_axes.len() != dim {
                    return Err(mismatch("semi_axes", semi_axes.len()));
                }
                ConvexBody::ellipsoid(center, semi_axes)
            }
            KindSpec::Polytope { vertices } => {
                if vertices.is_empty() {
                    return Err("field `vertices`: must be nonempty".into());
                }
                if let Some(v) = vertices.iter().find(|v| v.len() != dim) {
                    return Err(mismatch("vertices", v.len()));
                }
                ConvexBody::polytope(vertices)
            }
            KindSpec::Blend { components } => {
                let mut parts = Vec::with_capacity(components.len());
                for c in components {
                    let child = ConvexBody::try_from(c.body)?;
                    if child.dim != dim {
                        return Err(format!(
                            "field `components`: child has dim {} but blend has dim {dim}",
                            child.dim
                        ));
                    }
                    if !(c.weight >= 0.0) || !c.weight.is_finite() {
                        return Err(format!("field `weight`: must be nonnegative, got {}", c.weight));
                    }
                    parts.push((c.weight, child));
                }
                ConvexBody::blend(parts)
            }
        };
        body.map_err(|e| e.to_string())
    }
}

impl From<ConvexBody> for BodySpec {
    fn from(body: ConvexBody) -> Self {
        let kind = match body.kind {
            BodyKind::Ball { center, radius } => KindSpec::Ball { center, radius },
            BodyKind::Ellipsoid { center, semi_axes } => KindSpec::Ellipsoid { center, semi_axes },
            BodyKind::Polytope { vertices } => KindSpec::Polytope { vertices },
            BodyKind::Blend(parts) => KindSpec::Blend {
                components: parts
                    .into_iter()
                    .map(|(weight, b)| ComponentSpec { weight, body: b.into() })
                    .collect(),
            },
        };
        BodySpec { dim: body.dim, kind }
    }
}
