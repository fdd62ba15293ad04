use serde::{Deserialize, Serialize};

use super::body::ConvexBody;
use super::boundary::{boundary_polygon, polygon_area, Membership};
use super::measures::perimeter_2d;
use super::sphere::fibonacci_sphere;
use super::{dot, norm};
use crate::cells::polygon_moments;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    Boundary,
    Interior,
}

/// One planar lattice cell clipped to the body.
#[derive(Debug, Clone)]
pub struct Cell2 {
    pub index: [i64; 2],
    /// Counter-clockwise cell polygon (the full square for interior cells).
    pub polygon: Vec<[f64; 2]>,
    pub full: bool,
    /// Central second moments `[Mxx, Mxy, Myy]` per unit area.
    pub cov: [f64; 3],
}

/// Geometry attached to each point, used to integrate the kernel over cells
/// instead of treating points as atoms.
#[derive(Debug, Clone)]
pub enum CellLayout {
    /// Bare points; the kernel is evaluated pointwise.
    Points,
    /// Square lattice of spacing `spacing` clipped to a planar body.
    Lattice2 { spacing: f64, cells: Vec<Cell2> },
    /// Cubic lattice of spacing `spacing`; every cell is a full cube.
    Lattice3 { spacing: f64, index: Vec<[i64; 3]> },
}

#[derive(Debug, Clone)]
pub struct PointCloud {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    mode: SampleMode,
    layout: CellLayout,
}

impl PointCloud {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, weights: Vec<f64>, mode: SampleMode) -> Result<Self> {
        Self::with_layout(dim, points, weights, mode, CellLayout::Points)
    }

    pub(crate) fn with_layout(
        dim: usize,
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
        mode: SampleMode,
        layout: CellLayout,
    ) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::invalid(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::invalid("point cloud is empty"));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim || p.iter().any(|v| !v.is_finite())) {
            return Err(Error::invalid(format!("point {p:?} is not a finite {dim}-vector")));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("cloud weights must be positive and finite"));
        }
        Ok(Self { dim, points, weights, mode, layout })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mode(&self) -> SampleMode {
        self.mode
    }

    pub fn layout(&self) -> &CellLayout {
        &self.layout
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Drops the cell geometry, leaving bare weighted points.
    pub fn without_cells(&self) -> Self {
        Self { layout: CellLayout::Points, ..self.clone() }
    }

    /// Radius of the smallest origin-centred ball about `center` containing the cloud.
    pub fn radius_about(&self, center: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|p| super::dist2(p, center).sqrt())
            .fold(0.0, f64::max)
    }

    /// Largest pairwise distance (O(n²)).
    pub fn diameter(&self) -> f64 {
        let mut d2: f64 = 0.0;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                d2 = d2.max(super::dist2(p, q));
            }
        }
        d2.sqrt()
    }
}

/// Samples `body` with roughly `resolution` points.
///
/// Interior mode uses a lattice anchored at the Steiner point with spacing
/// `(|K| / resolution)^{1/N}`; in 2D cells are clipped to the body so the
/// weights sum to its area, in 3D the cubes whose centres lie in the body
/// are kept. Boundary mode partitions the perimeter into equal arcs (2D) or
/// projects a Fibonacci sphere radially onto the boundary (3D).
pub fn sample_points(body: &ConvexBody, mode: SampleMode, resolution: usize) -> Result<PointCloud> {
    if resolution < 4 {
        return Err(Error::invalid(format!("resolution must be >= 4, got {resolution}")));
    }
    match (mode, body.dim()) {
        (SampleMode::Interior, _) if body.is_degenerate() => Err(Error::DegenerateBody(format!(
            "affine hull has dimension {} < {}",
            body.affine_dimension(),
            body.dim()
        ))),
        (SampleMode::Interior, 2) => lattice_2d(body, Spacing::Count(resolution)),
        (SampleMode::Interior, 3) => lattice_3d(body, resolution),
        (SampleMode::Boundary, 2) => boundary_2d(body, resolution),
        (SampleMode::Boundary, 3) => boundary_3d(body, resolution),
        (_, dim) => Err(Error::UnsupportedDimension { dim, what: "sampling needs N in {2, 3}" }),
    }
}

/// Interior lattice sample with a prescribed spacing (planar bodies only),
/// for nested refinement studies.
pub fn sample_points_with_spacing(body: &ConvexBody, spacing: f64) -> Result<PointCloud> {
    if body.dim() != 2 {
        return Err(Error::UnsupportedDimension { dim: body.dim(), what: "fixed-spacing lattices are planar" });
    }
    if !(spacing > 0.0) {
        return Err(Error::invalid("lattice spacing must be positive"));
    }
    if body.is_degenerate() {
        return Err(Error::DegenerateBody("planar body has no interior".into()));
    }
    lattice_2d(body, Spacing::Fixed(spacing))
}

enum Spacing {
    Count(usize),
    Fixed(f64),
}

fn lattice_2d(body: &ConvexBody, spacing: Spacing) -> Result<PointCloud> {
    let perimeter = perimeter_2d(body)?;
    let coarse = boundary_polygon(body, 512)?;
    let h = match spacing {
        Spacing::Count(n) => (polygon_area(&coarse) / n as f64).sqrt(),
        Spacing::Fixed(h) => h,
    };
    let segments = ((4.0 * perimeter / h).ceil() as usize).clamp(64, 1 << 15);
    let poly = boundary_polygon(body, segments)?;
    let h = match spacing {
        Spacing::Count(n) => (polygon_area(&poly) / n as f64).sqrt(),
        Spacing::Fixed(h) => h,
    };
    let center = body.steiner_point();
    let m = poly.len();
    let planes: Vec<([f64; 2], f64)> = (0..m)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % m];
            let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
            let l = ex.hypot(ey);
            let n = [ey / l, -ex / l];
            (n, n[0] * a[0] + n[1] * a[1])
        })
        .collect();
    let scale = body.outer_radius().max(h);
    let tol = 1e-12 * scale;
    let (xmin, xmax) = poly.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[0]), hi.max(p[0])));
    let (ymin, ymax) = poly.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[1]), hi.max(p[1])));
    let range = |lo: f64, hi: f64, c: f64| {
        (((lo - c) / h - 0.5).floor() as i64, ((hi - c) / h + 0.5).ceil() as i64)
    };
    let (i0, i1) = range(xmin, xmax, center[0]);
    let (j0, j1) = range(ymin, ymax, center[1]);
    let min_area = 1e-4 * h * h;

    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut cells = Vec::new();
    for j in j0..=j1 {
        for i in i0..=i1 {
            let cx = center[0] + i as f64 * h;
            let cy = center[1] + j as f64 * h;
            let square = vec![
                [cx - 0.5 * h, cy - 0.5 * h],
                [cx + 0.5 * h, cy - 0.5 * h],
                [cx + 0.5 * h, cy + 0.5 * h],
                [cx - 0.5 * h, cy + 0.5 * h],
            ];
            let inside = |p: &[f64; 2]| planes.iter().all(|(n, b)| n[0] * p[0] + n[1] * p[1] <= b + tol);
            if square.iter().all(inside) {
                points.push(vec![cx, cy]);
                weights.push(h * h);
                cells.push(Cell2 {
                    index: [i, j],
                    polygon: square,
                    full: true,
                    cov: [h * h / 12.0, 0.0, h * h / 12.0],
                });
                continue;
            }
            let Some(clipped) = clip_polygon(square, &planes) else { continue };
            let (area, centroid, cov) = polygon_moments(&clipped);
            if area < min_area {
                continue;
            }
            points.push(centroid.to_vec());
            weights.push(area);
            cells.push(Cell2 { index: [i, j], polygon: clipped, full: false, cov });
        }
    }
    PointCloud::with_layout(2, points, weights, SampleMode::Interior, CellLayout::Lattice2 { spacing: h, cells })
}

/// Sutherland–Hodgman clipping against half-planes `⟨n, x⟩ ≤ b`.
fn clip_polygon(mut poly: Vec<[f64; 2]>, planes: &[([f64; 2], f64)]) -> Option<Vec<[f64; 2]>> {
    for (n, b) in planes {
        let side = |p: &[f64; 2]| n[0] * p[0] + n[1] * p[1] - b;
        if poly.iter().all(|p| side(p) <= 0.0) {
            continue;
        }
        let mut out = Vec::with_capacity(poly.len() + 2);
        let m = poly.len();
        for k in 0..m {
            let p = poly[k];
            let q = poly[(k + 1) % m];
            let (sp, sq) = (side(&p), side(&q));
            if sp <= 0.0 {
                out.push(p);
            }
            if (sp <= 0.0) != (sq <= 0.0) {
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        if out.len() < 3 {
            return None;
        }
        poly = out;
    }
    Some(poly)
}

fn lattice_3d(body: &ConvexBody, resolution: usize) -> Result<PointCloud> {
    let membership = Membership::new(body, 4096)?;
    let center = body.steiner_point();
    let (lo, hi) = body.bounding_box();
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let collect = |h: f64| {
        let range: Vec<(i64, i64)> = (0..3)
            .map(|k| {
                (((lo[k] - center[k]) / h).floor() as i64, ((hi[k] - center[k]) / h).ceil() as i64)
            })
            .collect();
        let mut index = Vec::new();
        for k in range[2].0..=range[2].1 {
            for j in range[1].0..=range[1].1 {
                for i in range[0].0..=range[0].1 {
                    let p = [
                        center[0] + i as f64 * h,
                        center[1] + j as f64 * h,
                        center[2] + k as f64 * h,
                    ];
                    if membership.contains(&p) {
                        index.push([i, j, k]);
                    }
                }
            }
        }
        index
    };
    // Start from the inscribed-ellipsoid fraction of the bounding box and
    // correct the spacing from the observed counts.
    let mut h = (box_volume * std::f64::consts::PI / 6.0 / resolution as f64).cbrt();
    let mut index = collect(h);
    for _ in 0..4 {
        if index.is_empty() {
            h *= 0.5;
        } else {
            h *= (index.len() as f64 / resolution as f64).cbrt();
        }
        index = collect(h);
    }
    if index.is_empty() {
        return Err(Error::DegenerateBody("no lattice points inside the body".into()));
    }
    let points = index
        .iter()
        .map(|ijk| (0..3).map(|k| center[k] + ijk[k] as f64 * h).collect())
        .collect();
    let weights = vec![h * h * h; index.len()];
    PointCloud::with_layout(3, points, weights, SampleMode::Interior, CellLayout::Lattice3 { spacing: h, index })
}

fn boundary_2d(body: &ConvexBody, resolution: usize) -> Result<PointCloud> {
    let poly = boundary_polygon(body, (8 * resolution).max(1024))?;
    let m = poly.len();
    let lengths: Vec<f64> = (0..m)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % m];
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .collect();
    let total: f64 = lengths.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateBody("body is a single point".into()));
    }
    let step = total / resolution as f64;
    let mut points = Vec::with_capacity(resolution);
    let mut edge = 0;
    let mut start = 0.0;
    for k in 0..resolution {
        let s = (k as f64 + 0.5) * step;
        while edge + 1 < m && start + lengths[edge] < s {
            start += lengths[edge];
            edge += 1;
        }
        let a = poly[edge];
        let b = poly[(edge + 1) % m];
        let f = ((s - start) / lengths[edge]).clamp(0.0, 1.0);
        points.push(vec![a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]);
    }
    PointCloud::new(2, points, vec![step; resolution], SampleMode::Boundary)
}

fn boundary_3d(body: &ConvexBody, resolution: usize) -> Result<PointCloud> {
    if body.is_degenerate() {
        return Err(Error::DegenerateBody("radial boundary sampling needs an interior point".into()));
    }
    let membership = Membership::new(body, 4096)?;
    let c = body.steiner_point();
    let cell = 4.0 * std::f64::consts::PI / resolution as f64;
    let mut points = Vec::with_capacity(resolution);
    let mut weights = Vec::with_capacity(resolution);
    for u in fibonacci_sphere(resolution) {
        let (rho, normal) = membership.radial(&c, &u);
        let cos = dot(&u, &normal).max(1e-3);
        points.push(c.iter().zip(&u).map(|(ci, ui)| ci + rho * ui).collect());
        weights.push(rho * rho * cell / cos);
    }
    debug_assert!(points.iter().all(|p: &Vec<f64>| norm(p).is_finite()));
    PointCloud::new(3, points, weights, SampleMode::Boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn disk_interior_weight_and_count() {
        let cloud = sample_points(&ConvexBody::unit_ball(2), SampleMode::Interior, 500).unwrap();
        assert!((cloud.total_weight() - PI).abs() < 1e-3 * PI);
        assert!((cloud.len() as f64 - 500.0).abs() < 60.0, "{}", cloud.len());
    }

    #[test]
    fn square_weights_are_exact() {
        let sq = ConvexBody::cuboid(&[0.3, -0.2], &[1.0, 1.0]).unwrap();
        let interior = sample_points(&sq, SampleMode::Interior, 300).unwrap();
        assert!((interior.total_weight() - 4.0).abs() < 1e-10);
        let boundary = sample_points(&sq, SampleMode::Boundary, 100).unwrap();
        assert!((boundary.total_weight() - 8.0).abs() < 1e-10);
        let unit = ConvexBody::cuboid(&[0.0, 0.0], &[0.5, 0.5]).unwrap();
        let b = sample_points(&unit, SampleMode::Boundary, 64).unwrap();
        assert!((b.total_weight() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_boundary_weight() {
        let ball = ConvexBody::unit_ball(3);
        let cloud = sample_points(&ball, SampleMode::Boundary, 800).unwrap();
        assert!((cloud.total_weight() - 4.0 * PI).abs() < 0.01 * 4.0 * PI);
        let cube = ConvexBody::cuboid(&[0.0; 3], &[1.0; 3]).unwrap();
        let cloud = sample_points(&cube, SampleMode::Boundary, 4000).unwrap();
        assert!((cloud.total_weight() - 24.0).abs() < 0.03 * 24.0, "{}", cloud.total_weight());
    }

    #[test]
    fn ball_interior_3d() {
        let cloud = sample_points(&ConvexBody::unit_ball(3), SampleMode::Interior, 2000).unwrap();
        let vol = 4.0 / 3.0 * PI;
        assert!((cloud.total_weight() - vol).abs() < 0.03 * vol, "{}", cloud.total_weight());
        assert!((cloud.len() as f64 - 2000.0).abs() < 200.0);
    }

    #[test]
    fn degenerate_interior_is_rejected() {
        let seg = ConvexBody::polytope(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            sample_points(&seg, SampleMode::Interior, 100),
            Err(Error::DegenerateBody(_))
        ));
    }

    #[test]
    fn cloud_validation() {
        assert!(PointCloud::new(2, vec![vec![0.0, 0.0]], vec![0.0], SampleMode::Interior).is_err());
        assert!(PointCloud::new(2, vec![vec![0.0, 0.0]], vec![1.0, 1.0], SampleMode::Interior).is_err());
    }
}
