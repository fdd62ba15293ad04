use super::body::{BodyKind, ConvexBody};
use super::{dot, norm};
use crate::error::{Error, Result};

/// Counter-clockwise polygon inscribed in the boundary of a planar body.
///
/// Vertices are images of the support-function gradient map at `segments`
/// equally spaced normal angles plus every edge normal of polytope
/// components. At an edge normal both one-sided limits are emitted, so
/// polygon edges (and Minkowski sums of them) are reproduced exactly.
pub fn boundary_polygon(body: &ConvexBody, segments: usize) -> Result<Vec<[f64; 2]>> {
    if body.dim() != 2 {
        return Err(Error::UnsupportedDimension { dim: body.dim(), what: "boundary polygon is planar" });
    }
    let tau = std::f64::consts::TAU;
    let mut angles: Vec<(f64, bool)> = Vec::new();
    if body.has_curved_part() {
        let m = segments.max(8);
        angles.extend((0..m).map(|k| (tau * k as f64 / m as f64, false)));
    }
    let mut normals = Vec::new();
    body.polytope_normals(&mut normals);
    for n in normals {
        angles.push((n[1].atan2(n[0]).rem_euclid(tau), true));
    }
    if angles.is_empty() {
        // A single point (or blend of points).
        angles.push((0.0, false));
    }
    angles.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));

    let scale = body.outer_radius().max(1e-300);
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(angles.len() * 2);
    let push = |p: Vec<f64>, out: &mut Vec<[f64; 2]>| {
        let q = [p[0], p[1]];
        if let Some(last) = out.last() {
            if (last[0] - q[0]).hypot(last[1] - q[1]) <= 1e-13 * scale {
                return;
            }
        }
        out.push(q);
    };
    for &(a, critical) in &angles {
        let nu = [a.cos(), a.sin()];
        let tangent = [-nu[1], nu[0]];
        if critical {
            let back = [-tangent[0], -tangent[1]];
            push(body.support_point(&nu, Some(&back)), &mut out);
        }
        push(body.support_point(&nu, Some(&tangent)), &mut out);
    }
    while out.len() > 1 {
        let (f, l) = (out[0], out[out.len() - 1]);
        if (f[0] - l[0]).hypot(f[1] - l[1]) <= 1e-13 * scale {
            out.pop();
        } else {
            break;
        }
    }
    Ok(remove_collinear(out, scale))
}

/// Drops repeated vertices and vertices where the boundary does not turn
/// (sine of the turning angle below 1e-12), until every corner is strict.
fn remove_collinear(mut pts: Vec<[f64; 2]>, scale: f64) -> Vec<[f64; 2]> {
    let min_len = 1e-13 * scale;
    loop {
        let m = pts.len();
        if m < 3 {
            return pts;
        }
        let mut kept: Vec<[f64; 2]> = Vec::with_capacity(m);
        for i in 0..m {
            let a = *kept.last().unwrap_or(&pts[(i + m - 1) % m]);
            let b = pts[i];
            let c = pts[(i + 1) % m];
            let (u, v) = ([b[0] - a[0], b[1] - a[1]], [c[0] - b[0], c[1] - b[1]]);
            let (lu, lv) = (u[0].hypot(u[1]), v[0].hypot(v[1]));
            if lu <= min_len || lv <= min_len {
                continue;
            }
            let sine = (u[0] * v[1] - u[1] * v[0]) / (lu * lv);
            if sine > 1e-12 {
                kept.push(b);
            }
        }
        if kept.len() == m {
            return kept;
        }
        pts = kept;
    }
}

pub(crate) fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let m = poly.len();
    (0..m)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % m];
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        * 0.5
}

/// Point-membership test for a body, with the outward normal and radial
/// function used by boundary sampling in 3D.
#[derive(Debug, Clone)]
pub enum Membership {
    Ball { center: Vec<f64>, radius: f64 },
    Ellipsoid { center: Vec<f64>, semi_axes: Vec<f64> },
    /// Intersection of half-spaces `⟨ν_k, x⟩ ≤ b_k`.
    Halfspaces { normals: Vec<Vec<f64>>, offsets: Vec<f64>, tol: f64 },
}

impl Membership {
    /// `resolution` controls how many normals approximate curved blends.
    pub fn new(body: &ConvexBody, resolution: usize) -> Result<Self> {
        match body.kind() {
            BodyKind::Ball { center, radius } => {
                return Ok(Self::Ball { center: center.clone(), radius: *radius })
            }
            BodyKind::Ellipsoid { center, semi_axes } => {
                return Ok(Self::Ellipsoid { center: center.clone(), semi_axes: semi_axes.clone() })
            }
            _ => {}
        }
        let scale = body.outer_radius().max(1e-300);
        let normals: Vec<Vec<f64>> = match body.dim() {
            2 => {
                let poly = boundary_polygon(body, resolution.max(64))?;
                let m = poly.len();
                if m < 3 {
                    return Err(Error::DegenerateBody("planar body has empty interior".into()));
                }
                (0..m)
                    .map(|i| {
                        let a = poly[i];
                        let b = poly[(i + 1) % m];
                        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                        let l = ex.hypot(ey);
                        vec![ey / l, -ex / l]
                    })
                    .collect()
            }
            3 => {
                let mut normals = Vec::new();
                body.polytope_normals(&mut normals);
                if body.has_curved_part() {
                    normals.extend(super::sphere::fibonacci_sphere(resolution.max(64)));
                }
                normals
            }
            dim => {
                return Err(Error::UnsupportedDimension { dim, what: "membership needs N in {2, 3}" })
            }
        };
        let offsets = normals.iter().map(|n| body.support(n)).collect();
        Ok(Self::Halfspaces { normals, offsets, tol: 1e-12 * scale })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Self::Ball { center, radius } => super::dist2(x, center) <= radius * radius * (1.0 + 1e-14),
            Self::Ellipsoid { center, semi_axes } => {
                let q: f64 = x
                    .iter()
                    .zip(center)
                    .zip(semi_axes)
                    .map(|((xi, ci), a)| ((xi - ci) / a).powi(2))
                    .sum();
                q <= 1.0 + 1e-14
            }
            Self::Halfspaces { normals, offsets, tol } => {
                normals.iter().zip(offsets).all(|(n, b)| dot(n, x) <= b + tol)
            }
        }
    }

    /// Boundary point `c + ρ u` on the ray from interior point `c` along unit
    /// `u`, with the outward unit normal there.
    pub fn radial(&self, c: &[f64], u: &[f64]) -> (f64, Vec<f64>) {
        match self {
            Self::Ball { center, radius } => {
                // |c - center + ρu| = r
                let d: Vec<f64> = c.iter().zip(center).map(|(a, b)| a - b).collect();
                let b = dot(&d, u);
                let rho = -b + (b * b - dot(&d, &d) + radius * radius).max(0.0).sqrt();
                let p: Vec<f64> = d.iter().zip(u).map(|(di, ui)| di + rho * ui).collect();
                let n = norm(&p);
                (rho, p.iter().map(|v| v / n).collect())
            }
            Self::Ellipsoid { center, semi_axes } => {
                let d: Vec<f64> = c.iter().zip(center).map(|(a, b)| a - b).collect();
                let qa: f64 = u.iter().zip(semi_axes).map(|(ui, a)| (ui / a).powi(2)).sum();
                let qb: f64 = u.iter().zip(&d).zip(semi_axes).map(|((ui, di), a)| ui * di / (a * a)).sum();
                let qc: f64 = d.iter().zip(semi_axes).map(|(di, a)| (di / a).powi(2)).sum::<f64>() - 1.0;
                let rho = (-qb + (qb * qb - qa * qc).max(0.0).sqrt()) / qa;
                let g: Vec<f64> = d
                    .iter()
                    .zip(u)
                    .zip(semi_axes)
                    .map(|((di, ui), a)| (di + rho * ui) / (a * a))
                    .collect();
                let n = norm(&g);
                (rho, g.iter().map(|v| v / n).collect())
            }
            Self::Halfspaces { normals, offsets, .. } => {
                let mut best = (f64::INFINITY, 0usize);
                for (k, (n, b)) in normals.iter().zip(offsets).enumerate() {
                    let un = dot(u, n);
                    if un > 1e-14 {
                        let rho = (b - dot(c, n)) / un;
                        if rho < best.0 {
                            best = (rho, k);
                        }
                    }
                }
                (best.0, normals[best.1].clone())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounded_square_has_strict_corners_at_every_resolution() {
        let body = ConvexBody::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap().dilated(0.1).unwrap();
        for segments in 300..420 {
            let p = boundary_polygon(&body, segments).unwrap();
            let m = p.len();
            for i in 0..m {
                let (a, b, c) = (p[i], p[(i + 1) % m], p[(i + 2) % m]);
                let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
                assert!(cross > 0.0, "segments={segments}: corner {i} is not strict");
            }
        }
    }

    #[test]
    fn square_polygon_is_exact() {
        let sq = ConvexBody::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let poly = boundary_polygon(&sq, 100).unwrap();
        assert_eq!(poly.len(), 4);
        assert!((polygon_area(&poly) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn blend_of_square_and_disk_keeps_flat_edges() {
        let sq = ConvexBody::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let blend = ConvexBody::blend(vec![(1.0, sq), (0.5, ConvexBody::unit_ball(2))]).unwrap();
        let poly = boundary_polygon(&blend, 4000).unwrap();
        // area of square dilated by 0.5: 4 + 4*2*0.5 + π/4
        let exact = 4.0 + 4.0 + std::f64::consts::PI * 0.25;
        assert!((polygon_area(&poly) - exact).abs() < 1e-5);
        let m = Membership::new(&blend, 512).unwrap();
        assert!(m.contains(&[1.49, 0.0]));
        assert!(!m.contains(&[1.51, 0.0]));
        assert!(!m.contains(&[1.4, 1.4]));
    }

    #[test]
    fn radial_function_of_cube() {
        let cube = ConvexBody::cuboid(&[0.0; 3], &[1.0; 3]).unwrap();
        let m = Membership::new(&cube, 64).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let (rho, n) = m.radial(&[0.0; 3], &[s, s, s]);
        assert!((rho - 3f64.sqrt()).abs() < 1e-12);
        assert!((norm(&n) - 1.0).abs() < 1e-14);
        let (rho, n) = m.radial(&[0.0; 3], &[1.0, 0.0, 0.0]);
        assert!((rho - 1.0).abs() < 1e-14 && (n[0] - 1.0).abs() < 1e-14);
    }
}
