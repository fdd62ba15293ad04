use super::body::{convex_hull_2d, BodyKind, ConvexBody, Direction};
use super::sphere::{direction_set, SphereRule};
use crate::error::{Error, Result};

/// `h_K(ν)` for a validated unit direction.
pub fn support_function(body: &ConvexBody, nu: &Direction) -> Result<f64> {
    if nu.dim() != body.dim() {
        return Err(Error::invalid(format!(
            "direction has {} components, body has dimension {}",
            nu.dim(),
            body.dim()
        )));
    }
    Ok(body.support(nu.as_slice()))
}

/// `(1 − λ) K0 + λ K1`, stored symbolically.
pub fn minkowski_interpolate(k0: &ConvexBody, k1: &ConvexBody, lambda: f64) -> Result<ConvexBody> {
    if k0.dim() != k1.dim() {
        return Err(Error::invalid("bodies have different dimensions"));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    ConvexBody::blend(vec![(1.0 - lambda, k0.clone()), (lambda, k1.clone())])
}

/// `M(K) = 2 ⨍_{S^{N-1}} h_K`, with `order` trapezoid nodes in 2D and a
/// product rule of `order` Gauss nodes in 3D.
pub fn mean_width(body: &ConvexBody, quadrature_order: usize) -> Result<f64> {
    if quadrature_order < 8 {
        return Err(Error::invalid("mean width quadrature order must be >= 8"));
    }
    let rule = SphereRule::new(body.dim(), quadrature_order)?;
    Ok(2.0 * rule.mean(|nu| body.support(nu)))
}

const PERIMETER_NODES: usize = 4096;

/// Perimeter of a planar convex body (twice the length for segments).
pub fn perimeter_2d(body: &ConvexBody) -> Result<f64> {
    if body.dim() != 2 {
        return Err(Error::UnsupportedDimension { dim: body.dim(), what: "perimeter is planar" });
    }
    Ok(match body.kind() {
        BodyKind::Ball { radius, .. } => std::f64::consts::TAU * radius,
        BodyKind::Polytope { vertices } => {
            let hull = convex_hull_2d(vertices);
            let m = hull.len();
            if m < 2 {
                0.0
            } else {
                (0..m)
                    .map(|i| {
                        let a = hull[i];
                        let b = hull[(i + 1) % m];
                        (b[0] - a[0]).hypot(b[1] - a[1])
                    })
                    .sum()
            }
        }
        // Cauchy: P = ∫ h(θ) dθ, spectrally accurate for the smooth ellipse.
        BodyKind::Ellipsoid { .. } => {
            let step = std::f64::consts::TAU / PERIMETER_NODES as f64;
            (0..PERIMETER_NODES)
                .map(|k| {
                    let a = step * k as f64;
                    body.support(&[a.cos(), a.sin()])
                })
                .sum::<f64>()
                * step
        }
        BodyKind::Blend(parts) => {
            let mut p = 0.0;
            for (w, b) in parts {
                p += w * perimeter_2d(b)?;
            }
            p
        }
    })
}

/// `max_ν |h_K(ν) − h_L(ν)|` over `directions` sampled unit vectors.
pub fn hausdorff_distance(k: &ConvexBody, l: &ConvexBody, directions: usize) -> Result<f64> {
    if k.dim() != l.dim() {
        return Err(Error::invalid("bodies have different dimensions"));
    }
    if directions < 32 {
        return Err(Error::invalid("hausdorff distance needs at least 32 directions"));
    }
    Ok(direction_set(k.dim(), directions)
        .iter()
        .map(|nu| (k.support(nu) - l.support(nu)).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square() -> ConvexBody {
        ConvexBody::cuboid(&[0.0, 0.0], &[0.5, 0.5]).unwrap()
    }

    #[test]
    fn mean_width_oracles() {
        // unit square: h(θ) = (|cos θ| + |sin θ|)/2, mean width 4/π
        let m = mean_width(&square(), 1 << 14).unwrap();
        assert!((m - 4.0 / PI).abs() < 1e-7, "{m}");
        let ball = ConvexBody::ball(vec![3.0, -1.0, 2.0], 0.7).unwrap();
        assert!((mean_width(&ball, 16).unwrap() - 1.4).abs() < 1e-13);
        let seg = ConvexBody::polytope(vec![vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!((mean_width(&seg, 1 << 14).unwrap() - 4.0 / PI).abs() < 1e-7);
        assert!(mean_width(&ball, 4).is_err());
    }

    #[test]
    fn cauchy_formula_for_ellipse() {
        let e = ConvexBody::ellipsoid(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap();
        // arc length via adaptive-free high-order Gauss on the parametrization
        let gl = crate::quadrature::gauss_legendre(64);
        let arc = gl.integrate_panels(0.0, 2.0 * PI, 64, |t| {
            (4.0 * t.sin().powi(2) + t.cos().powi(2)).sqrt()
        });
        let p = perimeter_2d(&e).unwrap();
        assert!((p - arc).abs() < 1e-8, "{p} vs {arc}");
        assert!((mean_width(&e, 256).unwrap() * PI - p).abs() < 1e-10);
    }

    #[test]
    fn interpolation_support_is_linear() {
        let disk = ConvexBody::unit_ball(2);
        let k = minkowski_interpolate(&square(), &disk, 0.3).unwrap();
        for nu in direction_set(2, 64) {
            let want = 0.7 * square().support(&nu) + 0.3 * disk.support(&nu);
            assert!((k.support(&nu) - want).abs() < 1e-12);
        }
        assert!(minkowski_interpolate(&square(), &disk, 1.5).is_err());
    }

    #[test]
    fn hausdorff_square_disk() {
        let sq = ConvexBody::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let d = hausdorff_distance(&sq, &ConvexBody::unit_ball(2), 4096).unwrap();
        assert!((d - (2f64.sqrt() - 1.0)).abs() < 1e-12);
    }
}
