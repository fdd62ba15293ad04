use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Quadrature on the unit sphere `S^{N-1}` for N ∈ {2, 3}.
///
/// N = 2 uses the trapezoidal rule in the angle; N = 3 a product rule,
/// Gauss–Legendre in `cos θ` times trapezoidal in `φ`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        match dim {
            2 => {
                let step = std::f64::consts::TAU / order as f64;
                Ok(Self {
                    nodes: (0..order)
                        .map(|k| {
                            let a = step * k as f64;
                            vec![a.cos(), a.sin()]
                        })
                        .collect(),
                    weights: vec![step; order],
                })
            }
            3 => {
                let gl = gauss_legendre(order.min(64));
                let nphi = 2 * gl.order();
                let step = std::f64::consts::TAU / nphi as f64;
                let mut nodes = Vec::with_capacity(gl.order() * nphi);
                let mut weights = Vec::with_capacity(gl.order() * nphi);
                for (z, wz) in gl.nodes.iter().zip(&gl.weights) {
                    let s = (1.0 - z * z).sqrt();
                    for k in 0..nphi {
                        let p = step * (k as f64 + 0.5);
                        nodes.push(vec![s * p.cos(), s * p.sin(), *z]);
                        weights.push(wz * step);
                    }
                }
                Ok(Self { nodes, weights })
            }
            _ => Err(Error::UnsupportedDimension { dim, what: "sphere quadrature needs N in {2, 3}" }),
        }
    }

    /// Total weight: 2π for the circle, 4π for the sphere.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Average of `f` over the sphere.
    pub fn mean(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        let s: f64 = self.nodes.iter().zip(&self.weights).map(|(n, w)| w * f(n)).sum();
        s / self.total_weight()
    }
}

/// `n` quasi-uniform points on S^2 (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Roughly uniform unit directions: equally spaced angles in 2D, a
/// Fibonacci spiral in 3D, and ± coordinate axes otherwise.
pub(crate) fn direction_set(dim: usize, n: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => fibonacci_sphere(n),
        _ => {
            let mut out = Vec::new();
            for k in 0..dim {
                for s in [1.0, -1.0] {
                    let mut e = vec![0.0; dim];
                    e[k] = s;
                    out.push(e);
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_rules_integrate_polynomials() {
        let r3 = SphereRule::new(3, 8).unwrap();
        assert!((r3.total_weight() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        // mean of z^2 over S^2 is 1/3
        assert!((r3.mean(|n| n[2] * n[2]) - 1.0 / 3.0).abs() < 1e-14);
        let r2 = SphereRule::new(2, 16).unwrap();
        assert!((r2.mean(|n| n[0] * n[0]) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn fibonacci_points_are_unit() {
        for p in fibonacci_sphere(100) {
            assert!((super::super::norm(&p) - 1.0).abs() < 1e-14);
        }
    }
}
