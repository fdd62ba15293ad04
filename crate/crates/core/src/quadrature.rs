//! Fixed quadrature rules: Gauss–Legendre on intervals and a collapsed
//! tensor rule on triangles.

use std::sync::OnceLock;

const MAX_CACHED_ORDER: usize = 64;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            // Chebyshev guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Composite rule over `panels` equal sub-intervals of `[a, b]`.
    pub fn integrate_panels(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> f64,
    ) -> f64 {
        let panels = panels.max(1);
        let step = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + step * k as f64;
                self.integrate(lo, lo + step, &mut f)
            })
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared Gauss–Legendre rule of the given order (1..=64 are cached).
pub fn gauss_legendre(order: usize) -> &'static GaussLegendre {
    static CACHE: OnceLock<Vec<GaussLegendre>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (1..=MAX_CACHED_ORDER).map(GaussLegendre::new).collect());
    assert!(
        (1..=MAX_CACHED_ORDER).contains(&order),
        "Gauss-Legendre order {order} outside cached range"
    );
    &cache[order - 1]
}

/// Collapsed Gauss rule on the reference triangle `(0,0), (1,0), (0,1)`:
/// barycentric-style coordinates `(u, v)` and weights summing to 1/2.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    pub fn new(order: usize) -> Self {
        let gl = gauss_legendre(order);
        let mut points = Vec::with_capacity(order * order);
        let mut weights = Vec::with_capacity(order * order);
        for (xi, wi) in gl.nodes.iter().zip(&gl.weights) {
            let u = 0.5 * (xi + 1.0);
            for (xj, wj) in gl.nodes.iter().zip(&gl.weights) {
                let s = 0.5 * (xj + 1.0);
                points.push((u, s * (1.0 - u)));
                weights.push(0.25 * wi * wj * (1.0 - u));
            }
        }
        Self { points, weights }
    }
}

pub fn triangle_rule(order: usize) -> &'static TriangleRule {
    static CACHE: OnceLock<Vec<TriangleRule>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (1..=16).map(TriangleRule::new).collect());
    &cache[order.clamp(1, 16) - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for order in [1usize, 2, 5, 8, 17, 32] {
            let gl = gauss_legendre(order);
            for deg in 0..(2 * order) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got = gl.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                assert!((got - exact).abs() < 1e-13, "order {order} deg {deg}: {got}");
            }
        }
    }

    #[test]
    fn triangle_rule_integrates_monomials() {
        let rule = triangle_rule(6);
        let area: f64 = rule.weights.iter().sum();
        assert!((area - 0.5).abs() < 1e-14);
        // int_T x^2 y = 2! 1! / 5! = 1/60
        let got: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(&(x, y), w)| w * x * x * y)
            .sum();
        assert!((got - 1.0 / 60.0).abs() < 1e-14);
    }
}
