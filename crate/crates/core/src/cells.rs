//! Exact and quadrature integrals of the Riesz kernel over lattice cells.
//!
//! Everything here works with the kernel `(|x − y|² + t²)^{γ/2}`, where
//! `γ = α − N` and `t ≥ 0` is the height above `R^N` (zero for the plain
//! Riesz kernel). Volume integrals with a point singularity are reduced to
//! face integrals by the pyramid decomposition
//! `∫_B f(z) dz = Σ_F η_F ∫_F ∫_0^1 τ^{N−1} f(s + τ(q − s)) dτ dq`, where
//! `η_F` is the signed distance from the apex `s` to the face plane.

use crate::quadrature::{gauss_legendre, triangle_rule};

/// `∫_B Π_k (a_k + b_k w_k) |w − s|^γ dw` over the box `B = [lo, hi]`.
///
/// The radial integral is exact because the weight is polynomial along
/// each ray; faces use tensor Gauss–Legendre of the given order.
pub fn box_poly_power(lo: &[f64], hi: &[f64], lin: &[(f64, f64)], s: &[f64], gamma: f64, order: usize) -> f64 {
    let n = lo.len();
    let scale = lo.iter().chain(hi).map(|v| v.abs()).fold(1.0, f64::max);
    let gl = gauss_legendre(order);
    let mut total = 0.0;
    let mut coeff = vec![0.0; n + 1];
    let mut q = vec![0.0; n];
    for axis in 0..n {
        for (plane, sign) in [(lo[axis], -1.0), (hi[axis], 1.0)] {
            let eta = sign * (plane - s[axis]);
            if eta.abs() <= 1e-15 * scale {
                continue;
            }
            let others: Vec<usize> = (0..n).filter(|&k| k != axis).collect();
            let m = others.len();
            let nodes = gl.order().pow(m as u32);
            let mut face = 0.0;
            for idx in 0..nodes {
                let mut rem = idx;
                let mut w = 1.0;
                q[axis] = plane;
                for &k in &others {
                    let j = rem % gl.order();
                    rem /= gl.order();
                    let half = 0.5 * (hi[k] - lo[k]);
                    q[k] = lo[k] + half * (1.0 + gl.nodes[j]);
                    w *= gl.weights[j] * half;
                }
                // Polynomial in τ: Π (a + b s + τ b (q − s)).
                coeff.iter_mut().for_each(|c| *c = 0.0);
                coeff[0] = 1.0;
                let mut deg = 0;
                let mut r2 = 0.0;
                for k in 0..n {
                    let d = q[k] - s[k];
                    r2 += d * d;
                    let (a, b) = lin[k];
                    let c0 = a + b * s[k];
                    let c1 = b * d;
                    for i in (0..=deg + 1).rev() {
                        let prev = if i > 0 { coeff[i - 1] } else { 0.0 };
                        coeff[i] = coeff[i] * c0 + prev * c1;
                    }
                    deg += 1;
                }
                let radial: f64 = coeff
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c / (n as f64 + gamma + i as f64))
                    .sum();
                face += w * r2.powf(0.5 * gamma) * radial;
            }
            total += eta * face;
        }
    }
    total
}

/// Mean of `|x − y|^γ` for `x, y` uniform in two unit cells of `Z^N` whose
/// lower corners differ by `offset`.
pub fn lattice_pair_mean(offset: &[i64], gamma: f64) -> f64 {
    let n = offset.len();
    let o: Vec<f64> = offset.iter().map(|&v| v as f64).collect();
    let zero = vec![0.0; n];
    let mut total = 0.0;
    // The difference of two uniform unit variables has density 1 − |z| on [−1, 1].
    for mask in 0..(1usize << n) {
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        let mut lin = vec![(0.0, 0.0); n];
        for k in 0..n {
            let sigma = if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
            if sigma > 0.0 {
                lo[k] = o[k];
                hi[k] = o[k] + 1.0;
            } else {
                lo[k] = o[k] - 1.0;
                hi[k] = o[k];
            }
            lin[k] = (1.0 + sigma * o[k], -sigma);
        }
        total += box_poly_power(&lo, &hi, &lin, &zero, gamma, 16);
    }
    total
}

/// Lookup table of [`lattice_pair_mean`] for Chebyshev offsets up to `radius`.
#[derive(Debug, Clone)]
pub struct LatticeTable {
    dim: usize,
    radius: usize,
    values: Vec<f64>,
}

impl LatticeTable {
    pub fn new(dim: usize, gamma: f64, radius: usize) -> Self {
        let side = radius + 1;
        let len = side.pow(dim as u32);
        let mut values = vec![0.0; len];
        for (idx, slot) in values.iter_mut().enumerate() {
            let key = Self::decode(idx, dim, side);
            let mut sorted = key.clone();
            sorted.sort_unstable();
            // Symmetric under coordinate permutation; compute the sorted key once.
            if sorted == key {
                *slot = lattice_pair_mean(&key, gamma);
            }
        }
        for idx in 0..len {
            let mut key = Self::decode(idx, dim, side);
            key.sort_unstable();
            values[idx] = values[Self::encode(&key, side)];
        }
        Self { dim, radius, values }
    }

    fn decode(mut idx: usize, dim: usize, side: usize) -> Vec<i64> {
        (0..dim)
            .map(|_| {
                let v = idx % side;
                idx /= side;
                v as i64
            })
            .collect()
    }

    fn encode(key: &[i64], side: usize) -> usize {
        key.iter().rev().fold(0, |acc, &v| acc * side + v as usize)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Mean kernel for unit cells at `offset`, or `None` beyond the radius.
    pub fn get(&self, offset: &[i64]) -> Option<f64> {
        debug_assert_eq!(offset.len(), self.dim);
        let side = self.radius + 1;
        let mut key = 0;
        for &v in offset.iter().rev() {
            let a = v.unsigned_abs() as usize;
            if a > self.radius {
                return None;
            }
            key = key * side + a;
        }
        Some(self.values[key])
    }
}

/// Second-order far-field approximation of the mean kernel between two
/// cells with centroid difference `d` and summed covariance `cov`
/// (row-major N×N).
pub fn far_mean(d: &[f64], t: f64, cov: &[f64], gamma: f64) -> f64 {
    let n = d.len();
    let r2: f64 = d.iter().map(|v| v * v).sum::<f64>() + t * t;
    let mut tr = 0.0;
    let mut dmd = 0.0;
    for i in 0..n {
        tr += cov[i * n + i];
        for j in 0..n {
            dmd += d[i] * cov[i * n + j] * d[j];
        }
    }
    let p = r2.powf(0.5 * gamma);
    p * (1.0 + 0.5 * gamma * (tr / r2 + (gamma - 2.0) * dmd / (r2 * r2)))
}

/// `∫_P (|x − y|² + t²)^{γ/2} dy` over a counter-clockwise polygon `P`.
pub fn polygon_potential(poly: &[[f64; 2]], x: [f64; 2], t: f64, gamma: f64) -> f64 {
    let t = t.abs();
    let m = poly.len();
    let mut total = 0.0;
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        let e = [b[0] - a[0], b[1] - a[1]];
        let len = e[0].hypot(e[1]);
        if len == 0.0 {
            continue;
        }
        let ax = [a[0] - x[0], a[1] - x[1]];
        let cross = ax[0] * e[1] - ax[1] * e[0];
        let delta = cross.abs() / len;
        if delta <= 1e-14 * len {
            continue;
        }
        let l0 = (ax[0] * e[0] + ax[1] * e[1]) / len;
        let l1 = l0 + len;
        total += cross.signum() * edge_integral(delta, l0, l1, t, gamma);
    }
    total
}

/// `δ/(γ+2) ∫_{l0}^{l1} [(δ² + l² + t²)^{(γ+2)/2} − t^{γ+2}] / (δ² + l²) dl`,
/// the potential of the triangle spanned by the field point and one edge.
fn edge_integral(delta: f64, l0: f64, l1: f64, t: f64, gamma: f64) -> f64 {
    let sigma = (delta * delta + t * t).sqrt();
    if gamma == -1.0 {
        let prim = |l: f64| {
            delta * (l / sigma).asinh() + t * (t * l / (delta * (l * l + sigma * sigma).sqrt())).atan()
                - t * (l / delta).atan()
        };
        return prim(l1) - prim(l0);
    }
    edge_integral_quadrature(delta, l0, l1, t, gamma)
}

fn edge_integral_quadrature(delta: f64, l0: f64, l1: f64, t: f64, gamma: f64) -> f64 {
    let p = 0.5 * (gamma + 2.0);
    let sigma = (delta * delta + t * t).sqrt();
    let u0 = (l0 / sigma).asinh();
    let u1 = (l1 / sigma).asinh();
    let panels = ((u1 - u0).abs().ceil() as usize).max(1);
    let gl = gauss_legendre(10);
    let t2 = t * t;
    let tp = t2.powf(p);
    let integral = gl.integrate_panels(u0, u1, panels, |u| {
        let (sh, ch) = (u.sinh(), u.cosh());
        let l = sigma * sh;
        let a2 = delta * delta + l * l;
        let num = if t == 0.0 {
            a2.powf(p)
        } else {
            tp * (p * (a2 / t2).ln_1p()).exp_m1()
        };
        num / a2 * sigma * ch
    });
    delta * integral / (gamma + 2.0)
}

/// Area, centroid and central second moments `[Mxx, Mxy, Myy]` (per unit
/// area) of a counter-clockwise polygon.
pub fn polygon_moments(poly: &[[f64; 2]]) -> (f64, [f64; 2], [f64; 3]) {
    let o = poly[0];
    let m = poly.len();
    let (mut a, mut cx, mut cy, mut ixx, mut ixy, mut iyy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..m {
        let (x0, y0) = (poly[i][0] - o[0], poly[i][1] - o[1]);
        let (x1, y1) = (poly[(i + 1) % m][0] - o[0], poly[(i + 1) % m][1] - o[1]);
        let c = x0 * y1 - x1 * y0;
        a += c;
        cx += (x0 + x1) * c;
        cy += (y0 + y1) * c;
        ixx += (x0 * x0 + x0 * x1 + x1 * x1) * c;
        iyy += (y0 * y0 + y0 * y1 + y1 * y1) * c;
        ixy += (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0) * c;
    }
    let area = 0.5 * a;
    if area <= 0.0 {
        return (0.0, o, [0.0; 3]);
    }
    let (gx, gy) = (cx / (6.0 * area), cy / (6.0 * area));
    let mxx = ixx / 12.0 / area - gx * gx;
    let myy = iyy / 12.0 / area - gy * gy;
    let mxy = ixy / 24.0 / area - gx * gy;
    (area, [gx + o[0], gy + o[1]], [mxx, mxy, myy])
}

/// Mean of the kernel over `x ∈ P`, `y ∈ Q` for two planar cells.
///
/// Integrates the exact potential of `Q` over a fan triangulation of `P`.
pub fn polygon_pair_mean(p: &[[f64; 2]], q: &[[f64; 2]], gamma: f64, order: usize) -> f64 {
    let (area_p, c, _) = polygon_moments(p);
    let (area_q, _, _) = polygon_moments(q);
    let rule = triangle_rule(order);
    let m = p.len();
    let mut acc = 0.0;
    for i in 0..m {
        let a = p[i];
        let b = p[(i + 1) % m];
        let e1 = [a[0] - c[0], a[1] - c[1]];
        let e2 = [b[0] - c[0], b[1] - c[1]];
        let jac = e1[0] * e2[1] - e1[1] * e2[0];
        if jac <= 0.0 {
            continue;
        }
        let mut s = 0.0;
        for (&(u, v), w) in rule.points.iter().zip(&rule.weights) {
            let x = [c[0] + u * e1[0] + v * e2[0], c[1] + u * e1[1] + v * e2[1]];
            s += w * polygon_potential(q, x, 0.0, gamma);
        }
        acc += s * jac;
    }
    acc / (area_p * area_q)
}

/// `∫_{cube} (|x − y|² + t²)^{γ/2} dy` for the cube of side `h` centred at `center`.
pub fn cube_potential(center: &[f64], h: f64, x: &[f64], t: f64, gamma: f64) -> f64 {
    let n = center.len();
    let lo: Vec<f64> = center.iter().map(|c| c - 0.5 * h).collect();
    let hi: Vec<f64> = center.iter().map(|c| c + 0.5 * h).collect();
    if t == 0.0 {
        return box_poly_power(&lo, &hi, &vec![(1.0, 0.0); n], x, gamma, 12);
    }
    let gl_face = gauss_legendre(12);
    let gl_tau = gauss_legendre(16);
    let mut total = 0.0;
    let mut q = vec![0.0; n];
    for axis in 0..n {
        for (plane, sign) in [(lo[axis], -1.0), (hi[axis], 1.0)] {
            let eta = sign * (plane - x[axis]);
            if eta.abs() <= 1e-15 * h {
                continue;
            }
            let others: Vec<usize> = (0..n).filter(|&k| k != axis).collect();
            let nodes = gl_face.order().pow(others.len() as u32);
            let mut face = 0.0;
            for idx in 0..nodes {
                let mut rem = idx;
                let mut w = 1.0;
                q[axis] = plane;
                for &k in &others {
                    let j = rem % gl_face.order();
                    rem /= gl_face.order();
                    q[k] = lo[k] + 0.5 * h * (1.0 + gl_face.nodes[j]);
                    w *= gl_face.weights[j] * 0.5 * h;
                }
                let r2: f64 = q.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                let radial = gl_tau.integrate(0.0, 1.0, |tau| {
                    tau.powi(n as i32 - 1) * (tau * tau * r2 + t * t).powf(0.5 * gamma)
                });
                face += w * radial;
            }
            total += eta * face;
        }
    }
    total
}
