use std::sync::OnceLock;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use super::field::{harmonic_extension, ExtensionField};
use crate::error::{Error, Result};
use crate::geometry::SphereRule;
use crate::quadrature::gauss_legendre;

/// A function on `R^N` together with its bounded harmonic extension `U(x, t)`
/// to the upper half-space.
pub trait HarmonicExtension: Sync {
    fn dim(&self) -> usize;

    /// `f(x) = U(x, 0)`.
    fn boundary_value(&self, x: &[f64]) -> f64;

    fn extension(&self, x: &[f64], t: f64) -> f64;

    /// `U(x, t) − f(x)`; implementations may avoid the cancellation.
    fn increment(&self, x: &[f64], t: f64) -> f64 {
        self.extension(x, t) - self.boundary_value(x)
    }
}

impl HarmonicExtension for ExtensionField {
    fn dim(&self) -> usize {
        ExtensionField::dim(self)
    }

    fn boundary_value(&self, x: &[f64]) -> f64 {
        harmonic_extension(self, x, 0.0)
    }

    fn extension(&self, x: &[f64], t: f64) -> f64 {
        harmonic_extension(self, x, t)
    }
}

/// Poisson-kernel extension of a bounded function given as a closure.
///
/// With `r = t tan φ`, `U(x, t) = κ_N ∫_0^{π/2} sin^{N−1}φ ⨍ f(x + t tan φ ω) dω dφ`;
/// the φ-integral uses Gauss–Legendre panels halving towards `π/2`.
pub struct PoissonExtension<F> {
    dim: usize,
    f: F,
    sphere: SphereRule,
    kappa: f64,
}

const POISSON_PANELS: usize = 60;

impl<F: Fn(&[f64]) -> f64 + Sync> PoissonExtension<F> {
    pub fn new(dim: usize, f: F) -> Result<Self> {
        let sphere = match dim {
            2 => SphereRule::new(2, 64)?,
            3 => SphereRule::new(3, 10)?,
            _ => return Err(Error::UnsupportedDimension { dim, what: "Poisson extension needs N in {2, 3}" }),
        };
        // κ_N = 1 / ∫_0^{π/2} sin^{N−1}φ dφ
        let kappa = if dim == 2 { 1.0 } else { 4.0 / std::f64::consts::PI };
        Ok(Self { dim, f, sphere, kappa })
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> HarmonicExtension for PoissonExtension<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn boundary_value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn extension(&self, x: &[f64], t: f64) -> f64 {
        self.boundary_value(x) + self.increment(x, t)
    }

    fn increment(&self, x: &[f64], t: f64) -> f64 {
        let t = t.abs();
        if t == 0.0 {
            return 0.0;
        }
        let fx = (self.f)(x);
        let gl = gauss_legendre(16);
        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut y = vec![0.0; self.dim];
        let mut total = 0.0;
        for k in 0..POISSON_PANELS {
            let lo = half_pi * (1.0 - 0.5f64.powi(k as i32));
            let hi = half_pi * (1.0 - 0.5f64.powi(k as i32 + 1));
            total += gl.integrate(lo, hi, |phi| {
                let r = t * phi.tan();
                let avg = self.sphere.mean(|u| {
                    for (yk, (xk, uk)) in y.iter_mut().zip(x.iter().zip(u)) {
                        *yk = xk + r * uk;
                    }
                    (self.f)(&y)
                });
                phi.sin().powi(self.dim as i32 - 1) * (avg - fx)
            });
        }
        self.kappa * total
    }
}

/// Outcome of the extension-based half-Laplacian.
#[derive(Debug, Clone, Serialize)]
pub struct FracLapResult {
    /// Calibrated value of `(−Δ)^{1/2} f(x)`.
    pub value: f64,
    /// Richardson limit of `(U(x,h) − U(x,0)) / h` before calibration.
    pub raw_limit: f64,
    /// `(h, (U(x,h) − U(x,0)) / h)` for each step.
    pub differences: Vec<(f64, f64)>,
    pub calibration: SignCalibration,
}

/// Sign (and observed constant) relating `lim ∂_t U` to the Fourier
/// definition `|ξ| f̂`, fixed once against the Gaussian.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SignCalibration {
    pub sign: f64,
    /// `|spectral / raw|`, expected to be 1.
    pub constant: f64,
    pub raw: f64,
    pub spectral: f64,
}

const CALIBRATION_STEPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

pub fn sign_calibration() -> SignCalibration {
    static CAL: OnceLock<SignCalibration> = OnceLock::new();
    *CAL.get_or_init(|| {
        let gaussian = PoissonExtension::new(2, |x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp())
            .expect("planar extension");
        let (raw, _) = richardson_limit(&gaussian, &[0.0, 0.0], &CALIBRATION_STEPS);
        let spectral = gaussian_half_laplacian_spectral(512, 16.0);
        SignCalibration {
            sign: if raw * spectral < 0.0 { -1.0 } else { 1.0 },
            constant: (spectral / raw).abs(),
            raw,
            spectral,
        }
    })
}

fn richardson_limit(target: &dyn HarmonicExtension, x: &[f64], hs: &[f64]) -> (f64, Vec<(f64, f64)>) {
    let diffs: Vec<(f64, f64)> = hs.iter().map(|&h| (h, target.increment(x, h) / h)).collect();
    // Neville: polynomial in h through all differences, evaluated at h = 0.
    let mut p: Vec<f64> = diffs.iter().map(|d| d.1).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (hi, hj) = (hs[i], hs[i + level]);
            p[i] = (hj * p[i] - hi * p[i + 1]) / (hj - hi);
        }
    }
    (p[0], diffs)
}

/// `(−Δ)^{1/2} f(x)` as the calibrated Richardson limit of one-sided
/// differences of the harmonic extension over the decreasing steps `h_sequence`.
pub fn fractional_laplacian_via_extension(
    target: &dyn HarmonicExtension,
    x: &[f64],
    h_sequence: &[f64],
) -> Result<FracLapResult> {
    if x.len() != target.dim() {
        return Err(Error::invalid("evaluation point has the wrong dimension"));
    }
    if h_sequence.is_empty() || h_sequence.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::invalid("steps must be positive"));
    }
    if h_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("steps must be strictly decreasing"));
    }
    let calibration = sign_calibration();
    let (raw_limit, differences) = richardson_limit(target, x, h_sequence);
    Ok(FracLapResult { value: calibration.sign * raw_limit, raw_limit, differences, calibration })
}

/// Central-difference Laplacian of `U` in the `N + 1` variables `(x, t)`
/// with step `h`; zero up to `O(h²)` wherever `U` is harmonic.
pub fn extension_laplacian_residual(target: &dyn HarmonicExtension, x: &[f64], t: f64, h: f64) -> f64 {
    let centre = target.extension(x, t);
    let mut acc = target.extension(x, t + h) + target.extension(x, t - h) - 2.0 * centre;
    let mut y = x.to_vec();
    for k in 0..x.len() {
        y[k] = x[k] + h;
        acc += target.extension(&y, t);
        y[k] = x[k] - h;
        acc += target.extension(&y, t);
        y[k] = x[k];
        acc -= 2.0 * centre;
    }
    acc / (h * h)
}

/// `(−Δ)^{1/2}` of `exp(−|x|²)` at the origin in `R^2` via the `|ξ|`
/// multiplier on a periodic `grid × grid` box `[−L, L)²`.
pub fn gaussian_half_laplacian_spectral(grid: usize, half_width: f64) -> f64 {
    let m = grid;
    let dx = 2.0 * half_width / m as f64;
    let mut data: Vec<Complex<f64>> = (0..m * m)
        .map(|idx| {
            let (i, j) = (idx % m, idx / m);
            let (x, y) = (-half_width + i as f64 * dx, -half_width + j as f64 * dx);
            Complex::new((-(x * x + y * y)).exp(), 0.0)
        })
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(m);
    for row in data.chunks_mut(m) {
        fft.process(row);
    }
    let mut column = vec![Complex::new(0.0, 0.0); m];
    for i in 0..m {
        for j in 0..m {
            column[j] = data[j * m + i];
        }
        fft.process(&mut column);
        for j in 0..m {
            data[j * m + i] = column[j];
        }
    }
    let freq = |k: usize| {
        let s = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
        std::f64::consts::TAU * s / (m as f64 * dx)
    };
    // The origin sits at index m/2 in each axis: phase (−1)^{k1 + k2}.
    let mut acc = 0.0;
    for j in 0..m {
        for i in 0..m {
            let phase = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            acc += phase * freq(i).hypot(freq(j)) * data[j * m + i].re;
        }
    }
    acc / (m * m) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_oracle_matches_closed_form() {
        let v = gaussian_half_laplacian_spectral(256, 16.0);
        // The |ξ| cusp at the origin limits the periodic sum to about dξ³ accuracy.
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-3, "{v}");
    }

    #[test]
    fn calibration_finds_negative_sign() {
        let cal = sign_calibration();
        assert_eq!(cal.sign, -1.0);
        assert!((cal.constant - 1.0).abs() < 0.02, "{cal:?}");
    }

    #[test]
    fn constant_and_linearity() {
        let one = PoissonExtension::new(2, |_: &[f64]| 3.0).unwrap();
        let r = fractional_laplacian_via_extension(&one, &[0.2, 0.1], &[0.1, 0.05]).unwrap();
        assert!(r.value.abs() < 1e-12);
        let steps = [0.2, 0.1, 0.05];
        let x = [0.3, -0.2];
        let f = |p: &[f64]| (-(p[0] * p[0] + p[1] * p[1])).exp();
        let g = |p: &[f64]| 1.0 / (1.0 + (p[0] - 1.0).powi(2) + p[1] * p[1]);
        let ef = PoissonExtension::new(2, f).unwrap();
        let eg = PoissonExtension::new(2, g).unwrap();
        let efg = PoissonExtension::new(2, |p: &[f64]| 2.0 * f(p) - 0.5 * g(p)).unwrap();
        let a = fractional_laplacian_via_extension(&ef, &x, &steps).unwrap().value;
        let b = fractional_laplacian_via_extension(&eg, &x, &steps).unwrap().value;
        let c = fractional_laplacian_via_extension(&efg, &x, &steps).unwrap().value;
        assert!((c - (2.0 * a - 0.5 * b)).abs() < 1e-8 * c.abs().max(1.0));
        assert!(fractional_laplacian_via_extension(&ef, &x, &[0.1, 0.2]).is_err());
    }
}
