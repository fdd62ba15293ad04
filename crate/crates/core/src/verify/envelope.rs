use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::levelset::ScalarField;
use super::report::{Record, Relation, VerificationReport};
use crate::error::{Error, Result};
use crate::geometry::{minkowski_interpolate, ConvexBody};
use crate::potential::capacitary_function;

/// Ingredients of the envelope construction for one pair of bodies.
pub struct EnvelopeSetup<'a> {
    pub v0: &'a dyn ScalarField,
    pub v1: &'a dyn ScalarField,
    pub v_lambda: &'a dyn ScalarField,
    /// Reference points (e.g. Steiner points) of `K0` and `K1`.
    pub center0: Vec<f64>,
    pub center1: Vec<f64>,
    /// Radius of a ball about each reference point containing the body.
    pub radius0: f64,
    pub radius1: f64,
    pub lambda: f64,
}

impl EnvelopeSetup<'_> {
    fn dim(&self) -> usize {
        self.center0.len()
    }

    fn center_lambda(&self) -> Vec<f64> {
        let l = self.lambda;
        self.center0.iter().zip(&self.center1).map(|(a, b)| (1.0 - l) * a + l * b).collect()
    }

    fn x0_of(&self, x: &[f64], x1: &[f64]) -> Vec<f64> {
        let l = self.lambda;
        x.iter().zip(x1).map(|(xi, yi)| (xi - l * yi) / (1.0 - l)).collect()
    }

    fn decomposition_value(&self, x: &[f64], x1: &[f64]) -> f64 {
        self.v1.value(x1).min(self.v0.value(&self.x0_of(x, x1)))
    }

    /// Lower bound of `sup min(v0(x0), v1(x1))` over `x = λx1 + (1−λ)x0`,
    /// from a grid over `x1` followed by local refinements around the best
    /// candidate.
    pub fn envelope(&self, x: &[f64]) -> f64 {
        let dim = self.dim();
        let (coarse, fine) = if dim == 2 { (17usize, 9usize) } else { (9, 5) };
        let cl = self.center_lambda();
        let mut best_x1: Vec<f64> = self.center1.iter().zip(x).zip(&cl).map(|((c, xi), s)| c + xi - s).collect();
        let mut best = self.decomposition_value(x, &best_x1);
        let mut half = 1.5 * self.radius0.max(self.radius1);
        let mut count = coarse;
        for _ in 0..4 {
            let center = best_x1.clone();
            let step = 2.0 * half / (count - 1) as f64;
            let total = count.pow(dim as u32);
            let mut x1 = vec![0.0; dim];
            for k in 0..total {
                let mut rest = k;
                for (d, c) in x1.iter_mut().zip(&center) {
                    *d = c - half + (rest % count) as f64 * step;
                    rest /= count;
                }
                let v = self.decomposition_value(x, &x1);
                if v > best {
                    best = v;
                    best_x1.copy_from_slice(&x1);
                }
            }
            half = step;
            count = fine;
        }
        best
    }
}

/// Checks the envelope construction for `K_λ = (1−λ)K0 + λK1` with
/// capacitary functions computed at `resolution`: pointwise domination of
/// the envelope by `v_λ` on `samples` probes, and containment of sampled
/// Minkowski combinations of super-level sets in `{v_λ > s − tol}`.
#[allow(clippy::too_many_arguments)]
pub fn envelope_check(
    k0: &ConvexBody,
    k1: &ConvexBody,
    lambda: f64,
    levels: &[f64],
    samples: usize,
    tol: f64,
    resolution: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::invalid(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    let start = std::time::Instant::now();
    let k_lambda = minkowski_interpolate(k0, k1, lambda)?;
    let v0 = capacitary_function(k0, resolution)?;
    let v1 = capacitary_function(k1, resolution)?;
    let vl = capacitary_function(&k_lambda, resolution)?;
    let setup = EnvelopeSetup {
        v0: &v0,
        v1: &v1,
        v_lambda: &vl,
        center0: k0.steiner_point(),
        center1: k1.steiner_point(),
        radius0: radius_about(k0),
        radius1: radius_about(k1),
        lambda,
    };
    let mut report = envelope_check_fields(&setup, levels, samples, tol, seed)?;
    report.parameters = json!({
        "k0": k0, "k1": k1, "lambda": lambda, "levels": levels, "samples": samples,
        "tol": tol, "resolution": resolution, "seed": seed,
    });
    report.runtime_seconds = Some(start.elapsed().as_secs_f64());
    Ok(report)
}

fn radius_about(body: &ConvexBody) -> f64 {
    let c = body.steiner_point();
    let (lo, hi) = body.bounding_box();
    lo.iter()
        .zip(&hi)
        .zip(&c)
        .map(|((l, h), ci)| (ci - l).max(h - ci).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Same checks on arbitrary fields.
pub fn envelope_check_fields(
    setup: &EnvelopeSetup<'_>,
    levels: &[f64],
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let dim = setup.dim();
    if setup.center1.len() != dim || [setup.v0.dim(), setup.v1.dim(), setup.v_lambda.dim()].iter().any(|&d| d != dim) {
        return Err(Error::invalid("fields and centers must share one dimension"));
    }
    if !(setup.lambda > 0.0 && setup.lambda < 1.0) {
        return Err(Error::invalid("lambda must lie in (0, 1)"));
    }
    if samples == 0 {
        return Err(Error::invalid("samples must be positive"));
    }
    if levels.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::invalid("levels must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerificationReport::new(
        "envelope",
        json!({"lambda": setup.lambda, "levels": levels, "samples": samples, "tol": tol, "seed": seed}),
    );

    let cl = setup.center_lambda();
    let probe_half = 1.5 * ((1.0 - setup.lambda) * setup.radius0 + setup.lambda * setup.radius1);
    let probes: Vec<Vec<f64>> =
        (0..samples).map(|_| cl.iter().map(|c| c + rng.random_range(-probe_half..probe_half)).collect()).collect();
    let gaps: Vec<(f64, f64)> = probes
        .par_iter()
        .map(|x| {
            let env = setup.envelope(x);
            (env - setup.v_lambda.value(x), env)
        })
        .collect();
    let (worst, worst_idx) = gaps
        .iter()
        .enumerate()
        .fold((f64::NEG_INFINITY, 0), |acc, (i, g)| if g.0 > acc.0 { (g.0, i) } else { acc });
    let mut rec = Record::check("domination", worst, Relation::AtMost, tol)
        .with("probes", samples as f64)
        .with("violations", gaps.iter().filter(|g| g.0 > tol).count() as f64)
        .with("worst_envelope", gaps[worst_idx].1);
    for (d, v) in probes[worst_idx].iter().enumerate() {
        rec = rec.with(&format!("worst_x{d}"), *v);
    }
    report.push(rec);

    for &s in levels {
        let a0 = superlevel_samples(setup.v0, &setup.center0, setup.radius0, s, samples, &mut rng);
        let a1 = superlevel_samples(setup.v1, &setup.center1, setup.radius1, s, samples, &mut rng);
        let case = format!("inclusion s={s}");
        if a0.is_empty() || a1.is_empty() {
            report.push(Record::check(case, 0.0, Relation::AtMost, 0.0).with("pairs", 0.0));
            continue;
        }
        let l = setup.lambda;
        let pairs: Vec<Vec<f64>> = (0..samples)
            .map(|_| {
                let p = &a0[rng.random_range(0..a0.len())];
                let q = &a1[rng.random_range(0..a1.len())];
                p.iter().zip(q).map(|(u, v)| (1.0 - l) * u + l * v).collect()
            })
            .collect();
        let values: Vec<f64> = pairs.par_iter().map(|z| setup.v_lambda.value(z)).collect();
        let failures = values.iter().filter(|&&v| !(v > s - tol)).count();
        let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
        report.push(
            Record::check(case, failures as f64, Relation::AtMost, 0.0)
                .with("pairs", pairs.len() as f64)
                .with("samples_k0", a0.len() as f64)
                .with("samples_k1", a1.len() as f64)
                .with("min_value", min_value),
        );
    }
    Ok(report)
}

/// Up to `count` uniform samples of `{v > s}` drawn by rejection from a box
/// about `center` that contains the super-level set along a fan of rays.
fn superlevel_samples(
    v: &dyn ScalarField,
    center: &[f64],
    body_radius: f64,
    s: f64,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let dim = center.len();
    let dirs = crate::geometry::direction_set(dim, if dim == 2 { 32 } else { 64 });
    let at = |u: &[f64], r: f64| -> f64 {
        let p: Vec<f64> = center.iter().zip(u).map(|(c, ui)| c + r * ui).collect();
        v.value(&p)
    };
    let reach: Vec<f64> = dirs
        .par_iter()
        .map(|u| {
            let mut hi = body_radius.max(1e-12);
            let mut lo = 0.0;
            let mut grown = 0;
            while at(u, hi) > s {
                lo = hi;
                hi *= 2.0;
                grown += 1;
                if grown > 40 {
                    return f64::INFINITY;
                }
            }
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if at(u, mid) > s {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            hi
        })
        .collect();
    let half = 1.1 * reach.iter().copied().fold(0.0, f64::max);
    if !half.is_finite() {
        return Vec::new();
    }
    let mut kept = Vec::with_capacity(count);
    for _ in 0..50 {
        let batch: Vec<Vec<f64>> =
            (0..count).map(|_| center.iter().map(|c| c + rng.random_range(-half..half)).collect()).collect();
        let inside: Vec<bool> = batch.par_iter().map(|p| v.value(p) > s).collect();
        kept.extend(batch.into_iter().zip(inside).filter(|(_, ok)| *ok).map(|(p, _)| p));
        if kept.len() >= count {
            kept.truncate(count);
            break;
        }
    }
    kept
}
