use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::report::{Record, Relation, VerificationReport};
use crate::error::{Error, Result};
use crate::potential::PotentialField;

/// A real function on `R^N`.
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
}

impl ScalarField for PotentialField {
    fn dim(&self) -> usize {
        PotentialField::dim(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        PotentialField::value(self, x)
    }
}

/// Adapter for closures.
pub struct FnField<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> ScalarField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Quasi-concavity of a capacitary function on random segments in the box
/// of side `4·diam` around its measure.
pub fn check_level_set_convexity(field: &PotentialField, segments: usize, seed: u64, tol: f64) -> Result<VerificationReport> {
    let center = field.measure().barycenter();
    let half_width = 2.0 * field.measure().cloud().diameter();
    let mut report = check_quasi_concavity(field, &center, half_width, segments, seed, tol)?;
    report.harness = "levelset".into();
    Ok(report)
}

/// Tests `u(λx + (1−λ)y) ≥ min(u(x), u(y)) − tol` for `segments` random
/// `(x, y, λ)` with `x, y` uniform in `center ± half_width`.
pub fn check_quasi_concavity(
    field: &dyn ScalarField,
    center: &[f64],
    half_width: f64,
    segments: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    if segments < 1000 {
        return Err(Error::invalid(format!("at least 1000 segments are required, got {segments}")));
    }
    if !(half_width > 0.0) || !(tol >= 0.0) {
        return Err(Error::invalid("box half-width must be positive and tolerance nonnegative"));
    }
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(Vec<f64>, Vec<f64>, f64)> = (0..segments)
        .map(|_| {
            let mut point = || -> Vec<f64> {
                center.iter().map(|c| c + half_width * (2.0 * rng.random::<f64>() - 1.0)).collect()
            };
            let x = point();
            let y = point();
            (x, y, rng.random_range(0.0..1.0))
        })
        .collect();
    let violations: Vec<f64> = draws
        .par_iter()
        .map(|(x, y, lambda)| {
            let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
            let floor = field.value(x).min(field.value(y));
            (floor - field.value(&z)).max(0.0)
        })
        .collect();
    let (mut worst, mut worst_index, mut count) = (0.0, None, 0usize);
    for (k, v) in violations.iter().enumerate() {
        if *v > tol {
            count += 1;
        }
        if *v > worst {
            worst = *v;
            worst_index = Some(k);
        }
    }
    let mut report = VerificationReport::new(
        "quasi_concavity",
        json!({"segments": segments, "seed": seed, "tol": tol, "center": center, "half_width": half_width}),
    );
    let mut rec = Record::check("worst_violation", worst, Relation::AtMost, tol)
        .with("violations", count as f64)
        .with("segments", segments as f64);
    if let Some(k) = worst_index {
        let (x, y, lambda) = &draws[k];
        for (i, v) in x.iter().enumerate() {
            rec = rec.with(&format!("worst_x{i}"), *v);
        }
        for (i, v) in y.iter().enumerate() {
            rec = rec.with(&format!("worst_y{i}"), *v);
        }
        rec = rec.with("worst_lambda", *lambda);
    }
    report.push(rec);
    report.runtime_seconds = Some(start.elapsed().as_secs_f64());
    Ok(report)
}
