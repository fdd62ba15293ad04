use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{Record, Relation, VerificationReport};
use crate::equilibrium::{capacity, CapacityResult};
use crate::error::{Error, Result};
use crate::geometry::{minkowski_interpolate, ConvexBody};

/// Brunn–Minkowski data at one interpolation parameter.
///
/// Both deficits live on the `q = 1/(N−α)` power scale, where the
/// inequality is concavity of `λ ↦ Cap_α(K_λ)^q`:
/// `deficit_power = Cap_λ^q − ((1−λ)Cap_0^q + λCap_1^q)` and
/// `deficit_min = Cap_λ^q − min(Cap_0^q, Cap_1^q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BMRecord {
    pub lambda: f64,
    pub capacity_lambda: f64,
    pub deficit_power: f64,
    pub deficit_min: f64,
    /// `min(Cap_0^q, Cap_1^q)`, the scale for relative deficits.
    pub scale: f64,
}

impl BMRecord {
    pub fn relative_power(&self) -> f64 {
        self.deficit_power / self.scale
    }

    pub fn relative_min(&self) -> f64 {
        self.deficit_min / self.scale
    }
}

/// Deficits from a capacity table `Cap_0, Cap_1, (λ, Cap_λ)...`.
pub fn bm_records_from_capacities(dim: usize, alpha: f64, cap0: f64, cap1: f64, table: &[(f64, f64)]) -> Vec<BMRecord> {
    let q = 1.0 / (dim as f64 - alpha);
    let (p0, p1) = (cap0.powf(q), cap1.powf(q));
    let scale = p0.min(p1);
    table
        .iter()
        .map(|&(lambda, cap)| {
            let pl = cap.powf(q);
            BMRecord {
                lambda,
                capacity_lambda: cap,
                deficit_power: pl - ((1.0 - lambda) * p0 + lambda * p1),
                deficit_min: pl - scale,
                scale,
            }
        })
        .collect()
}

/// Capacities of `K_0`, `K_1` and every `K_λ`; per-λ failures are kept as errors.
pub fn brunn_minkowski_sweep(
    k0: &ConvexBody,
    k1: &ConvexBody,
    alpha: f64,
    lambdas: &[f64],
    resolution: usize,
) -> Result<(CapacityResult, CapacityResult, Vec<(f64, Result<CapacityResult>)>)> {
    validate(k0, k1, alpha, lambdas)?;
    let c0 = capacity(k0, alpha, resolution)?;
    let c1 = capacity(k1, alpha, resolution)?;
    let rows = lambdas
        .par_iter()
        .map(|&lambda| {
            let res = if lambda == 0.0 {
                Ok(c0.clone())
            } else if lambda == 1.0 {
                Ok(c1.clone())
            } else {
                minkowski_interpolate(k0, k1, lambda).and_then(|k| capacity(&k, alpha, resolution))
            };
            (lambda, res)
        })
        .collect();
    Ok((c0, c1, rows))
}

fn validate(k0: &ConvexBody, k1: &ConvexBody, alpha: f64, lambdas: &[f64]) -> Result<()> {
    if k0.dim() != k1.dim() {
        return Err(Error::invalid("bodies have different dimensions"));
    }
    let dim = k0.dim();
    if !(alpha > 0.0 && alpha < dim as f64) {
        return Err(Error::invalid(format!("alpha must lie in (0, {dim}), got {alpha}")));
    }
    for (name, k) in [("k0", k0), ("k1", k1)] {
        if k.is_degenerate() {
            return Err(Error::DegenerateBody(format!("{name} has empty interior")));
        }
    }
    if lambdas.is_empty() || lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(Error::invalid("lambdas must be a nonempty list in [0, 1]"));
    }
    Ok(())
}

/// Brunn–Minkowski inequality for `Cap_α` along `λ ↦ (1−λ)K_0 + λK_1`.
///
/// A case passes when both relative deficits are `≥ −tol`.
pub fn check_brunn_minkowski(
    k0: &ConvexBody,
    k1: &ConvexBody,
    alpha: f64,
    lambdas: &[f64],
    resolution: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let (c0, c1, rows) = brunn_minkowski_sweep(k0, k1, alpha, lambdas, resolution)?;
    let mut report = VerificationReport::new(
        "bm",
        json!({
            "alpha": alpha,
            "lambdas": lambdas,
            "resolution": resolution,
            "tol": tol,
            "k0": k0,
            "k1": k1,
        }),
    );
    report.exploratory = alpha != 1.0;
    for (lambda, res) in rows {
        let case = format!("lambda={lambda}");
        match res {
            Ok(c) => {
                let rec = &bm_records_from_capacities(k0.dim(), alpha, c0.capacity, c1.capacity, &[(lambda, c.capacity)])[0];
                report.push(bm_case(&case, rec, tol, c0.capacity, c1.capacity));
            }
            Err(e) => report.push(Record::failed(case, Relation::AtLeast, -tol, e)),
        }
    }
    report.runtime_seconds = Some(start.elapsed().as_secs_f64());
    Ok(report)
}

fn bm_case(case: &str, rec: &BMRecord, tol: f64, cap0: f64, cap1: f64) -> Record {
    // The power form implies the min form, so the record reports the
    // smaller of the two relative deficits.
    let worst = rec.relative_power().min(rec.relative_min());
    let mut r = Record::check(case, worst, Relation::AtLeast, -tol)
        .with("lambda", rec.lambda)
        .with("capacity_lambda", rec.capacity_lambda)
        .with("capacity_0", cap0)
        .with("capacity_1", cap1)
        .with("deficit_power", rec.deficit_power)
        .with("deficit_min", rec.deficit_min)
        .with("relative_deficit_power", rec.relative_power())
        .with("relative_deficit_min", rec.relative_min());
    r.pass = rec.relative_power() >= -tol && rec.relative_min() >= -tol;
    r
}

/// Exploratory Brunn–Minkowski sweep over several `α` for one pair.
pub fn conjecture_sweep(
    k0: &ConvexBody,
    k1: &ConvexBody,
    alphas: &[f64],
    lambdas: &[f64],
    resolution: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let mut report = VerificationReport::new(
        "conjecture_bm",
        json!({"alphas": alphas, "lambdas": lambdas, "resolution": resolution, "tol": tol, "k0": k0, "k1": k1}),
    );
    report.exploratory = true;
    for &alpha in alphas {
        let sub = check_brunn_minkowski(k0, k1, alpha, lambdas, resolution, tol)?;
        report.extend(sub.records.into_iter().map(|mut r| {
            r.case = format!("alpha={alpha},{}", r.case);
            r.values.insert("alpha".into(), alpha);
            r
        }));
    }
    report.runtime_seconds = Some(start.elapsed().as_secs_f64());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balls_have_zero_power_deficit() {
        // Cap_α(B_r)^{1/(N−α)} is linear in r.
        let (c0, c1) = (0.5f64, 0.5 * 3f64.powf(1.5));
        let c_half = 0.5 * 2f64.powf(1.5);
        let recs = bm_records_from_capacities(2, 0.5, c0, c1, &[(0.5, c_half)]);
        assert!(recs[0].deficit_power.abs() < 1e-15);
        assert!(recs[0].deficit_min > 0.0);
    }

    #[test]
    fn perturbed_table_fails() {
        let recs = bm_records_from_capacities(2, 1.0, 1.0, 1.2, &[(0.5, 1.1 * 0.9)]);
        let rec = bm_case("lambda=0.5", &recs[0], 1e-2, 1.0, 1.2);
        assert!(!rec.pass);
    }

    #[test]
    fn invalid_alpha_is_rejected() {
        let d = ConvexBody::unit_ball(2);
        assert!(check_brunn_minkowski(&d, &d, 5.0, &[0.5], 100, 1e-2).is_err());
        assert!(check_brunn_minkowski(&d, &d, 1.0, &[1.5], 100, 1e-2).is_err());
    }
}
