use rayon::prelude::*;
use serde_json::json;

use super::report::{Record, Relation, VerificationReport};
use crate::equilibrium::capacity;
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;

/// Relative slack allowed in the monotonicity checks, covering solver noise.
const MONOTONE_SLACK: f64 = 1e-9;

/// `Cap_α(K + B(ε))` along a decreasing `ε` sequence: values must not
/// increase as `ε` decreases, consecutive differences must shrink, and the
/// linear extrapolation of the last two values to `ε = 0` must be within
/// `tol` (relative) of `Cap_α(K)`.
pub fn capacity_continuity_check(
    body: &ConvexBody,
    epsilons: &[f64],
    alpha: f64,
    resolution: usize,
    tol: f64,
) -> Result<VerificationReport> {
    if epsilons.len() < 2 {
        return Err(Error::invalid("at least two epsilons are required"));
    }
    if epsilons.iter().any(|e| !(*e >= 0.0)) || epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("epsilons must be nonnegative and strictly decreasing"));
    }
    let start = std::time::Instant::now();
    let base = capacity(body, alpha, resolution)?;
    let caps: Vec<f64> = epsilons
        .par_iter()
        .map(|&eps| {
            if eps == 0.0 {
                Ok(base.capacity)
            } else {
                body.dilated(eps).and_then(|k| capacity(&k, alpha, resolution)).map(|r| r.capacity)
            }
        })
        .collect::<Result<_>>()?;
    let mut report = VerificationReport::new(
        "continuity",
        json!({"alpha": alpha, "epsilons": epsilons, "resolution": resolution, "tol": tol, "body": body}),
    );
    for (eps, cap) in epsilons.iter().zip(&caps) {
        report.push(
            Record::check(format!("capacity eps={eps}"), *cap, Relation::AtLeast, base.capacity * (1.0 - MONOTONE_SLACK))
                .with("epsilon", *eps),
        );
    }
    for k in 0..caps.len() - 1 {
        let drop = (caps[k] - caps[k + 1]) / base.capacity;
        report.push(
            Record::check(format!("monotone {}->{}", epsilons[k], epsilons[k + 1]), drop, Relation::AtLeast, -MONOTONE_SLACK)
                .with("capacity_before", caps[k])
                .with("capacity_after", caps[k + 1]),
        );
    }
    for k in 0..caps.len().saturating_sub(2) {
        let (d0, d1) = ((caps[k] - caps[k + 1]).abs(), (caps[k + 1] - caps[k + 2]).abs());
        report.push(
            Record::check(format!("shrinking difference at eps={}", epsilons[k + 1]), d1, Relation::AtMost, d0)
                .with("previous_difference", d0),
        );
    }
    let n = caps.len();
    let (e0, e1) = (epsilons[n - 2], epsilons[n - 1]);
    let limit = caps[n - 1] - e1 * (caps[n - 2] - caps[n - 1]) / (e0 - e1);
    let rel = (limit - base.capacity).abs() / base.capacity;
    report.push(
        Record::check("extrapolated limit", rel, Relation::AtMost, tol)
            .with("limit", limit)
            .with("capacity_body", base.capacity),
    );
    report.runtime_seconds = Some(start.elapsed().as_secs_f64());
    Ok(report)
}
