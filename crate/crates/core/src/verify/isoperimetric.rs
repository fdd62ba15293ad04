use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{Record, Relation, VerificationReport};
use crate::equilibrium::capacity;
use crate::error::{Error, Result};
use crate::geometry::{mean_width, perimeter_2d, BodyKind, ConvexBody};

const MEAN_WIDTH_ORDER_2D: usize = 1 << 14;
const MEAN_WIDTH_ORDER_3D: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Constraint {
    MeanWidth(f64),
    Perimeter(f64),
}

fn mean_width_of(body: &ConvexBody) -> Result<f64> {
    mean_width(body, if body.dim() == 2 { MEAN_WIDTH_ORDER_2D } else { MEAN_WIDTH_ORDER_3D })
}

/// Scale-invariant ratio `M(K) / Cap_α(K)^{1/(N−α)}`.
pub fn isoperimetric_ratio(body: &ConvexBody, alpha: f64, resolution: usize) -> Result<f64> {
    let m = mean_width_of(body)?;
    let cap = capacity(body, alpha, resolution)?.capacity;
    Ok(m / cap.powf(1.0 / (body.dim() as f64 - alpha)))
}

fn is_ball(body: &ConvexBody) -> bool {
    match body.kind() {
        BodyKind::Ball { .. } => true,
        BodyKind::Ellipsoid { semi_axes, .. } => semi_axes.windows(2).all(|w| w[0] == w[1]),
        _ => false,
    }
}

/// Rescales every body to meet the constraint, computes `I_α` at each
/// resolution and ranks by the finest one. Passes when a ball ranks first
/// with a margin above three times the largest cross-resolution scatter.
pub fn isoperimetric_search(
    family: &[(String, ConvexBody)],
    alpha: f64,
    constraint: Constraint,
    resolutions: &[usize],
) -> Result<VerificationReport> {
    if family.is_empty() || resolutions.is_empty() {
        return Err(Error::invalid("family and resolutions must be nonempty"));
    }
    let dim = family[0].1.dim();
    if family.iter().any(|(_, b)| b.dim() != dim) {
        return Err(Error::invalid("family members have different dimensions"));
    }
    if !(alpha > 0.0 && alpha < dim as f64) {
        return Err(Error::invalid(format!("alpha must lie in (0, {dim}), got {alpha}")));
    }
    let target = match constraint {
        Constraint::MeanWidth(c) | Constraint::Perimeter(c) => c,
    };
    if !(target > 0.0) {
        return Err(Error::invalid("constraint value must be positive"));
    }
    if matches!(constraint, Constraint::Perimeter(_)) && dim != 2 {
        return Err(Error::UnsupportedDimension { dim, what: "perimeter constraint is planar" });
    }
    let start = std::time::Instant::now();
    struct Case {
        name: String,
        ball: bool,
        outcome: Result<(Vec<f64>, f64)>,
    }
    let cases: Vec<Case> = family
        .par_iter()
        .map(|(name, body)| {
            let outcome = (|| {
                if body.is_degenerate() {
                    return Err(Error::DegenerateBody(format!("{name}: constraint unreachable for a degenerate body")));
                }
                let current = match constraint {
                    Constraint::MeanWidth(_) => mean_width_of(body)?,
                    Constraint::Perimeter(_) => perimeter_2d(body)?,
                };
                let scaled = body.scaled(target / current);
                let energies = resolutions
                    .iter()
                    .map(|&n| capacity(&scaled, alpha, n).map(|r| r.energy))
                    .collect::<Result<Vec<f64>>>()?;
                let ratio = mean_width_of(&scaled)? * energies[energies.len() - 1].powf(1.0 / (dim as f64 - alpha));
                Ok((energies, ratio))
            })();
            Case { name: name.clone(), ball: is_ball(body), outcome }
        })
        .collect();

    let mut report = VerificationReport::new(
        "isoperimetric",
        json!({
            "alpha": alpha,
            "constraint": constraint,
            "resolutions": resolutions,
            "family": family.iter().map(|(n, b)| json!({"name": n, "body": b})).collect::<Vec<_>>(),
        }),
    );
    report.exploratory = alpha != 1.0;
    let mut ok: Vec<(&Case, f64, f64)> = Vec::new();
    for case in &cases {
        match &case.outcome {
            Ok((energies, _)) => {
                let fine = energies[energies.len() - 1];
                let scatter = energies.iter().map(|e| (e - fine).abs()).fold(0.0, f64::max);
                ok.push((case, fine, scatter));
            }
            Err(e) => report.push(Record::failed(format!("body {}", case.name), Relation::AtLeast, 0.0, e)),
        }
    }
    ok.sort_by(|a, b| a.1.total_cmp(&b.1));
    let max_scatter = ok.iter().map(|c| c.2).fold(0.0, f64::max);
    for (rank, (case, energy, scatter)) in ok.iter().enumerate() {
        let (energies, ratio) = case.outcome.as_ref().expect("successful case");
        let mut rec = Record::check(format!("body {}", case.name), *energy, Relation::AtLeast, 0.0)
            .with("rank", rank as f64 + 1.0)
            .with("energy", *energy)
            .with("scatter", *scatter)
            .with("ratio_mean_width_over_cap_power", *ratio)
            .with("is_ball", if case.ball { 1.0 } else { 0.0 });
        for (n, e) in resolutions.iter().zip(energies) {
            rec = rec.with(&format!("energy_n{n}"), *e);
        }
        report.push(rec);
    }
    match ok.as_slice() {
        [] => {}
        [only] => report.push(
            Record::check("ball ranks first", if only.0.ball { 1.0 } else { 0.0 }, Relation::AtLeast, 1.0)
                .with("scatter", max_scatter),
        ),
        [first, second, ..] => {
            let margin = second.1 - first.1;
            let measured = if first.0.ball { margin } else { -margin };
            report.push(
                Record::check("ball ranks first with margin", measured, Relation::AtLeast, 3.0 * max_scatter)
                    .with("margin", margin)
                    .with("max_scatter", max_scatter)
                    .with("first_is_ball", if first.0.ball { 1.0 } else { 0.0 }),
            );
        }
    }
    report.runtime_seconds = Some(start.elapsed().as_secs_f64());
    Ok(report)
}
