use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::kernel::KernelMatrix;
use super::pipeline::{CapacityResult, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// Block principal pivoting on `min ½yᵀAy − 1ᵀy, y ≥ 0`, with pairwise
    /// Frank–Wolfe as fallback and polisher.
    ActiveSet,
    /// Pairwise (away-step) Frank–Wolfe on the simplex only.
    FrankWolfe,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverOptions {
    pub kind: SolverKind,
    /// Bound on the relative KKT residual.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { kind: SolverKind::ActiveSet, tolerance: 1e-7, max_iterations: 100_000 }
    }
}

/// Non-convergence, carrying the best iterate found.
#[derive(Debug, Clone)]
pub struct SolverFailure {
    pub masses: Vec<f64>,
    pub energy: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
}

impl fmt::Display for SolverFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no convergence after {} iterations (KKT residual {:e}, energy {})",
            self.iterations, self.kkt_residual, self.energy
        )
    }
}

/// Minimizes `μᵀAμ` over the probability simplex.
pub fn solve_equilibrium(
    kernel: &KernelMatrix,
    cloud: Arc<PointCloud>,
    options: &SolverOptions,
) -> Result<(DiscreteMeasure, CapacityResult)> {
    let a = kernel.entries();
    let n = a.nrows();
    if cloud.len() != n {
        return Err(Error::invalid(format!("kernel has {n} rows but cloud has {} points", cloud.len())));
    }
    if !(options.tolerance > 0.0) || options.max_iterations == 0 {
        return Err(Error::invalid("solver tolerance and iteration budget must be positive"));
    }
    let mut iterations = 0;
    let mut masses = match options.kind {
        SolverKind::ActiveSet => {
            let (y, its) = principal_pivoting(a, options.max_iterations.min(500));
            iterations += its;
            y.and_then(|y| normalize(&y))
        }
        SolverKind::FrankWolfe => None,
    }
    .unwrap_or_else(|| vec![1.0 / n as f64; n]);

    let mut residual = kkt_residual(a, &masses);
    if residual > options.tolerance && iterations < options.max_iterations {
        let (mu, its) = pairwise_frank_wolfe(a, masses, options.tolerance, options.max_iterations - iterations);
        iterations += its;
        masses = mu;
        residual = kkt_residual(a, &masses);
    }
    let g = a * DVector::from_column_slice(&masses);
    let energy: f64 = masses.iter().zip(g.iter()).map(|(m, gi)| m * gi).sum();
    if residual > options.tolerance || !(energy > 0.0) {
        return Err(Error::Solver(Box::new(SolverFailure { masses, energy, kkt_residual: residual, iterations })));
    }
    let plateau_deviation = g.iter().map(|gi| (gi - energy).abs()).fold(0.0, f64::max) / energy;
    let result = CapacityResult {
        energy,
        capacity: 1.0 / energy,
        alpha: kernel.alpha(),
        resolution: n,
        points: n,
        kkt_residual: residual,
        iterations,
        plateau_deviation,
    };
    Ok((DiscreteMeasure::new(cloud, masses)?, result))
}

fn normalize(y: &[f64]) -> Option<Vec<f64>> {
    let s: f64 = y.iter().sum();
    (s > 0.0 && s.is_finite()).then(|| y.iter().map(|v| v.max(0.0) / s).collect())
}

/// Relative KKT residual of a simplex point: with `g = Aμ` and `c = μᵀg`,
/// `max(max_{μ_i>0} |g_i − c|, max_i (c − g_i)₊) / c`.
pub(crate) fn kkt_residual(a: &DMatrix<f64>, masses: &[f64]) -> f64 {
    let g = a * DVector::from_column_slice(masses);
    let c: f64 = masses.iter().zip(g.iter()).map(|(m, gi)| m * gi).sum();
    let mut r: f64 = 0.0;
    for (m, gi) in masses.iter().zip(g.iter()) {
        if *m > 0.0 {
            r = r.max((gi - c).abs());
        }
        r = r.max(c - gi);
    }
    r / c
}

/// Block principal pivoting (Kim & Park) for the LCP `w = Ay − 1 ≥ 0, y ≥ 0,
/// yᵀw = 0`, with a single-index backup rule against cycling.
fn principal_pivoting(a: &DMatrix<f64>, max_iterations: usize) -> (Option<Vec<f64>>, usize) {
    let n = a.nrows();
    let mut free = vec![true; n];
    let mut best_infeasible = usize::MAX;
    let mut backup = 3;
    for it in 1..=max_iterations {
        let idx: Vec<usize> = (0..n).filter(|&i| free[i]).collect();
        let y = match solve_free(a, &idx) {
            Some(y) => y,
            None => return (None, it),
        };
        let mut full = vec![0.0; n];
        for (k, &i) in idx.iter().enumerate() {
            full[i] = y[k];
        }
        let w = a * DVector::from_column_slice(&full);
        let infeasible: Vec<usize> = (0..n)
            .filter(|&i| if free[i] { full[i] < 0.0 } else { w[i] - 1.0 < -1e-10 })
            .collect();
        if infeasible.is_empty() {
            return (Some(full), it);
        }
        if infeasible.len() < best_infeasible {
            best_infeasible = infeasible.len();
            backup = 3;
            infeasible.iter().for_each(|&i| free[i] = !free[i]);
        } else if backup > 0 {
            backup -= 1;
            infeasible.iter().for_each(|&i| free[i] = !free[i]);
        } else {
            let i = *infeasible.last().expect("nonempty");
            free[i] = !free[i];
        }
    }
    (None, max_iterations)
}

/// Solves `A_FF y = 1` by Cholesky with two steps of iterative refinement.
fn solve_free(a: &DMatrix<f64>, idx: &[usize]) -> Option<Vec<f64>> {
    let k = idx.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let sub = DMatrix::from_fn(k, k, |r, c| a[(idx[r], idx[c])]);
    let chol = sub.clone().cholesky()?;
    let ones = DVector::from_element(k, 1.0);
    let mut y = chol.solve(&ones);
    for _ in 0..2 {
        let r = &ones - &sub * &y;
        y += chol.solve(&r);
    }
    y.iter().all(|v| v.is_finite()).then(|| y.iter().copied().collect())
}

/// Pairwise Frank–Wolfe: moves mass from the support point of largest
/// potential to the point of smallest potential with exact line search.
fn pairwise_frank_wolfe(a: &DMatrix<f64>, mut mu: Vec<f64>, tol: f64, budget: usize) -> (Vec<f64>, usize) {
    let n = mu.len();
    let mut g: Vec<f64> = (a * DVector::from_column_slice(&mu)).iter().copied().collect();
    let mut c: f64 = mu.iter().zip(&g).map(|(m, gi)| m * gi).sum();
    for it in 1..=budget {
        let s = (0..n).min_by(|&i, &j| g[i].total_cmp(&g[j])).expect("nonempty");
        let away = (0..n)
            .filter(|&i| mu[i] > 0.0)
            .max_by(|&i, &j| g[i].total_cmp(&g[j]))
            .expect("simplex point has support");
        let gap = g[away] - g[s];
        if gap <= tol * c || s == away {
            return (mu, it);
        }
        let curvature = a[(s, s)] - 2.0 * a[(s, away)] + a[(away, away)];
        let max_step = mu[away];
        let step = if curvature > 0.0 { (gap / curvature).min(max_step) } else { max_step };
        mu[s] += step;
        mu[away] -= step;
        if step == max_step {
            mu[away] = 0.0;
        }
        let (col_s, col_a) = (a.column(s), a.column(away));
        for i in 0..n {
            g[i] += step * (col_s[i] - col_a[i]);
        }
        c += -2.0 * step * gap + step * step * curvature;
        if it % 1000 == 0 {
            c = mu.iter().zip(&g).map(|(m, gi)| m * gi).sum();
        }
    }
    (mu, budget)
}
