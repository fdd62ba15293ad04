use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::kernel::assemble_kernel;
use super::solver::{solve_equilibrium, SolverOptions};
use crate::error::{Error, Result};
use crate::geometry::{sample_points, ConvexBody, PointCloud, SampleMode};

/// Probability measure on a point cloud.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    cloud: Arc<PointCloud>,
    masses: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(cloud: Arc<PointCloud>, masses: Vec<f64>) -> Result<Self> {
        if masses.len() != cloud.len() {
            return Err(Error::invalid("one mass per cloud point is required"));
        }
        if masses.iter().any(|m| !(*m >= 0.0)) {
            return Err(Error::invalid("masses must be nonnegative"));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("masses must sum to 1, got {total}")));
        }
        Ok(Self { cloud, masses })
    }

    /// Uniform measure on the cloud points.
    pub fn uniform(cloud: Arc<PointCloud>) -> Self {
        let n = cloud.len();
        Self { cloud, masses: vec![1.0 / n as f64; n] }
    }

    pub fn cloud(&self) -> &Arc<PointCloud> {
        &self.cloud
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn barycenter(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.cloud.dim()];
        for (p, m) in self.cloud.points().iter().zip(&self.masses) {
            for (ck, pk) in c.iter_mut().zip(p) {
                *ck += m * pk;
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    /// `I_α`, the minimal discrete energy.
    pub energy: f64,
    /// `Cap_α = 1 / I_α`.
    pub capacity: f64,
    pub alpha: f64,
    /// Requested resolution (target point count).
    pub resolution: usize,
    /// Actual number of cloud points.
    pub points: usize,
    pub kkt_residual: f64,
    pub iterations: usize,
    /// `max_i |(Aμ)_i − I| / I` over all cloud points.
    pub plateau_deviation: f64,
}

/// Equilibrium measure together with its diagnostics.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub measure: DiscreteMeasure,
    pub result: CapacityResult,
}

/// Where the equilibrium measure lives: on the boundary for `α ≥ 2`, on the
/// whole body for `α < 2`.
///
/// For `α < 2` the measure has a density on the interior that blows up
/// towards the boundary; for `α ≥ 2` the potential is superharmonic and all
/// mass sits on the boundary.
pub fn support_mode(alpha: f64) -> SampleMode {
    if alpha >= 2.0 {
        SampleMode::Boundary
    } else {
        SampleMode::Interior
    }
}

/// Samples `body`, assembles the kernel and solves for the equilibrium measure.
pub fn equilibrium(body: &ConvexBody, alpha: f64, resolution: usize, options: &SolverOptions) -> Result<Equilibrium> {
    let dim = body.dim();
    if !(alpha > 0.0 && alpha < dim as f64) {
        return Err(Error::invalid(format!("alpha must lie in (0, {dim}), got {alpha}")));
    }
    if body.is_degenerate() {
        return Err(Error::DegenerateBody(format!(
            "affine hull has dimension {} < {dim}",
            body.affine_dimension()
        )));
    }
    let cloud = Arc::new(sample_points(body, support_mode(alpha), resolution)?);
    let kernel = assemble_kernel(&cloud, alpha)?;
    let (measure, mut result) = solve_equilibrium(&kernel, cloud, options)?;
    result.resolution = resolution;
    Ok(Equilibrium { measure, result })
}

/// `Cap_α(K)` at the given resolution with default solver options.
pub fn capacity(body: &ConvexBody, alpha: f64, resolution: usize) -> Result<CapacityResult> {
    equilibrium(body, alpha, resolution, &SolverOptions::default()).map(|e| e.result)
}
