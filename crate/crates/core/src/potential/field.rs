use std::sync::Arc;

use crate::cells::{cube_potential, far_mean, polygon_potential};
use crate::equilibrium::{equilibrium, point_self_term, CapacityResult, DiscreteMeasure, SolverOptions};
use crate::error::{Error, Result};
use crate::geometry::{dist2, direction_set, CellLayout, ConvexBody, Membership};

/// Cells within this many spacings (Chebyshev) of the field point are
/// integrated exactly; farther cells use the second-moment expansion.
const NEAR_CELLS: f64 = 3.5;

/// `x ↦ normalization · Σ_i m_i k_i(x)`, where `k_i` is the Riesz kernel
/// averaged over the cell of point `i` (the bare kernel for cell-less clouds).
#[derive(Debug, Clone)]
pub struct PotentialField {
    measure: Arc<DiscreteMeasure>,
    alpha: f64,
    normalization: f64,
    body: Option<Arc<Membership>>,
    result: Option<CapacityResult>,
}

impl PotentialField {
    pub fn new(measure: Arc<DiscreteMeasure>, alpha: f64, normalization: f64) -> Result<Self> {
        let dim = measure.cloud().dim();
        if !(alpha > 0.0 && alpha < dim as f64) {
            return Err(Error::invalid(format!("alpha must lie in (0, {dim}), got {alpha}")));
        }
        if !(normalization > 0.0) || !normalization.is_finite() {
            return Err(Error::invalid("normalization must be positive and finite"));
        }
        Ok(Self { measure, alpha, normalization, body: None, result: None })
    }

    /// Attaches the solve that produced the measure.
    pub fn with_capacity_result(mut self, result: CapacityResult) -> Self {
        self.result = Some(result);
        self
    }

    pub fn measure(&self) -> &Arc<DiscreteMeasure> {
        &self.measure
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.measure.cloud().dim()
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Capacity diagnostics when the field came from the pipeline.
    pub fn capacity_result(&self) -> Option<&CapacityResult> {
        self.result.as_ref()
    }

    /// Raw potential value (see [`riesz_potential`]).
    pub fn potential(&self, x: &[f64]) -> f64 {
        self.normalization * kernel_sum(&self.measure, self.alpha, x, 0.0)
    }

    /// Capacitary value: exactly 1 on the body, `min(1, potential)` outside.
    ///
    /// Without an attached body this is the raw potential.
    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.body {
            Some(m) if m.contains(x) => 1.0,
            Some(_) => self.potential(x).min(1.0),
            None => self.potential(x),
        }
    }

    /// Whether `x` lies in the attached body (false when none is attached).
    pub fn in_body(&self, x: &[f64]) -> bool {
        self.body.as_ref().is_some_and(|m| m.contains(x))
    }
}

/// Harmonic extension of an `α = 1` potential to `R^N × [0, ∞)`.
#[derive(Debug, Clone)]
pub struct ExtensionField {
    measure: Arc<DiscreteMeasure>,
    normalization: f64,
}

impl ExtensionField {
    pub fn new(field: &PotentialField) -> Result<Self> {
        if field.alpha != 1.0 {
            return Err(Error::invalid(format!("the half-space extension needs alpha = 1, got {}", field.alpha)));
        }
        Ok(Self { measure: field.measure.clone(), normalization: field.normalization })
    }

    pub fn dim(&self) -> usize {
        self.measure.cloud().dim()
    }

    pub fn measure(&self) -> &Arc<DiscreteMeasure> {
        &self.measure
    }
}

/// `normalization · Σ m_i |x − y_i|^{α−N}`, cell-averaged for lattice clouds.
pub fn riesz_potential(field: &PotentialField, x: &[f64]) -> f64 {
    field.potential(x)
}

/// `normalization · Σ m_i (|x − y_i|² + t²)^{(1−N)/2}`, the `(N+1)`-dimensional
/// Newtonian potential of the same measure; even in `t`.
pub fn harmonic_extension(ext: &ExtensionField, x: &[f64], t: f64) -> f64 {
    ext.normalization * kernel_sum(&ext.measure, 1.0, x, t.abs())
}

fn kernel_sum(measure: &DiscreteMeasure, alpha: f64, x: &[f64], t: f64) -> f64 {
    let cloud = measure.cloud();
    let dim = cloud.dim();
    let gamma = alpha - dim as f64;
    let points = cloud.points();
    let masses = measure.masses();
    let mut acc = 0.0;
    match cloud.layout() {
        CellLayout::Points => {
            for ((p, m), w) in points.iter().zip(masses).zip(cloud.weights()) {
                if *m == 0.0 {
                    continue;
                }
                let r2 = dist2(x, p) + t * t;
                acc += m * if r2 == 0.0 {
                    point_self_term(dim, cloud.mode(), *w, gamma)
                } else {
                    r2.powf(0.5 * gamma)
                };
            }
        }
        CellLayout::Lattice2 { spacing, cells } => {
            let reach = NEAR_CELLS * spacing;
            for ((cell, p), (m, w)) in cells.iter().zip(points).zip(masses.iter().zip(cloud.weights())) {
                if *m == 0.0 {
                    continue;
                }
                let d = [x[0] - p[0], x[1] - p[1]];
                let mean = if d[0].abs().max(d[1].abs()) <= reach {
                    polygon_potential(&cell.polygon, [x[0], x[1]], t, gamma) / w
                } else {
                    far_mean(&d, t, &[cell.cov[0], cell.cov[1], cell.cov[1], cell.cov[2]], gamma)
                };
                acc += m * mean;
            }
        }
        CellLayout::Lattice3 { spacing, .. } => {
            let h = *spacing;
            let reach = NEAR_CELLS * h;
            let var = h * h / 12.0;
            let cov = [var, 0.0, 0.0, 0.0, var, 0.0, 0.0, 0.0, var];
            for (p, m) in points.iter().zip(masses) {
                if *m == 0.0 {
                    continue;
                }
                let d = [x[0] - p[0], x[1] - p[1], x[2] - p[2]];
                let mean = if d.iter().all(|v| v.abs() <= reach) {
                    cube_potential(p, h, x, t, gamma) / (h * h * h)
                } else {
                    far_mean(&d, t, &cov, gamma)
                };
                acc += m * mean;
            }
        }
    }
    acc
}

/// Capacitary function `v_K = v / I_1(K)` of a body, with the body attached
/// so that [`PotentialField::value`] is exactly 1 on `K`.
pub fn capacitary_function(body: &ConvexBody, resolution: usize) -> Result<PotentialField> {
    let eq = equilibrium(body, 1.0, resolution, &SolverOptions::default())?;
    let mut field = PotentialField::new(Arc::new(eq.measure), 1.0, 1.0 / eq.result.energy)?;
    field.body = Some(Arc::new(Membership::new(body, 4 * resolution.max(256))?));
    field.result = Some(eq.result);
    Ok(field)
}

/// `|x|^{N−1} v_K(x)` averaged over directions on spheres of the given radii
/// about the barycentre of the measure. Requires `α = 1`.
pub fn decay_probe(field: &PotentialField, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    if field.alpha != 1.0 {
        return Err(Error::invalid("decay probe needs alpha = 1"));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("radii must be strictly increasing"));
    }
    let center = field.measure.barycenter();
    let cloud = field.measure.cloud();
    let diameter = cloud.diameter();
    if let Some(r) = radii.iter().find(|&&r| !(r > 2.0 * diameter)) {
        return Err(Error::invalid(format!("radius {r} is not beyond twice the cloud diameter {diameter}")));
    }
    let dim = field.dim();
    let dirs = direction_set(dim, if dim == 2 { 64 } else { 256 });
    Ok(radii
        .iter()
        .map(|&r| {
            let mean = dirs
                .iter()
                .map(|u| {
                    let x: Vec<f64> = center.iter().zip(u).map(|(c, ui)| c + r * ui).collect();
                    field.potential(&x)
                })
                .sum::<f64>()
                / dirs.len() as f64;
            (r, r.powi(dim as i32 - 1) * mean)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{PointCloud, SampleMode};

    fn atom() -> Arc<DiscreteMeasure> {
        let cloud = Arc::new(PointCloud::new(2, vec![vec![0.0, 0.0]], vec![1e-4], SampleMode::Interior).unwrap());
        Arc::new(DiscreteMeasure::new(cloud, vec![1.0]).unwrap())
    }

    #[test]
    fn single_atom_potential() {
        let f = PotentialField::new(atom(), 1.0, 1.0).unwrap();
        assert!((riesz_potential(&f, &[3.0, 4.0]) - 0.2).abs() < 1e-15);
        let probe = decay_probe(&f, &[10.0, 100.0]).unwrap();
        assert!(probe.iter().all(|(_, v)| (v - 1.0).abs() < 1e-12));
        assert!(decay_probe(&f, &[10.0, 5.0]).is_err());
    }

    #[test]
    fn uniform_circle_at_centre() {
        let n = 64;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let cloud = Arc::new(PointCloud::new(2, pts, vec![0.1; n], SampleMode::Boundary).unwrap());
        let f = PotentialField::new(Arc::new(DiscreteMeasure::uniform(cloud)), 1.0, 1.0).unwrap();
        assert!((riesz_potential(&f, &[0.0, 0.0]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn extension_is_even_and_reduces_at_zero() {
        let f = capacitary_function(&ConvexBody::unit_ball(2), 200).unwrap();
        let ext = ExtensionField::new(&f).unwrap();
        for x in [[0.3, 0.1], [1.7, -0.4], [0.999, 0.0]] {
            assert_eq!(harmonic_extension(&ext, &x, 0.0), riesz_potential(&f, &x));
            assert_eq!(harmonic_extension(&ext, &x, 0.3), harmonic_extension(&ext, &x, -0.3));
        }
        let g = PotentialField::new(f.measure().clone(), 0.5, 1.0).unwrap();
        assert!(ExtensionField::new(&g).is_err());
    }
}
