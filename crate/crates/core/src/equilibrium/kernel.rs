use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::cells::{far_mean, lattice_pair_mean, polygon_pair_mean, LatticeTable};
use crate::error::{Error, Result};
use crate::geometry::{CellLayout, PointCloud, SampleMode};

/// Clouds above this size are refused (dense `n × n` storage).
pub const MAX_DENSE_POINTS: usize = 5000;

/// Chebyshev index radius within which lattice cells interact through exact
/// cell integrals; beyond it a second-moment expansion is used.
const NEAR_RADIUS_2D: i64 = 3;
const NEAR_RADIUS_3D: i64 = 2;

/// How the singular self-interaction (and, for lattices, nearby pairs) is
/// regularized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DiagonalRule {
    /// Bare interior points: each point is a square/cube of volume `w`, and
    /// the diagonal is its mean self-energy `c(α, N) w^{γ/N}`.
    CellAverage,
    /// Bare boundary points: each point is a segment (N = 2) or square
    /// panel (N = 3) of measure `w`.
    PanelAverage,
    /// Lattice clouds: every entry is the mean kernel between two cells.
    LatticeGalerkin { spacing: f64 },
}

#[derive(Debug, Clone)]
pub struct KernelMatrix {
    entries: DMatrix<f64>,
    alpha: f64,
    dim: usize,
    diagonal_rule: DiagonalRule,
}

impl KernelMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.nrows() == 0
    }

    pub fn diagonal_rule(&self) -> DiagonalRule {
        self.diagonal_rule
    }

    /// Builds a kernel from explicit entries (for testing and external data).
    pub fn from_entries(entries: DMatrix<f64>, alpha: f64, dim: usize) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n || n == 0 {
            return Err(Error::invalid("kernel matrix must be square and nonempty"));
        }
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (entries[(i, j)], entries[(j, i)]);
                if !a.is_finite() || (a - b).abs() > 1e-14 * a.abs().max(b.abs()) {
                    return Err(Error::invalid("kernel matrix must be finite and symmetric"));
                }
            }
            if !(entries[(i, i)] > 0.0) {
                return Err(Error::invalid("kernel diagonal must be positive"));
            }
        }
        Ok(Self { entries, alpha, dim, diagonal_rule: DiagonalRule::CellAverage })
    }
}

/// Self-energy of one bare cloud point of weight `w` (the diagonal rule).
///
/// Boundary panels whose self-energy diverges (`γ ≤ 1 − N`) are treated as
/// N-dimensional cells of volume `w^{N/(N−1)}`.
pub fn point_self_term(dim: usize, mode: SampleMode, weight: f64, gamma: f64) -> f64 {
    let nf = dim as f64;
    match mode {
        SampleMode::Boundary if gamma > 1.0 - nf => {
            if dim == 2 {
                2.0 / ((gamma + 1.0) * (gamma + 2.0)) * weight.powf(gamma)
            } else {
                lattice_pair_mean(&vec![0; dim - 1], gamma) * weight.powf(gamma / (nf - 1.0))
            }
        }
        SampleMode::Boundary => {
            let volume = weight.powf(nf / (nf - 1.0));
            lattice_pair_mean(&vec![0; dim], gamma) * volume.powf(gamma / nf)
        }
        SampleMode::Interior => lattice_pair_mean(&vec![0; dim], gamma) * weight.powf(gamma / nf),
    }
}

/// Dense matrix of mean Riesz interactions `|x − y|^{α−N}` between cloud elements.
///
/// For bare clouds the off-diagonal entries are the point kernel. For
/// lattice clouds each entry is the kernel averaged over the two cells,
/// which removes the first-order bias of point interactions next to the
/// diagonal and along clipped boundary cells.
pub fn assemble_kernel(cloud: &PointCloud, alpha: f64) -> Result<KernelMatrix> {
    let dim = cloud.dim();
    if !(alpha > 0.0 && alpha < dim as f64) {
        return Err(Error::invalid(format!("alpha must lie in (0, {dim}), got {alpha}")));
    }
    let n = cloud.len();
    if n > MAX_DENSE_POINTS {
        return Err(Error::TooLarge { n, max: MAX_DENSE_POINTS });
    }
    let gamma = alpha - dim as f64;
    let points = cloud.points();
    let (data, rule) = match cloud.layout() {
        CellLayout::Points => {
            if let Some((i, j)) = first_duplicate(points) {
                return Err(Error::DuplicatePoint { first: i, second: j });
            }
            let rule = match cloud.mode() {
                SampleMode::Interior => DiagonalRule::CellAverage,
                SampleMode::Boundary => DiagonalRule::PanelAverage,
            };
            let diag: Vec<f64> = cloud
                .weights()
                .iter()
                .map(|&w| point_self_term(dim, cloud.mode(), w, gamma))
                .collect();
            let data = fill_rows(n, |i, row| {
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = if i == j {
                        diag[i]
                    } else {
                        crate::geometry::dist2(&points[i], &points[j]).powf(0.5 * gamma)
                    };
                }
            });
            (data, rule)
        }
        CellLayout::Lattice2 { spacing, cells } => {
            let h = *spacing;
            let table = LatticeTable::new(2, gamma, NEAR_RADIUS_2D as usize);
            let hg = h.powf(gamma);
            let mut data = fill_rows(n, |i, row| {
                let (a, pa) = (&cells[i], &points[i]);
                for (j, slot) in row.iter_mut().enumerate() {
                    let b = &cells[j];
                    let off = [a.index[0] - b.index[0], a.index[1] - b.index[1]];
                    let cheb = off[0].abs().max(off[1].abs());
                    *slot = if cheb <= NEAR_RADIUS_2D {
                        // Exact for full pairs; cut pairs are filled below.
                        table.get(&off).map_or(0.0, |v| v * hg)
                    } else {
                        let pb = &points[j];
                        let d = [pa[0] - pb[0], pa[1] - pb[1]];
                        let cov = [a.cov[0] + b.cov[0], a.cov[1] + b.cov[1], a.cov[1] + b.cov[1], a.cov[2] + b.cov[2]];
                        far_mean(&d, 0.0, &cov, gamma)
                    };
                }
            });
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| {
                    let a = &cells[i];
                    (i..n).filter_map(move |j| {
                        let b = &cells[j];
                        let cheb = (a.index[0] - b.index[0]).abs().max((a.index[1] - b.index[1]).abs());
                        (cheb <= NEAR_RADIUS_2D && !(a.full && b.full)).then_some((i, j))
                    })
                })
                .collect();
            let values: Vec<f64> = pairs
                .par_iter()
                .map(|&(i, j)| {
                    let (a, b) = (&cells[i], &cells[j]);
                    let cheb = (a.index[0] - b.index[0]).abs().max((a.index[1] - b.index[1]).abs());
                    let order = if cheb <= 1 { 6 } else { 3 };
                    // Integrate over the cell with fewer vertices.
                    if a.polygon.len() <= b.polygon.len() {
                        polygon_pair_mean(&a.polygon, &b.polygon, gamma, order)
                    } else {
                        polygon_pair_mean(&b.polygon, &a.polygon, gamma, order)
                    }
                })
                .collect();
            for (&(i, j), v) in pairs.iter().zip(values) {
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
            (data, DiagonalRule::LatticeGalerkin { spacing: h })
        }
        CellLayout::Lattice3 { spacing, index } => {
            let h = *spacing;
            let table = LatticeTable::new(3, gamma, NEAR_RADIUS_3D as usize);
            let hg = h.powf(gamma);
            let var = h * h / 6.0;
            let cov = [var, 0.0, 0.0, 0.0, var, 0.0, 0.0, 0.0, var];
            let data = fill_rows(n, |i, row| {
                let a = index[i];
                for (j, slot) in row.iter_mut().enumerate() {
                    let b = index[j];
                    let off = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
                    *slot = match table.get(&off) {
                        Some(v) => v * hg,
                        None => {
                            let (pa, pb) = (&points[i], &points[j]);
                            let d = [pa[0] - pb[0], pa[1] - pb[1], pa[2] - pb[2]];
                            far_mean(&d, 0.0, &cov, gamma)
                        }
                    };
                }
            });
            (data, DiagonalRule::LatticeGalerkin { spacing: h })
        }
    };
    // Row-major data of a symmetric matrix is also its column-major data.
    Ok(KernelMatrix { entries: DMatrix::from_vec(n, n, data), alpha, dim, diagonal_rule: rule })
}

fn fill_rows(n: usize, f: impl Fn(usize, &mut [f64]) + Sync) -> Vec<f64> {
    let mut data = vec![0.0; n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(i, row)| f(i, row));
    data
}

fn first_duplicate(points: &[Vec<f64>]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .iter()
            .zip(&points[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    order
        .windows(2)
        .find(|w| points[w[0]] == points[w[1]])
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_entries() {
        let cloud = PointCloud::new(2, vec![vec![0.0, 0.0], vec![3.0, 4.0]], vec![0.1, 0.1], SampleMode::Interior).unwrap();
        let k = assemble_kernel(&cloud, 1.0).unwrap();
        assert!((k.entries()[(0, 1)] - 0.2).abs() < 1e-15);
        assert_eq!(k.entries()[(0, 1)], k.entries()[(1, 0)]);
        // Diagonal: self-energy of a square of area 0.1.
        let side = 0.1f64.sqrt();
        let want = lattice_pair_mean(&[0, 0], -1.0) / side;
        assert!((k.entries()[(0, 0)] - want).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let dup = PointCloud::new(2, vec![vec![1.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]], vec![1.0; 3], SampleMode::Interior).unwrap();
        assert!(matches!(assemble_kernel(&dup, 1.0), Err(Error::DuplicatePoint { first: 0, second: 2 })));
        let ok = PointCloud::new(2, vec![vec![1.0, 0.0]], vec![1.0], SampleMode::Interior).unwrap();
        assert!(assemble_kernel(&ok, 2.0).is_err());
        assert!(assemble_kernel(&ok, 0.0).is_err());
    }

    #[test]
    fn segment_panel_self_energy() {
        // mean |s − t|^γ over the unit segment is 2 / ((γ+1)(γ+2))
        let v = point_self_term(2, SampleMode::Boundary, 1.0, -0.5);
        assert!((v - 2.0 / (0.5 * 1.5)).abs() < 1e-14);
    }
}
