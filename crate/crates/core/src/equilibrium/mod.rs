//! Discretized Riesz energy and its minimization over probability measures.
//!
//! The energy `μᵀAμ` is minimized over the simplex through the equivalent
//! nonnegative problem `min ½ yᵀAy − 1ᵀy, y ≥ 0`: at its solution
//! `Σy = Cap`, `μ = y / Σy` and `I = 1 / Σy`.

mod kernel;
mod pipeline;
mod solver;

pub use kernel::{assemble_kernel, point_self_term, DiagonalRule, KernelMatrix, MAX_DENSE_POINTS};
pub use pipeline::{capacity, equilibrium, support_mode, CapacityResult, DiscreteMeasure, Equilibrium};
pub use solver::{solve_equilibrium, SolverFailure, SolverKind, SolverOptions};
