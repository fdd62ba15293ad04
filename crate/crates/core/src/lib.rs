//! Riesz equilibrium measures, capacities and capacitary potentials of
//! convex bodies, with harnesses for the level-set convexity of the
//! capacitary function and Brunn–Minkowski type inequalities.

pub mod cells;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod geometry;
pub mod potential;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
