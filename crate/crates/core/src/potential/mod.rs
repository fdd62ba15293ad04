//! Riesz potentials of discrete measures, the capacitary function, its
//! harmonic extension to the upper half-space, and the extension-based
//! half-Laplacian.

mod field;
mod fraclap;

pub use field::{
    capacitary_function, decay_probe, harmonic_extension, riesz_potential, ExtensionField, PotentialField,
};
pub use fraclap::{
    extension_laplacian_residual, fractional_laplacian_via_extension, gaussian_half_laplacian_spectral, sign_calibration, FracLapResult,
    HarmonicExtension, PoissonExtension, SignCalibration,
};
