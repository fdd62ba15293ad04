//! Property harnesses: each returns a [`VerificationReport`] whose records
//! carry the measured quantity, its threshold and a pass flag.

mod bm;
mod continuity;
mod envelope;
mod isoperimetric;
mod levelset;
mod report;

pub use bm::{bm_records_from_capacities, brunn_minkowski_sweep, check_brunn_minkowski, conjecture_sweep, BMRecord};
pub use continuity::capacity_continuity_check;
pub use envelope::{envelope_check, envelope_check_fields, EnvelopeSetup};
pub use isoperimetric::{isoperimetric_ratio, isoperimetric_search, Constraint};
pub use levelset::{check_level_set_convexity, check_quasi_concavity, FnField, ScalarField};
pub use report::{Record, Relation, VerificationReport};
