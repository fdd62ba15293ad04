//! Convex bodies described through their support functions.
//!
//! A [`ConvexBody`] is a ball, an axis-aligned ellipsoid, a polytope given by
//! vertices, or a nonnegative Minkowski combination ("blend") of such bodies.
//! Blends are never converted to a hull: every consumer works with the
//! support function `h_K(ν) = sup_{x∈K} ⟨x, ν⟩`, which is linear in the blend
//! weights, plus kind-specific data where it is cheaper.

mod body;
mod boundary;
mod measures;
mod sample;
mod sphere;

pub use body::{BodyKind, ConvexBody, Direction};
pub use boundary::{boundary_polygon, Membership};
pub use measures::{
    hausdorff_distance, mean_width, minkowski_interpolate, perimeter_2d, support_function,
};
pub use sample::{sample_points, sample_points_with_spacing, CellLayout, PointCloud, SampleMode};
pub use sphere::{fibonacci_sphere, SphereRule};
pub(crate) use sphere::direction_set;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
