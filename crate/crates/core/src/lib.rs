//! Simplex-gradient error bounds and a derivative-free optimizer that uses
//! them as constraints on the sample geometry.
//!
//! Numeric routines are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the bottom of this module fix the precision.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dfo;
pub mod error;
pub mod geometry;
pub mod gradient;
pub mod io;
pub mod linalg;
pub mod noise_bounds;
pub mod problems;
pub mod report;
pub mod repro;
pub mod sample_set;
pub mod scalar;
pub mod total_bounds;
pub mod truncation_bounds;

pub use error::{Error, IoError, Result, BOUND_SENTINEL};
pub use geometry::{
    affine_circumsphere, circumsphere, enumerate_complement_partitions, hyperplane_through,
    min_partition_distance, nearest_point_in_hull, partition_distance, Circumsphere,
    ComplementPartition, HullProjection, Hyperplane, Side,
};
pub use gradient::{
    decompose_gradient_error, gradient_error, linear_model, quadratic_model, simplex_gradient,
    GradientError, LinearModel, QuadModel,
};
pub use noise_bounds::{
    conditioning_bound, lmin_bound, noise_error, noise_plane_angle, worst_case_noise_error,
    NoiseRealization, NoiseReport,
};
pub use report::BoundReport;
pub use sample_set::{SampleSet, ScalingSpec};
pub use scalar::Scalar;
pub use total_bounds::{
    candidate_bound, e_star_ffd, ffd_error_bound, optimal_ffd_step, total_bound_ec, BoundKind,
    CandidateContext,
};
pub use truncation_bounds::{
    delta_bound, delta_bound_pointwise, delta_bound_uniform, extended_radial_bound,
    has_orthogonal_columns, min_vertex_bounds, radial_bound, simplex_bound, square_column_bound,
    truncation_report, SimplexBound, TruncationReport,
};

pub type SampleSetF64 = SampleSet<f64>;
pub type SampleSetF32 = SampleSet<f32>;
pub type QuadModelF64 = QuadModel<f64>;
pub type QuadModelF32 = QuadModel<f32>;
pub type CandidateContextF64 = CandidateContext<f64>;
pub type CandidateContextF32 = CandidateContext<f32>;
pub type HyperplaneF64 = Hyperplane<f64>;
pub type HyperplaneF32 = Hyperplane<f32>;
