//! Recovery of identity-covariance Gaussian mixtures, up to rigid motion,
//! from the distribution of the squared distance `Δ = |X − Y|²` between two
//! independent draws.
//!
//! The moments of `Δ` determine the weighted power sums
//! `p_n = Σ_{i,j} π_i π_j δ_ijⁿ` of the squared distances between means
//! ([`moments`]). Prony's method turns the power sums into the weighted
//! multiset of those distances ([`prony`]); the point configuration is
//! rebuilt from it ([`geometry`]) and the weights from the pair products
//! ([`weights`]). [`pipeline`] chains the stages and [`io`] reads and
//! writes the file formats of the command-line tool.
//!
//! Numerical code is generic over [`Real`]; the aliases below fix the two
//! scalar types used in practice.

// index loops read better in dense linear algebra; `!(x > 0)` also rejects NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod model;
pub mod moments;
pub mod pipeline;
pub mod prony;
pub mod sampling;
pub mod scalar;
pub mod weights;

pub use error::{Error, Result, Stage};
pub use geometry::{
    align, align_with, embed_labeled, reconstruct_unlabeled, shape_distance, Alignment, DistanceMultiset, PointConfig,
    Reconstruction, SearchOptions,
};
pub use model::{DistanceForm, FormKind, MixtureModel};
pub use moments::{
    empirical_moments, exact_moments, exact_power_sums, moments_to_power_sums, power_sums_to_moments, MomentVector,
    PowerSums,
};
pub use pipeline::{compare_models, recover_mixture, Comparison, RecoveryReport, Source, Tolerances};
pub use prony::{estimate_node_count, prony_recover, NodeSet, PronyOptions};
pub use sampling::{sample_deltas, sample_points, DeltaSamples};
pub use scalar::{Real, Wide};
pub use weights::{recover_weights, ProductAssignment, WeightRecovery};

/// Mixture model in double precision.
pub type Model = MixtureModel<f64>;
/// Mixture model in the 256-bit scalar.
pub type WideModel = MixtureModel<Wide>;
pub type Points = PointConfig<f64>;
pub type Sums = PowerSums<f64>;
pub type WideSums = PowerSums<Wide>;
