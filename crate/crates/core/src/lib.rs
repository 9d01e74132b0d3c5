//! Fisher information and efficient estimation of the scale σ² in
//! Z = σ n^{−β} X + Y, where X is a stationary Gaussian signal and Y is
//! Gaussian noise with covariance τ² (ΔΔᵗ)^K or τ² (ΔᵗΔ)^K.

pub mod error;
pub mod estimator;
pub mod fisher;
pub mod linalg;
pub mod model;
pub mod montecarlo;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub use estimator::{estimate, make_split, EstimateResult, SplitOptions, SplitPlan};
pub use linalg::{whiten, SymMatrix, WhitenedSystem};
pub use montecarlo::{run_study, sample_z, EstimatorKind, McStudy, Sampler};
pub use model::{AutocovarianceSpec, ModelSpec, NoiseConvention, Preset, SlowlyVaryingSpec};
pub use fisher::{fisher_closed_form, fisher_exact, fisher_integral, FisherReport, Regime};
