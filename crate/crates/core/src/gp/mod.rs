//! Gaussian process regression with the squared-exponential + offset +
//! linear + noise covariance: covariance assembly, marginal likelihood and
//! its gradient, MAP hyperparameter search, and predictive densities.

mod covariance;
mod fit;
mod likelihood;
mod predict;

pub use covariance::{
    build_covariance_matrix, eval_covariance, free_parameter_count, CovarianceWorkspace,
    Hyperparameters, PARAM_CEILING, PARAM_FLOOR,
};
pub use fit::{log_posterior, log_prior, optimize_hyperparameters, FitOutcome, GpFitConfig};
pub use likelihood::{factorize, log_marginal_likelihood, log_marginal_likelihood_gradient, Factorization};
pub use predict::{predict, GpPosterior, PredictiveDensity};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GpError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("covariance matrix of size {size} is not positive definite even with maximal jitter")]
    SingularCovariance { size: usize },
    #[error("non-finite value in inputs, targets or covariance")]
    NonFinite,
    #[error("no samples")]
    Empty,
    #[error("too few samples: need {required}, found {found}")]
    TooFewSamples { required: usize, found: usize },
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),
    #[error("invalid optimizer configuration")]
    InvalidConfig,
    #[error("hyperparameter optimization failed at every start")]
    OptimizationFailed { fallback: Option<Box<(Hyperparameters, f64)>> },
}
