//! The covariance function and covariance-matrix assembly.
//!
//! ```text
//! C(u, u') = amplitude * exp(-1/2 * sum_k (u_k - u'_k)^2 / l_k^2)
//!          + offset
//!          + linear * sum_k u_k * u'_k
//!          + noise * [same sample]
//! ```
//!
//! The noise term fires on sample identity (the diagonal of a covariance
//! matrix), never on equality of input values: two distinct observations at
//! the same input still carry independent noise.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::GpError;

/// Smallest value any hyperparameter may take during optimization.
pub const PARAM_FLOOR: f64 = 1e-8;
/// Largest value any hyperparameter may take during optimization.
pub const PARAM_CEILING: f64 = 1e8;

/// Parameters of the covariance function for a family with `k` parent inputs.
///
/// A zero-parent family has no lengthscales and no linear-trend term; its
/// covariance reduces to `amplitude + offset + noise * [i == j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub amplitude: f64,
    pub offset: f64,
    pub linear: f64,
    pub noise: f64,
    pub lengthscales: Vec<f64>,
}

impl Hyperparameters {
    /// Default starting point on standardized data.
    pub fn initial(dim: usize) -> Self {
        Hyperparameters {
            amplitude: 1.0,
            offset: 0.1,
            linear: if dim == 0 { 0.0 } else { 0.1 },
            noise: 0.1,
            lengthscales: vec![1.0; dim],
        }
    }

    /// Input dimension (number of parents).
    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }

    /// Number of free parameters: 3 without parents, `4 + k` otherwise.
    pub fn free_parameter_count(&self) -> usize {
        free_parameter_count(self.dim())
    }

    /// Checks that every component is finite and non-negative and that
    /// lengthscales are strictly positive.
    pub fn validate(&self) -> Result<(), GpError> {
        let scalars = [self.amplitude, self.offset, self.linear, self.noise];
        if scalars.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(GpError::InvalidHyperparameters(format!("{self:?}")));
        }
        if self.lengthscales.iter().any(|l| !l.is_finite() || *l <= 0.0) {
            return Err(GpError::InvalidHyperparameters(format!("{self:?}")));
        }
        Ok(())
    }

    /// Log-space coordinates in the order
    /// `[amplitude, offset, (linear), noise, lengthscales...]`.
    /// Components are clamped into `[PARAM_FLOOR, PARAM_CEILING]` first.
    pub fn to_log_params(&self) -> Vec<f64> {
        let clamp = |v: f64| v.clamp(PARAM_FLOOR, PARAM_CEILING).ln();
        let mut out = Vec::with_capacity(self.free_parameter_count());
        out.push(clamp(self.amplitude));
        out.push(clamp(self.offset));
        if self.dim() > 0 {
            out.push(clamp(self.linear));
        }
        out.push(clamp(self.noise));
        out.extend(self.lengthscales.iter().map(|&l| clamp(l)));
        out
    }

    /// Inverse of [`Hyperparameters::to_log_params`].
    pub fn from_log_params(dim: usize, log_params: &[f64]) -> Self {
        debug_assert_eq!(log_params.len(), free_parameter_count(dim));
        if dim == 0 {
            Hyperparameters {
                amplitude: log_params[0].exp(),
                offset: log_params[1].exp(),
                linear: 0.0,
                noise: log_params[2].exp(),
                lengthscales: Vec::new(),
            }
        } else {
            Hyperparameters {
                amplitude: log_params[0].exp(),
                offset: log_params[1].exp(),
                linear: log_params[2].exp(),
                noise: log_params[3].exp(),
                lengthscales: log_params[4..].iter().map(|v| v.exp()).collect(),
            }
        }
    }
}

pub fn free_parameter_count(dim: usize) -> usize {
    if dim == 0 {
        3
    } else {
        4 + dim
    }
}

/// Evaluates the covariance between two input points.
///
/// `same_sample` selects the noise term; it refers to the identity of the two
/// observations, not to whether `u == u_prime`.
pub fn eval_covariance(
    u: &[f64],
    u_prime: &[f64],
    theta: &Hyperparameters,
    same_sample: bool,
) -> Result<f64, GpError> {
    let k = theta.dim();
    if u.len() != k {
        return Err(GpError::DimensionMismatch { expected: k, found: u.len() });
    }
    if u_prime.len() != k {
        return Err(GpError::DimensionMismatch { expected: k, found: u_prime.len() });
    }
    let mut sq = 0.0;
    let mut dot = 0.0;
    for ((a, b), l) in u.iter().zip(u_prime).zip(&theta.lengthscales) {
        let d = a - b;
        sq += d * d / (l * l);
        dot += a * b;
    }
    let mut c = theta.amplitude * (-0.5 * sq).exp() + theta.offset;
    if k > 0 {
        c += theta.linear * dot;
    }
    if same_sample {
        c += theta.noise;
    }
    Ok(c)
}

/// Per-input-set quantities that do not depend on the hyperparameters:
/// squared differences per dimension and the input Gram matrix.
#[derive(Debug, Clone)]
pub struct CovarianceWorkspace {
    sq_diffs: Vec<DMatrix<f64>>,
    gram: DMatrix<f64>,
    size: usize,
}

impl CovarianceWorkspace {
    pub fn new(inputs: &DMatrix<f64>) -> Self {
        let m = inputs.nrows();
        let k = inputs.ncols();
        let sq_diffs = (0..k)
            .map(|d| {
                DMatrix::from_fn(m, m, |i, j| {
                    let diff = inputs[(i, d)] - inputs[(j, d)];
                    diff * diff
                })
            })
            .collect();
        let gram = inputs * inputs.transpose();
        CovarianceWorkspace { sq_diffs, gram, size: m }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dim(&self) -> usize {
        self.sq_diffs.len()
    }

    /// The squared-exponential factor `exp(-1/2 sum_k D_k / l_k^2)` (all
    /// ones without parents).
    pub(crate) fn se_factor(&self, lengthscales: &[f64]) -> DMatrix<f64> {
        let m = self.size;
        let mut acc = DMatrix::zeros(m, m);
        for (d, l) in self.sq_diffs.iter().zip(lengthscales) {
            let s = -0.5 / (l * l);
            acc.iter_mut().zip(d.iter()).for_each(|(a, v)| *a += s * v);
        }
        acc.map(f64::exp)
    }

    pub(crate) fn sq_diff(&self, d: usize) -> &DMatrix<f64> {
        &self.sq_diffs[d]
    }

    pub(crate) fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Assembles the covariance matrix from a precomputed squared-exponential
    /// factor.
    pub(crate) fn assemble(&self, theta: &Hyperparameters, se: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.size;
        let mut c = se * theta.amplitude;
        c.add_scalar_mut(theta.offset);
        if self.dim() > 0 {
            c.iter_mut().zip(self.gram.iter()).for_each(|(a, g)| *a += theta.linear * g);
        }
        for i in 0..m {
            c[(i, i)] += theta.noise;
        }
        c
    }

    pub fn covariance(&self, theta: &Hyperparameters) -> Result<DMatrix<f64>, GpError> {
        if theta.dim() != self.dim() {
            return Err(GpError::DimensionMismatch { expected: self.dim(), found: theta.dim() });
        }
        Ok(self.assemble(theta, &self.se_factor(&theta.lengthscales)))
    }
}

/// Builds the `M x M` covariance matrix over the rows of `inputs`.
/// The noise term appears on the diagonal only.
pub fn build_covariance_matrix(
    inputs: &DMatrix<f64>,
    theta: &Hyperparameters,
) -> Result<DMatrix<f64>, GpError> {
    if inputs.nrows() == 0 {
        return Err(GpError::Empty);
    }
    CovarianceWorkspace::new(inputs).covariance(theta)
}
