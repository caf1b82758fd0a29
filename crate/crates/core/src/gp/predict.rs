use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::covariance::{eval_covariance, CovarianceWorkspace, Hyperparameters};
use super::likelihood::factorize;
use super::GpError;

/// Univariate Gaussian predictive distribution for one query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictiveDensity {
    pub mean: f64,
    pub variance: f64,
    /// Set when numerical cancellation drove the variance non-positive and it
    /// was replaced by the noise variance.
    pub clamped: bool,
}

impl PredictiveDensity {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn log_density(&self, x: f64) -> f64 {
        let d = x - self.mean;
        -0.5 * (2.0 * PI * self.variance).ln() - 0.5 * d * d / self.variance
    }
}

/// A GP conditioned on `M` observations, with the Cholesky factor of the
/// training covariance and `C^-1 x` precomputed.
#[derive(Debug, Clone)]
pub struct GpPosterior {
    inputs: DMatrix<f64>,
    targets: DVector<f64>,
    theta: Hyperparameters,
    chol: DMatrix<f64>,
    alpha: DVector<f64>,
    jitter: f64,
}

impl GpPosterior {
    /// Conditions on `(inputs, targets)`. `M = 0` is allowed and yields the
    /// prior.
    pub fn fit(
        inputs: DMatrix<f64>,
        targets: DVector<f64>,
        theta: Hyperparameters,
    ) -> Result<Self, GpError> {
        theta.validate()?;
        if inputs.ncols() != theta.dim() {
            return Err(GpError::DimensionMismatch { expected: theta.dim(), found: inputs.ncols() });
        }
        if targets.len() != inputs.nrows() {
            return Err(GpError::DimensionMismatch { expected: inputs.nrows(), found: targets.len() });
        }
        if targets.iter().chain(inputs.iter()).any(|v| !v.is_finite()) {
            return Err(GpError::NonFinite);
        }
        if inputs.nrows() == 0 {
            return Ok(GpPosterior {
                inputs,
                targets,
                theta,
                chol: DMatrix::zeros(0, 0),
                alpha: DVector::zeros(0),
                jitter: 0.0,
            });
        }
        let c = CovarianceWorkspace::new(&inputs).covariance(&theta)?;
        let fact = factorize(c)?;
        let alpha = fact.chol.solve(&targets);
        Ok(GpPosterior {
            inputs,
            targets,
            theta,
            chol: fact.chol.l(),
            alpha,
            jitter: fact.jitter,
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hyperparameters(&self) -> &Hyperparameters {
        &self.theta
    }

    pub fn inputs(&self) -> &DMatrix<f64> {
        &self.inputs
    }

    pub fn targets(&self) -> &DVector<f64> {
        &self.targets
    }

    /// Lower Cholesky factor of the (possibly jittered) training covariance.
    pub fn chol(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Predictive density of a new noisy observation at `u_star`:
    /// mean `k^T C^-1 x`, variance `kappa - k^T C^-1 k` where `kappa`
    /// includes the noise term.
    pub fn predict(&self, u_star: &[f64]) -> Result<PredictiveDensity, GpError> {
        let dim = self.theta.dim();
        if u_star.len() != dim {
            return Err(GpError::DimensionMismatch { expected: dim, found: u_star.len() });
        }
        let kappa = eval_covariance(u_star, u_star, &self.theta, true)?;
        let m = self.len();
        if m == 0 {
            return Ok(PredictiveDensity { mean: 0.0, variance: kappa, clamped: false });
        }
        let mut row = vec![0.0; dim];
        let k = DVector::from_iterator(
            m,
            (0..m).map(|i| {
                for (d, r) in row.iter_mut().enumerate() {
                    *r = self.inputs[(i, d)];
                }
                eval_covariance(u_star, &row, &self.theta, false).expect("dimensions checked")
            }),
        );
        let mean = k.dot(&self.alpha);
        let v = self
            .chol
            .solve_lower_triangular(&k)
            .ok_or(GpError::SingularCovariance { size: m })?;
        let variance = kappa - v.dot(&v);
        if variance > 0.0 && variance.is_finite() {
            Ok(PredictiveDensity { mean, variance, clamped: false })
        } else {
            Ok(PredictiveDensity { mean, variance: self.theta.noise.max(f64::MIN_POSITIVE), clamped: true })
        }
    }
}

/// Free-function form of [`GpPosterior::predict`].
pub fn predict(posterior: &GpPosterior, u_star: &[f64]) -> Result<PredictiveDensity, GpError> {
    posterior.predict(u_star)
}
