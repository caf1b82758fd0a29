use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::data::Dataset;

use super::{check_family, require_continuous, FamilyKey, FamilyScore, Fitted, ScoreConfig, ScoreError, Scorer, ScorerId};

/// Normal-inverse-gamma prior for `x = a0 + sum_i a_i u_i + e`:
/// `a | s2 ~ N(0, s2 / g I)`, `s2 ~ InvGamma(a0, b0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPrior {
    pub g: f64,
    pub a0: f64,
    pub b0: f64,
}

impl Default for LinearPrior {
    fn default() -> Self {
        LinearPrior { g: 0.1, a0: 1.0, b0: 1.0 }
    }
}

/// Posterior of the regression: coefficients (intercept first) with
/// unscaled covariance `Lambda_n^-1`, and the inverse-gamma shape and scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearPosterior {
    pub coefficients: Vec<f64>,
    #[serde(skip)]
    pub covariance: DMatrix<f64>,
    pub shape: f64,
    pub scale: f64,
}

impl LinearPosterior {
    /// Student-t log predictive density of `x` at parent values `u`.
    pub fn log_predictive(&self, u: &[f64], x: f64) -> f64 {
        let mut z = Vec::with_capacity(u.len() + 1);
        z.push(1.0);
        z.extend_from_slice(u);
        let z = DVector::from_vec(z);
        let loc = z.dot(&DVector::from_column_slice(&self.coefficients));
        let scale2 = self.scale / self.shape * (1.0 + (z.transpose() * &self.covariance * &z)[(0, 0)]);
        let nu = 2.0 * self.shape;
        let t = (x - loc) * (x - loc) / (nu * scale2);
        ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * PI * scale2).ln() - 0.5 * (nu + 1.0) * t.ln_1p()
    }
}

fn design(data: &Dataset, parents: &[usize], rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), parents.len() + 1, |i, d| if d == 0 { 1.0 } else { data.value(rows[i], parents[d - 1]) })
}

/// Closed-form log evidence and posterior of the conjugate regression.
pub(crate) fn fit(x: &DVector<f64>, z: &DMatrix<f64>, prior: &LinearPrior) -> Option<(f64, LinearPosterior)> {
    let m = x.len() as f64;
    let p = z.ncols();
    let mut precision = z.transpose() * z;
    for i in 0..p {
        precision[(i, i)] += prior.g;
    }
    let chol = precision.clone().cholesky()?;
    let mean = chol.solve(&(z.transpose() * x));
    let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let shape = prior.a0 + 0.5 * m;
    let scale = prior.b0 + 0.5 * (x.dot(x) - mean.dot(&(&precision * &mean)));
    if !(scale > 0.0) {
        return None;
    }
    let evidence = -0.5 * m * (2.0 * PI).ln() + 0.5 * (p as f64 * prior.g.ln() - log_det) + prior.a0 * prior.b0.ln()
        - shape * scale.ln()
        + ln_gamma(shape)
        - ln_gamma(prior.a0);
    let posterior = LinearPosterior { coefficients: mean.iter().copied().collect(), covariance: chol.inverse(), shape, scale };
    Some((evidence, posterior))
}

/// Bayesian linear regression score with the marginalization done exactly;
/// no penalty term.
#[derive(Debug, Clone, Default)]
pub struct LinearGaussianScorer {
    config: ScoreConfig,
}

impl LinearGaussianScorer {
    pub fn new(config: ScoreConfig) -> Self {
        LinearGaussianScorer { config }
    }
}

impl Scorer for LinearGaussianScorer {
    fn id(&self) -> ScorerId {
        ScorerId::LinearGaussian
    }

    fn score_rows(&self, key: &FamilyKey, data: &Dataset, rows: &[usize]) -> Result<FamilyScore, ScoreError> {
        check_family(key, data)?;
        require_continuous(data, std::iter::once(key.child).chain(key.parents.iter().copied()))?;
        let required = key.parents.len() + 2;
        if rows.len() < required {
            return Err(ScoreError::TooFewSamples { family: key.clone(), required, found: rows.len() });
        }
        let x = data.targets(key.child, rows);
        let z = design(data, &key.parents, rows);
        let (log_score, posterior) = fit(&x, &z, &self.config.linear).ok_or_else(|| ScoreError::NonFinite(key.clone()))?;
        if !log_score.is_finite() {
            return Err(ScoreError::NonFinite(key.clone()));
        }
        Ok(FamilyScore {
            key: key.clone(),
            log_score,
            fitted: Fitted::LinearGaussian(posterior),
            penalty_applied: 0.0,
            scorer_id: ScorerId::LinearGaussian,
        })
    }
}

pub fn linear_gaussian_family_score(
    key: &FamilyKey,
    data: &Dataset,
    config: &ScoreConfig,
) -> Result<FamilyScore, ScoreError> {
    LinearGaussianScorer::new(config.clone()).score_family(key, data)
}
