//! MAP hyperparameter search by conjugate-gradient ascent in log space.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::covariance::{free_parameter_count, CovarianceWorkspace, Hyperparameters};
use super::covariance::{PARAM_CEILING, PARAM_FLOOR};
use super::likelihood::{evaluate, fisher_diagonal};
use super::GpError;
use crate::optimize::{maximize_preconditioned, CgConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct GpFitConfig {
    /// Perturbed restarts in addition to the default initialization.
    pub restarts: usize,
    /// Standard deviation of the log-normal restart perturbation.
    pub perturbation: f64,
    pub seed: u64,
    pub cg: CgConfig,
}

impl Default for GpFitConfig {
    fn default() -> Self {
        GpFitConfig { restarts: 3, perturbation: 0.5, seed: 0, cg: CgConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub hyperparameters: Hyperparameters,
    /// Log marginal likelihood plus log prior at the returned point.
    pub log_posterior: f64,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
}

/// Log density of the hyperparameter prior. The prior is uniform in log
/// coordinates (improper), so this is identically zero; complexity is
/// controlled by the family-score penalty instead.
pub fn log_prior(_theta: &Hyperparameters) -> f64 {
    0.0
}

fn bounds(n: usize) -> (Vec<f64>, Vec<f64>) {
    (vec![PARAM_FLOOR.ln(); n], vec![PARAM_CEILING.ln(); n])
}

/// Maximizes `log p(x | u, theta) + log P(theta)` over the log
/// hyperparameters, from the default initialization and `config.restarts`
/// perturbed copies of it. The best end point wins.
pub fn optimize_hyperparameters(
    targets: &DVector<f64>,
    inputs: &DMatrix<f64>,
    config: &GpFitConfig,
) -> Result<FitOutcome, GpError> {
    let m = inputs.nrows();
    if targets.len() != m {
        return Err(GpError::DimensionMismatch { expected: m, found: targets.len() });
    }
    if m < 2 {
        return Err(GpError::TooFewSamples { required: 2, found: m });
    }
    if targets.iter().chain(inputs.iter()).any(|v| !v.is_finite()) {
        return Err(GpError::NonFinite);
    }
    let dim = inputs.ncols();
    let n = free_parameter_count(dim);
    let ws = CovarianceWorkspace::new(inputs);
    let (lower, upper) = bounds(n);

    let base = Hyperparameters::initial(dim).to_log_params();
    let mut starts = vec![base.clone()];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise = Normal::new(0.0, config.perturbation).map_err(|_| GpError::InvalidConfig)?;
    for _ in 0..config.restarts {
        starts.push(base.iter().map(|v| v + noise.sample(&mut rng)).collect());
    }

    let objective = |p: &[f64]| {
        let theta = Hyperparameters::from_log_params(dim, p);
        let eval = evaluate(&ws, targets, &theta, true).ok()?;
        Some((eval.value + log_prior(&theta), eval.gradient?))
    };
    let curvature = |p: &[f64]| fisher_diagonal(&ws, &Hyperparameters::from_log_params(dim, p)).ok();

    let mut best: Option<FitOutcome> = None;
    for start in &starts {
        let Some(out) = maximize_preconditioned(objective, curvature, start, &lower, &upper, &config.cg) else {
            continue;
        };
        let better = best.as_ref().is_none_or(|b| out.value > b.log_posterior);
        if better {
            let theta = Hyperparameters::from_log_params(dim, &out.point);
            let gradient_norm = out.projected_gradient_norm(&lower, &upper);
            best = Some(FitOutcome {
                log_likelihood: out.value - log_prior(&theta),
                hyperparameters: theta,
                log_posterior: out.value,
                converged: out.converged,
                iterations: out.iterations,
                gradient_norm,
            });
        }
    }
    best.ok_or(GpError::OptimizationFailed { fallback: None })
}

/// Objective value at a given point, for comparisons against the optimizer.
pub fn log_posterior(
    targets: &DVector<f64>,
    inputs: &DMatrix<f64>,
    theta: &Hyperparameters,
) -> Result<f64, GpError> {
    Ok(super::likelihood::log_marginal_likelihood(targets, inputs, theta)? + log_prior(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn sample(m: usize, seed: u64, f: impl Fn(f64) -> f64) -> (DVector<f64>, DMatrix<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let u: Vec<f64> = (0..m).map(|_| normal.sample(&mut rng)).collect();
        let x: Vec<f64> = u.iter().map(|&v| f(v) + 0.1 * normal.sample(&mut rng)).collect();
        (DVector::from_vec(x), DMatrix::from_vec(m, 1, u))
    }

    #[test]
    fn improves_on_default_start() {
        let (x, u) = sample(40, 3, |v| v.sin());
        let out = optimize_hyperparameters(&x, &u, &GpFitConfig::default()).unwrap();
        let at_default = log_posterior(&x, &u, &Hyperparameters::initial(1)).unwrap();
        assert!(out.log_posterior >= at_default);
    }

    #[test]
    fn too_few_samples() {
        let r = optimize_hyperparameters(
            &DVector::from_vec(vec![1.0]),
            &DMatrix::from_vec(1, 1, vec![0.0]),
            &GpFitConfig::default(),
        );
        assert!(matches!(r, Err(GpError::TooFewSamples { .. })));
    }

    #[test]
    fn deterministic_given_seed() {
        let (x, u) = sample(30, 9, |v| v * v);
        let cfg = GpFitConfig { seed: 11, ..GpFitConfig::default() };
        let a = optimize_hyperparameters(&x, &u, &cfg).unwrap();
        let b = optimize_hyperparameters(&x, &u, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_parent_fit_recovers_unit_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..200).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let mean = x.iter().sum::<f64>() / 200.0;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 200.0;
        let x: Vec<f64> = x.iter().map(|v| (v - mean) / var.sqrt()).collect();
        let out = optimize_hyperparameters(
            &DVector::from_vec(x),
            &DMatrix::zeros(200, 0),
            &GpFitConfig::default(),
        )
        .unwrap();
        assert!((out.hyperparameters.noise - 1.0).abs() < 0.05, "{:?}", out.hyperparameters);
    }
}
