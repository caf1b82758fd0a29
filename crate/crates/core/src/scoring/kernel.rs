use std::f64::consts::PI;

use crate::data::Dataset;

use super::{check_family, require_continuous, FamilyKey, FamilyScore, Fitted, ScoreConfig, ScoreError, Scorer, ScorerId};

/// Bandwidth search: a log-spaced grid, then golden-section refinement
/// around the best grid point. Bandwidths below `floor` are raised to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub grid_points: usize,
    pub grid_min: f64,
    pub grid_max: f64,
    pub floor: f64,
    pub refine_iterations: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { grid_points: 25, grid_min: 0.01, grid_max: 10.0, floor: 0.05, refine_iterations: 40 }
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|a| (a - max).exp()).sum::<f64>().ln()
}

/// `log P(x | u)` under the Gaussian-kernel estimate built from `points`,
/// i.e. `log [P(x, u) / P(u)]` with one bandwidth for every coordinate.
fn log_conditional_over<'a>(points: impl Iterator<Item = (f64, &'a [f64])>, x: f64, u: &[f64], sigma: f64) -> f64 {
    let scale = -0.5 / (sigma * sigma);
    let mut joint = Vec::new();
    let mut marginal = Vec::new();
    for (xj, uj) in points {
        let b = scale * u.iter().zip(uj).map(|(a, c)| (a - c) * (a - c)).sum::<f64>();
        let a = scale * (x - xj) * (x - xj);
        joint.push(a + b);
        marginal.push(b);
    }
    log_sum_exp(&joint) - log_sum_exp(&marginal) - 0.5 * (2.0 * PI * sigma * sigma).ln()
}

/// Kernel conditional density estimator over stored samples.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEstimator {
    xs: Vec<f64>,
    /// Row-major parent values, `dim` per sample.
    us: Vec<f64>,
    dim: usize,
    bandwidth: f64,
}

impl KernelEstimator {
    pub fn new(xs: Vec<f64>, us: Vec<f64>, dim: usize, bandwidth: f64) -> Self {
        assert_eq!(us.len(), xs.len() * dim, "parent values must be {} per sample", dim);
        KernelEstimator { xs, us, dim, bandwidth }
    }

    pub fn from_rows(data: &Dataset, key: &FamilyKey, rows: &[usize], bandwidth: f64) -> Self {
        let xs = rows.iter().map(|&r| data.value(r, key.child)).collect();
        let us = rows.iter().flat_map(|&r| key.parents.iter().map(move |&p| data.value(r, p))).collect();
        KernelEstimator::new(xs, us, key.parents.len(), bandwidth)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    fn point(&self, j: usize) -> (f64, &[f64]) {
        (self.xs[j], &self.us[j * self.dim..(j + 1) * self.dim])
    }

    pub fn log_conditional(&self, x: f64, u: &[f64]) -> f64 {
        log_conditional_over((0..self.len()).map(|j| self.point(j)), x, u, self.bandwidth)
    }

    /// Leave-one-out objective `sum_m log P_{-m}(x_m | u_m)` at `sigma`.
    pub fn loo(&self, sigma: f64) -> f64 {
        (0..self.len())
            .map(|m| {
                let (x, u) = self.point(m);
                log_conditional_over((0..self.len()).filter(|&j| j != m).map(|j| self.point(j)), x, u, sigma)
            })
            .sum()
    }
}

/// Leave-one-out objective of the family on `rows` at bandwidth `sigma`.
pub fn loo_objective(key: &FamilyKey, data: &Dataset, rows: &[usize], sigma: f64) -> f64 {
    KernelEstimator::from_rows(data, key, rows, sigma).loo(sigma)
}

/// Returns the bandwidth maximizing the LOO objective and the objective
/// there.
fn select_bandwidth(est: &KernelEstimator, cfg: &KernelConfig) -> (f64, f64) {
    let n = cfg.grid_points.max(2);
    let ratio = (cfg.grid_max / cfg.grid_min).ln() / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| (cfg.grid_min.ln() + ratio * i as f64).exp().max(cfg.floor)).collect();
    let values: Vec<f64> = grid.iter().map(|&s| est.loo(s)).collect();
    let mut best = 0;
    for i in 1..n {
        if values[i] > values[best] {
            best = i;
        }
    }
    let mut best_sigma = grid[best];
    let mut best_value = values[best];

    let lo = grid[best.saturating_sub(1)].max(cfg.floor).ln();
    let hi = grid[(best + 1).min(n - 1)].max(cfg.floor).ln();
    if hi > lo {
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let mut fc = est.loo(c.exp());
        let mut fd = est.loo(d.exp());
        for _ in 0..cfg.refine_iterations {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = est.loo(c.exp());
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = est.loo(d.exp());
            }
        }
        for (s, v) in [(c, fc), (d, fd)] {
            if v > best_value {
                best_value = v;
                best_sigma = s.exp();
            }
        }
    }
    (best_sigma, best_value)
}

/// Kernel baseline: the family score is the leave-one-out conditional
/// log-likelihood at the selected bandwidth.
#[derive(Debug, Clone, Default)]
pub struct KernelScorer {
    config: ScoreConfig,
}

impl KernelScorer {
    pub fn new(config: ScoreConfig) -> Self {
        KernelScorer { config }
    }
}

impl Scorer for KernelScorer {
    fn id(&self) -> ScorerId {
        ScorerId::Kernel
    }

    fn score_rows(&self, key: &FamilyKey, data: &Dataset, rows: &[usize]) -> Result<FamilyScore, ScoreError> {
        check_family(key, data)?;
        require_continuous(data, std::iter::once(key.child).chain(key.parents.iter().copied()))?;
        let required = self.config.min_samples.max(3);
        if rows.len() < required {
            return Err(ScoreError::TooFewSamples { family: key.clone(), required, found: rows.len() });
        }
        let first = rows[0];
        let vars: Vec<usize> = std::iter::once(key.child).chain(key.parents.iter().copied()).collect();
        if rows.iter().all(|&r| vars.iter().all(|&v| data.value(r, v) == data.value(first, v))) {
            return Err(ScoreError::Degenerate(format!("all samples of family {key} are identical")));
        }
        let est = KernelEstimator::from_rows(data, key, rows, self.config.kernel.floor);
        let (bandwidth, log_score) = select_bandwidth(&est, &self.config.kernel);
        if !log_score.is_finite() {
            return Err(ScoreError::NonFinite(key.clone()));
        }
        Ok(FamilyScore {
            key: key.clone(),
            log_score,
            fitted: Fitted::Kernel { bandwidth },
            penalty_applied: 0.0,
            scorer_id: ScorerId::Kernel,
        })
    }
}

pub fn kernel_family_score(key: &FamilyKey, data: &Dataset, config: &ScoreConfig) -> Result<FamilyScore, ScoreError> {
    KernelScorer::new(config.clone()).score_family(key, data)
}
