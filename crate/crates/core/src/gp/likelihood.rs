//! Log marginal likelihood of a zero-mean GP and its gradient in log
//! hyperparameter coordinates.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::covariance::{CovarianceWorkspace, Hyperparameters};
use super::GpError;

const JITTER_START: f64 = 1e-8;
const JITTER_MAX: f64 = 1e-4;

/// A Cholesky factor together with the diagonal jitter that was needed to
/// obtain it (zero when the matrix factorized as given).
#[derive(Debug, Clone)]
pub struct Factorization {
    pub chol: Cholesky<f64, Dyn>,
    pub jitter: f64,
}

impl Factorization {
    pub fn log_determinant(&self) -> f64 {
        2.0 * self.chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }
}

/// Factorizes a covariance matrix. The matrix is tried as is; on failure a
/// diagonal jitter of `1e-8 * mean(diag)` is added and grown tenfold up to
/// `1e-4 * mean(diag)`.
pub fn factorize(c: DMatrix<f64>) -> Result<Factorization, GpError> {
    let m = c.nrows();
    if c.iter().any(|v| !v.is_finite()) {
        return Err(GpError::NonFinite);
    }
    if let Some(chol) = Cholesky::new(c.clone()) {
        return Ok(Factorization { chol, jitter: 0.0 });
    }
    let mean_diag = c.diagonal().mean().abs().max(f64::MIN_POSITIVE);
    let mut rel = JITTER_START;
    while rel <= JITTER_MAX * (1.0 + 1e-9) {
        let jitter = rel * mean_diag;
        let mut jittered = c.clone();
        for i in 0..m {
            jittered[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(jittered) {
            return Ok(Factorization { chol, jitter });
        }
        rel *= 10.0;
    }
    Err(GpError::SingularCovariance { size: m })
}

pub(crate) struct Evaluation {
    pub value: f64,
    pub gradient: Option<Vec<f64>>,
}

fn check_finite(targets: &DVector<f64>) -> Result<(), GpError> {
    if targets.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(GpError::NonFinite)
    }
}

fn frobenius_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Evaluates the log marginal likelihood (and optionally its gradient with
/// respect to the log-space parameters) on a prepared workspace.
pub(crate) fn evaluate(
    ws: &CovarianceWorkspace,
    targets: &DVector<f64>,
    theta: &Hyperparameters,
    with_gradient: bool,
) -> Result<Evaluation, GpError> {
    let m = ws.size();
    if m == 0 {
        return Err(GpError::Empty);
    }
    if targets.len() != m {
        return Err(GpError::DimensionMismatch { expected: m, found: targets.len() });
    }
    if theta.dim() != ws.dim() {
        return Err(GpError::DimensionMismatch { expected: ws.dim(), found: theta.dim() });
    }
    let se = ws.se_factor(&theta.lengthscales);
    let fact = factorize(ws.assemble(theta, &se))?;
    let alpha = fact.chol.solve(targets);
    let value = -0.5 * m as f64 * (2.0 * PI).ln()
        - 0.5 * fact.log_determinant()
        - 0.5 * targets.dot(&alpha);
    if !value.is_finite() {
        return Err(GpError::NonFinite);
    }
    if !with_gradient {
        return Ok(Evaluation { value, gradient: None });
    }

    // dL/dp = 1/2 tr((a a^T - C^-1) dC/dp)
    let mut w = fact.chol.inverse();
    w.neg_mut();
    w.ger(1.0, &alpha, &alpha, 1.0);

    let dim = ws.dim();
    let mut grad = Vec::with_capacity(theta.free_parameter_count());
    let w_se = w.component_mul(&se);
    grad.push(0.5 * theta.amplitude * w_se.sum());
    grad.push(0.5 * theta.offset * w.sum());
    if dim > 0 {
        grad.push(0.5 * theta.linear * frobenius_dot(&w, ws.gram()));
    }
    grad.push(0.5 * theta.noise * w.trace());
    for (d, l) in theta.lengthscales.iter().enumerate() {
        grad.push(0.5 * theta.amplitude * frobenius_dot(&w_se, ws.sq_diff(d)) / (l * l));
    }
    Ok(Evaluation { value, gradient: Some(grad) })
}

/// `1/2 tr(A A)` with `A = C^-1 dC`.
fn half_trace_square(c_inv: &DMatrix<f64>, dc: &DMatrix<f64>) -> f64 {
    let a = c_inv * dc;
    let m = a.nrows();
    let mut t = 0.0;
    for i in 0..m {
        for j in 0..m {
            t += a[(i, j)] * a[(j, i)];
        }
    }
    0.5 * t
}

/// Diagonal of the expected Fisher information in log-parameter coordinates,
/// `1/2 tr(C^-1 dC/dp C^-1 dC/dp)`. Used to precondition the ascent.
pub(crate) fn fisher_diagonal(ws: &CovarianceWorkspace, theta: &Hyperparameters) -> Result<Vec<f64>, GpError> {
    let se = ws.se_factor(&theta.lengthscales);
    let fact = factorize(ws.assemble(theta, &se))?;
    let c_inv = fact.chol.inverse();
    let mut out = Vec::with_capacity(theta.free_parameter_count());
    let amp_se = &se * theta.amplitude;
    out.push(half_trace_square(&c_inv, &amp_se));
    let s = c_inv.sum();
    out.push(0.5 * (theta.offset * s).powi(2));
    if ws.dim() > 0 {
        out.push(half_trace_square(&c_inv, &(ws.gram() * theta.linear)));
    }
    out.push(0.5 * theta.noise * theta.noise * c_inv.norm_squared());
    for (d, l) in theta.lengthscales.iter().enumerate() {
        let dc = amp_se.component_mul(ws.sq_diff(d)) / (l * l);
        out.push(half_trace_square(&c_inv, &dc));
    }
    Ok(out)
}

/// `-(M/2) ln 2pi - 1/2 ln|C| - 1/2 x^T C^-1 x` under a zero mean function.
pub fn log_marginal_likelihood(
    targets: &DVector<f64>,
    inputs: &DMatrix<f64>,
    theta: &Hyperparameters,
) -> Result<f64, GpError> {
    check_finite(targets)?;
    if inputs.iter().any(|v| !v.is_finite()) {
        return Err(GpError::NonFinite);
    }
    theta.validate()?;
    let ws = CovarianceWorkspace::new(inputs);
    Ok(evaluate(&ws, targets, theta, false)?.value)
}

/// Analytic gradient of the log marginal likelihood with respect to the
/// logarithm of each free hyperparameter, ordered as in
/// [`Hyperparameters::to_log_params`].
pub fn log_marginal_likelihood_gradient(
    targets: &DVector<f64>,
    inputs: &DMatrix<f64>,
    theta: &Hyperparameters,
) -> Result<Vec<f64>, GpError> {
    check_finite(targets)?;
    if inputs.iter().any(|v| !v.is_finite()) {
        return Err(GpError::NonFinite);
    }
    theta.validate()?;
    let ws = CovarianceWorkspace::new(inputs);
    Ok(evaluate(&ws, targets, theta, true)?.gradient.expect("gradient requested"))
}
