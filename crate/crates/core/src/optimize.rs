//! Box-constrained nonlinear conjugate-gradient ascent.
//!
//! Polak-Ribiere+ directions, optionally diagonally preconditioned, with a
//! strong-Wolfe line search (bracketing and zoom, safeguarded quadratic
//! interpolation). Coordinates sitting on a bound
//! with the gradient pointing outward are held fixed; steps are truncated at
//! the first bound they would cross.

/// Stopping and line-search parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CgConfig {
    pub max_iterations: usize,
    /// Converged once an accepted step improves the objective by less than
    /// this fraction while the projected gradient norm is below
    /// `gradient_tolerance`.
    pub relative_tolerance: f64,
    pub gradient_tolerance: f64,
    /// Sufficient-increase constant of the Wolfe conditions.
    pub armijo: f64,
    /// Curvature constant of the strong Wolfe conditions.
    pub curvature: f64,
    pub max_line_search: usize,
}

impl Default for CgConfig {
    fn default() -> Self {
        CgConfig {
            max_iterations: 100,
            relative_tolerance: 1e-6,
            gradient_tolerance: 1e-4,
            armijo: 1e-4,
            curvature: 0.1,
            max_line_search: 25,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

impl CgOutcome {
    /// Euclidean norm of the gradient projected onto the feasible box.
    pub fn projected_gradient_norm(&self, lower: &[f64], upper: &[f64]) -> f64 {
        norm(&projected(&self.point, &self.gradient, lower, upper))
    }
}

fn projected(x: &[f64], g: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(g)
        .zip(lower.iter().zip(upper))
        .map(|((&xi, &gi), (&lo, &hi))| {
            if (xi <= lo && gi < 0.0) || (xi >= hi && gi > 0.0) {
                0.0
            } else {
                gi
            }
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Largest step along `dir` that stays inside the box.
fn max_feasible_step(x: &[f64], dir: &[f64], lower: &[f64], upper: &[f64]) -> f64 {
    let mut t = f64::INFINITY;
    for i in 0..x.len() {
        if dir[i] > 0.0 {
            t = t.min((upper[i] - x[i]) / dir[i]);
        } else if dir[i] < 0.0 {
            t = t.min((lower[i] - x[i]) / dir[i]);
        }
    }
    t.max(0.0)
}

struct Trial {
    step: f64,
    point: Vec<f64>,
    value: f64,
    gradient: Vec<f64>,
    slope: f64,
}

struct LineSearch<'a, F> {
    objective: &'a mut F,
    x: &'a [f64],
    dir: &'a [f64],
    lower: &'a [f64],
    upper: &'a [f64],
    f0: f64,
    slope0: f64,
    config: &'a CgConfig,
    evaluations: usize,
}

impl<F> LineSearch<'_, F>
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    fn eval(&mut self, step: f64) -> Option<Trial> {
        self.evaluations += 1;
        let point: Vec<f64> = self
            .x
            .iter()
            .zip(self.dir)
            .zip(self.lower.iter().zip(self.upper))
            .map(|((xi, di), (lo, hi))| (xi + step * di).clamp(*lo, *hi))
            .collect();
        let (value, gradient) = (self.objective)(&point)?;
        if !value.is_finite() || gradient.iter().any(|g| !g.is_finite()) {
            return None;
        }
        let slope = dot(&gradient, self.dir);
        Some(Trial { step, point, value, gradient, slope })
    }

    fn sufficient(&self, t: &Trial) -> bool {
        t.value >= self.f0 + self.config.armijo * t.step * self.slope0
    }

    fn curvature_ok(&self, t: &Trial) -> bool {
        t.slope.abs() <= self.config.curvature * self.slope0
    }

    /// Strong-Wolfe search for an ascent step in `(0, step_max]`.
    fn run(&mut self, initial: f64, step_max: f64) -> Option<Trial> {
        let mut lo: Option<Trial> = None;
        let mut step = initial.min(step_max);
        for _ in 0..self.config.max_line_search {
            let Some(trial) = self.eval(step) else {
                return self.zoom(lo, step, None);
            };
            let lo_value = lo.as_ref().map_or(self.f0, |t| t.value);
            if !self.sufficient(&trial) || (lo.is_some() && trial.value <= lo_value) {
                return self.zoom(lo, trial.step, Some(trial.value));
            }
            if self.curvature_ok(&trial) {
                return Some(trial);
            }
            if trial.slope <= 0.0 {
                // overshot the maximum along the line
                let hi_step = lo.as_ref().map_or(0.0, |t| t.step);
                return self.zoom(Some(trial), hi_step, Some(lo_value));
            }
            if step >= step_max {
                return Some(trial);
            }
            step = (2.0 * step).min(step_max);
            lo = Some(trial);
        }
        lo
    }

    /// Narrows a bracket whose `lo` end satisfies sufficient increase.
    fn zoom(&mut self, mut lo: Option<Trial>, mut hi_step: f64, mut hi_value: Option<f64>) -> Option<Trial> {
        for _ in 0..self.config.max_line_search {
            let (lo_step, lo_value, lo_slope) =
                lo.as_ref().map_or((0.0, self.f0, self.slope0), |t| (t.step, t.value, t.slope));
            let width = hi_step - lo_step;
            if width.abs() <= 1e-12 * lo_step.abs().max(hi_step.abs()) {
                break;
            }
            // maximizer of the quadratic through (lo, lo_value, lo_slope) and (hi, hi_value)
            let mut step = lo_step + 0.5 * width;
            if let Some(hv) = hi_value {
                let curv = hv - lo_value - lo_slope * width;
                if curv < 0.0 {
                    step = lo_step - lo_slope * width * width / (2.0 * curv);
                }
            }
            let a = lo_step.min(hi_step);
            let b = lo_step.max(hi_step);
            step = step.clamp(a + 0.1 * (b - a), b - 0.1 * (b - a));

            let Some(trial) = self.eval(step) else {
                hi_step = step;
                hi_value = None;
                continue;
            };
            if !self.sufficient(&trial) || trial.value <= lo_value {
                hi_step = trial.step;
                hi_value = Some(trial.value);
            } else {
                if self.curvature_ok(&trial) {
                    return Some(trial);
                }
                if trial.slope * (hi_step - trial.step) < 0.0 {
                    hi_step = lo_step;
                    hi_value = Some(lo_value);
                }
                lo = Some(trial);
            }
        }
        lo
    }
}

/// Maximizes `objective` (value and gradient) over a box, starting from
/// `start`. Points where the objective returns `None` are treated as
/// infeasible. Returns `None` only if the start cannot be evaluated.
pub fn maximize<F>(objective: F, start: &[f64], lower: &[f64], upper: &[f64], config: &CgConfig) -> Option<CgOutcome>
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    maximize_preconditioned(objective, |_: &[f64]| None, start, lower, upper, config)
}

/// As [`maximize`], with a diagonal preconditioner: `curvature(x)` returns
/// positive per-coordinate curvature estimates at an accepted point, and the
/// gradient is divided by them before forming search directions. `None`
/// falls back to the identity.
pub fn maximize_preconditioned<F, P>(
    mut objective: F,
    mut curvature: P,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    config: &CgConfig,
) -> Option<CgOutcome>
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
    P: FnMut(&[f64]) -> Option<Vec<f64>>,
{
    let n = start.len();
    let mut x: Vec<f64> =
        start.iter().zip(lower.iter().zip(upper)).map(|(v, (lo, hi))| v.clamp(*lo, *hi)).collect();
    let (mut f, mut g) = objective(&x)?;
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut precondition = |x: &[f64], pg: &[f64]| -> Vec<f64> {
        match curvature(x) {
            Some(h) if h.len() == n && h.iter().all(|v| v.is_finite()) => {
                let top = h.iter().fold(0.0f64, |a, v| a.max(*v));
                let floor = (1e-10 * top).max(1e-300);
                pg.iter().zip(&h).map(|(p, hi)| p / hi.max(floor)).collect()
            }
            _ => pg.to_vec(),
        }
    };
    let mut evaluations = 1;
    let mut pg = projected(&x, &g, lower, upper);
    let mut z = precondition(&x, &pg);
    let mut dir = z.clone();
    let mut since_restart = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        if norm(&pg) < config.gradient_tolerance * 1e-2 {
            converged = true;
            break;
        }
        iterations += 1;

        for i in 0..n {
            if pg[i] == 0.0 {
                dir[i] = 0.0;
            }
        }
        let mut slope = dot(&pg, &dir);
        if slope <= 0.0 {
            dir = z.clone();
            slope = dot(&pg, &dir);
            since_restart = 0;
        }
        let step_max = max_feasible_step(&x, &dir, lower, upper);
        // unit step, but no more than a few log units in any coordinate
        let dir_inf = dir.iter().fold(0.0f64, |a, d| a.max(d.abs()));
        let initial = (4.0 / dir_inf).min(1.0).min(step_max);

        let mut search = LineSearch {
            objective: &mut objective,
            x: &x,
            dir: &dir,
            lower,
            upper,
            f0: f,
            slope0: slope,
            config,
            evaluations: 0,
        };
        let found = if initial > 0.0 { search.run(initial, step_max) } else { None };
        evaluations += search.evaluations;

        let Some(trial) = found else {
            if since_restart == 0 {
                // no progress along the preconditioned gradient: numerically stationary
                converged = true;
                break;
            }
            dir = z.clone();
            since_restart = 0;
            continue;
        };

        let improvement = (trial.value - f) / f.abs().max(1.0);
        x = trial.point;
        f = trial.value;
        g = trial.gradient;
        let new_pg = projected(&x, &g, lower, upper);
        if improvement < config.relative_tolerance && norm(&new_pg) < config.gradient_tolerance {
            pg = new_pg;
            converged = true;
            break;
        }
        let new_z = precondition(&x, &new_pg);

        since_restart += 1;
        let active_changed = (0..n).any(|i| (new_pg[i] == 0.0) != (pg[i] == 0.0));
        let powell = dot(&new_z, &pg).abs() >= 0.2 * dot(&new_z, &new_pg);
        if active_changed || powell || since_restart >= n {
            dir = new_z.clone();
            since_restart = 0;
        } else {
            let diff: Vec<f64> = new_pg.iter().zip(&pg).map(|(a, b)| a - b).collect();
            let beta = (dot(&new_z, &diff) / dot(&z, &pg).max(f64::MIN_POSITIVE)).max(0.0);
            dir = new_z.iter().zip(&dir).map(|(p, d)| p + beta * d).collect();
        }
        pg = new_pg;
        z = new_z;
    }
    if !converged && norm(&pg) < config.gradient_tolerance * 1e-2 {
        converged = true;
    }
    Some(CgOutcome { point: x, value: f, gradient: g, iterations, evaluations, converged })
}
