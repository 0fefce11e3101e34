//! Method of Moving Asymptotes for
//!
//! ```text
//! minimize f(x)  subject to  g_i(x) ≤ 0,  x_min ≤ x ≤ x_max
//! ```
//!
//! Each update builds Svanberg's separable convex approximation around the
//! current asymptotes and solves it through its dual, which has one variable
//! per constraint. Artificial variables `y_i` with a large linear cost keep
//! the subproblem feasible; a positive `y_i` at the solution is reported as
//! [`MmaStep::infeasible`].

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, sqrt};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MmaError {
    #[error("non-finite {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("expected {expected} entries in {what}, found {found}")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid bounds at variable {0}: need x_min < x_max and x_min ≤ x ≤ x_max")]
    InvalidBounds(usize),
}

/// Box bounds of the design variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn uniform(n: usize, lower: f64, upper: f64) -> Self {
        Self {
            lower: vec![lower; n],
            upper: vec![upper; n],
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    fn range(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }
}

/// Algorithm constants. Apart from `min_spread` the defaults are the values
/// recommended with the method's 2007 description.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MmaSettings {
    /// Largest step per iteration as a fraction of the variable range.
    pub move_limit: f64,
    /// Initial distance of the asymptotes from `x`, fraction of the range.
    pub initial_spread: f64,
    /// Spread factor after an oscillating step.
    pub shrink: f64,
    /// Spread factor after two steps in the same direction.
    pub grow: f64,
    /// Spread clamp, fractions of the range. Near an interior optimum each
    /// step is a fixed fraction of the spread, so the lower clamp bounds the
    /// attainable accuracy.
    pub min_spread: f64,
    pub max_spread: f64,
    /// Linear and quadratic costs of the artificial variables.
    pub c: f64,
    pub d: f64,
}

impl Default for MmaSettings {
    fn default() -> Self {
        Self {
            move_limit: 0.2,
            initial_spread: 0.5,
            shrink: 0.7,
            grow: 1.2,
            min_spread: 1e-4,
            max_spread: 10.0,
            c: 1000.0,
            d: 1.0,
        }
    }
}

/// Asymptotes and the two previous iterates.
#[derive(Clone, Debug, PartialEq)]
pub struct MmaState {
    pub lower_asymptotes: Vec<f64>,
    pub upper_asymptotes: Vec<f64>,
    /// `x^{k-1}` and `x^{k-2}`.
    pub x_history: [Option<Vec<f64>>; 2],
    /// Number of updates performed so far.
    pub iteration: usize,
    pub settings: MmaSettings,
}

impl MmaState {
    pub fn new(n: usize) -> Self {
        Self::with_settings(n, MmaSettings::default())
    }

    pub fn with_settings(n: usize, settings: MmaSettings) -> Self {
        Self {
            lower_asymptotes: vec![0.0; n],
            upper_asymptotes: vec![0.0; n],
            x_history: [None, None],
            iteration: 0,
            settings,
        }
    }

    pub fn move_limit(&self) -> f64 {
        self.settings.move_limit
    }
}

/// Places the asymptotes for the coming subproblem around `x`.
///
/// Until two previous iterates exist the asymptotes sit at the initial
/// spread. Afterwards each spread is scaled by `shrink` when the last two
/// steps changed direction and by `grow` when they did not, then clamped.
pub fn asymptote_adapt(state: &mut MmaState, x: &[f64], bounds: &Bounds) {
    let s = state.settings;
    let n = x.len();
    state.lower_asymptotes.resize(n, 0.0);
    state.upper_asymptotes.resize(n, 0.0);
    match &state.x_history {
        [Some(x1), Some(x2)] => {
            for j in 0..n {
                let range = bounds.range(j);
                let trend = (x[j] - x1[j]) * (x1[j] - x2[j]);
                let factor = if trend < 0.0 {
                    s.shrink
                } else if trend > 0.0 {
                    s.grow
                } else {
                    1.0
                };
                let lo = x[j] - factor * (x1[j] - state.lower_asymptotes[j]);
                let hi = x[j] + factor * (state.upper_asymptotes[j] - x1[j]);
                state.lower_asymptotes[j] =
                    lo.clamp(x[j] - s.max_spread * range, x[j] - s.min_spread * range);
                state.upper_asymptotes[j] =
                    hi.clamp(x[j] + s.min_spread * range, x[j] + s.max_spread * range);
            }
        }
        _ => {
            for j in 0..n {
                let spread = s.initial_spread * bounds.range(j);
                state.lower_asymptotes[j] = x[j] - spread;
                state.upper_asymptotes[j] = x[j] + spread;
            }
        }
    }
}

/// Result of one MMA update.
#[derive(Clone, Debug, PartialEq)]
pub struct MmaStep {
    pub x: Vec<f64>,
    /// Dual variables of the subproblem constraints.
    pub multipliers: Vec<f64>,
    /// Artificial variables; nonzero entries mean the linearized constraint
    /// could not be met inside the move limits.
    pub slack: Vec<f64>,
    pub infeasible: bool,
    /// Projected dual gradient norm at the returned point.
    pub kkt_residual: f64,
}

fn check_finite(what: &'static str, v: &[f64]) -> Result<(), MmaError> {
    match v.iter().position(|a| !a.is_finite()) {
        Some(index) => Err(MmaError::NonFinite { what, index }),
        None => Ok(()),
    }
}

fn check_len(what: &'static str, v: usize, expected: usize) -> Result<(), MmaError> {
    if v != expected {
        return Err(MmaError::SizeMismatch {
            what,
            expected,
            found: v,
        });
    }
    Ok(())
}

/// One MMA iteration from `x` with objective value `f`, gradient `df`,
/// constraint values `g` and constraint gradients `dg` (one row per
/// constraint).
pub fn mma_update(
    x: &[f64],
    f: f64,
    df: &[f64],
    g: &[f64],
    dg: &[Vec<f64>],
    bounds: &Bounds,
    state: &mut MmaState,
) -> Result<MmaStep, MmaError> {
    let n = x.len();
    let m = g.len();
    check_len("objective gradient", df.len(), n)?;
    check_len("bounds", bounds.len(), n)?;
    check_len("constraint gradients", dg.len(), m)?;
    check_finite("objective", &[f])?;
    check_finite("objective gradient", df)?;
    check_finite("constraint values", g)?;
    for row in dg {
        check_len("constraint gradient", row.len(), n)?;
        check_finite("constraint gradient", row)?;
    }
    for j in 0..n {
        let (lo, hi) = (bounds.lower[j], bounds.upper[j]);
        if !(lo < hi) || !(x[j] >= lo && x[j] <= hi) {
            return Err(MmaError::InvalidBounds(j));
        }
    }

    state.iteration += 1;
    asymptote_adapt(state, x, bounds);
    let sub = Subproblem::build(x, df, g, dg, bounds, state);
    let (lambda, residual) = sub.solve_dual();
    let xn = sub.primal(&lambda);
    let slack: Vec<f64> = lambda.iter().map(|&l| sub.artificial(l)).collect();
    let infeasible = slack.iter().any(|&y| y > 1e-9);

    let [h1, _] = core::mem::take(&mut state.x_history);
    state.x_history = [Some(x.to_vec()), h1];

    Ok(MmaStep {
        x: xn,
        multipliers: lambda,
        slack,
        infeasible,
        kkt_residual: residual,
    })
}

/// The convex separable subproblem in dual form.
struct Subproblem {
    low: Vec<f64>,
    upp: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    p0: Vec<f64>,
    q0: Vec<f64>,
    /// Row-major `m × n`.
    p: Vec<f64>,
    q: Vec<f64>,
    b: Vec<f64>,
    n: usize,
    m: usize,
    c: f64,
    d: f64,
}

impl Subproblem {
    fn build(
        x: &[f64],
        df: &[f64],
        g: &[f64],
        dg: &[Vec<f64>],
        bounds: &Bounds,
        state: &MmaState,
    ) -> Self {
        const ALBEFA: f64 = 0.1;
        const RAA0: f64 = 1e-5;
        let n = x.len();
        let m = g.len();
        let s = state.settings;
        let low = state.lower_asymptotes.clone();
        let upp = state.upper_asymptotes.clone();
        let mut alpha = vec![0.0; n];
        let mut beta = vec![0.0; n];
        let mut p0 = vec![0.0; n];
        let mut q0 = vec![0.0; n];
        let mut p = vec![0.0; m * n];
        let mut q = vec![0.0; m * n];
        let mut b: Vec<f64> = g.iter().map(|v| -v).collect();
        for j in 0..n {
            let range = bounds.range(j);
            alpha[j] = bounds.lower[j]
                .max(low[j] + ALBEFA * (x[j] - low[j]))
                .max(x[j] - s.move_limit * range);
            beta[j] = bounds.upper[j]
                .min(upp[j] - ALBEFA * (upp[j] - x[j]))
                .min(x[j] + s.move_limit * range);
            let ux2 = (upp[j] - x[j]) * (upp[j] - x[j]);
            let xl2 = (x[j] - low[j]) * (x[j] - low[j]);
            let reg = RAA0 / range.max(1e-5);
            let split = |d: f64| {
                let (pos, neg) = (d.max(0.0), (-d).max(0.0));
                (
                    ux2 * (1.001 * pos + 0.001 * neg + reg),
                    xl2 * (0.001 * pos + 1.001 * neg + reg),
                )
            };
            (p0[j], q0[j]) = split(df[j]);
            for i in 0..m {
                let (pij, qij) = split(dg[i][j]);
                p[i * n + j] = pij;
                q[i * n + j] = qij;
                b[i] += pij / (upp[j] - x[j]) + qij / (x[j] - low[j]);
            }
        }
        Self {
            low,
            upp,
            alpha,
            beta,
            p0,
            q0,
            p,
            q,
            b,
            n,
            m,
            c: s.c,
            d: s.d,
        }
    }

    fn weights(&self, j: usize, lambda: &[f64]) -> (f64, f64) {
        let mut pj = self.p0[j];
        let mut qj = self.q0[j];
        for i in 0..self.m {
            pj += lambda[i] * self.p[i * self.n + j];
            qj += lambda[i] * self.q[i * self.n + j];
        }
        (pj, qj)
    }

    /// Minimizer of the Lagrangian over the box for fixed multipliers.
    fn primal(&self, lambda: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| {
                let (pj, qj) = self.weights(j, lambda);
                let (sp, sq) = (sqrt(pj), sqrt(qj));
                let x = (sp * self.low[j] + sq * self.upp[j]) / (sp + sq);
                x.clamp(self.alpha[j], self.beta[j])
            })
            .collect()
    }

    fn artificial(&self, lambda: f64) -> f64 {
        ((lambda - self.c) / self.d).max(0.0)
    }

    fn approx_constraints(&self, x: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        self.p[i * self.n + j] / (self.upp[j] - x[j])
                            + self.q[i * self.n + j] / (x[j] - self.low[j])
                    })
                    .sum()
            })
            .collect()
    }

    /// Dual objective, to be maximized over `λ ≥ 0`.
    fn dual_value(&self, lambda: &[f64]) -> f64 {
        let x = self.primal(lambda);
        let mut w = 0.0;
        for j in 0..self.n {
            let (pj, qj) = self.weights(j, lambda);
            w += pj / (self.upp[j] - x[j]) + qj / (x[j] - self.low[j]);
        }
        for i in 0..self.m {
            let y = self.artificial(lambda[i]);
            w += self.c * y + 0.5 * self.d * y * y - lambda[i] * (y + self.b[i]);
        }
        w
    }

    fn dual_gradient(&self, lambda: &[f64], x: &[f64]) -> Vec<f64> {
        let gt = self.approx_constraints(x);
        (0..self.m)
            .map(|i| gt[i] - self.b[i] - self.artificial(lambda[i]))
            .collect()
    }

    fn projected_norm(lambda: &[f64], grad: &[f64]) -> f64 {
        lambda
            .iter()
            .zip(grad)
            .map(|(&l, &g)| if l > 0.0 { abs(g) } else { g.max(0.0) })
            .fold(0.0, f64::max)
    }

    /// Negated dual Hessian (positive semidefinite), row-major `m × m`.
    fn dual_curvature(&self, lambda: &[f64], x: &[f64]) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        let mut h = vec![0.0; m * m];
        for j in 0..n {
            if x[j] <= self.alpha[j] || x[j] >= self.beta[j] {
                continue;
            }
            let (pj, qj) = self.weights(j, lambda);
            let ux = self.upp[j] - x[j];
            let xl = x[j] - self.low[j];
            let curv = 2.0 * pj / (ux * ux * ux) + 2.0 * qj / (xl * xl * xl);
            for a in 0..m {
                let ga = self.p[a * n + j] / (ux * ux) - self.q[a * n + j] / (xl * xl);
                for c in 0..m {
                    let gc = self.p[c * n + j] / (ux * ux) - self.q[c * n + j] / (xl * xl);
                    h[a * m + c] += ga * gc / curv;
                }
            }
        }
        for i in 0..m {
            if lambda[i] > self.c {
                h[i * m + i] += 1.0 / self.d;
            }
        }
        h
    }

    /// Bounded Newton ascent on the dual with a backtracking line search.
    fn solve_dual(&self) -> (Vec<f64>, f64) {
        let m = self.m;
        let mut lambda = vec![1.0; m];
        if m == 0 {
            return (lambda, 0.0);
        }
        let scale = 1.0 + self.b.iter().fold(0.0f64, |a, v| a.max(abs(*v)));
        let tol = 1e-12 * scale;
        let mut x = self.primal(&lambda);
        let mut grad = self.dual_gradient(&lambda, &x);
        let mut value = self.dual_value(&lambda);
        for _ in 0..200 {
            if Self::projected_norm(&lambda, &grad) < tol {
                break;
            }
            // Variables held at zero with the gradient pushing outward are
            // excluded from the Newton system.
            let free: Vec<usize> = (0..m)
                .filter(|&i| lambda[i] > 0.0 || grad[i] > 0.0)
                .collect();
            let h = self.dual_curvature(&lambda, &x);
            let k = free.len();
            let mut a = vec![0.0; k * k];
            let mut rhs = vec![0.0; k];
            let mut diag_max = 0.0f64;
            for (r, &i) in free.iter().enumerate() {
                diag_max = diag_max.max(h[i * m + i]);
                rhs[r] = grad[i];
                for (c, &l) in free.iter().enumerate() {
                    a[r * k + c] = h[i * m + l];
                }
            }
            // Where the dual is locally linear (every variable clipped and no
            // artificial curvature) Newton is undefined; climb along the
            // gradient with an expanding step instead.
            let linear = !(diag_max > 0.0);
            let step: Vec<f64> = if linear {
                grad.clone()
            } else {
                let ridge = 1e-10 * diag_max;
                for r in 0..k {
                    a[r * k + r] += ridge;
                }
                let dir = solve_dense(k, &mut a, &mut rhs);
                let mut step = vec![0.0; m];
                for (r, &i) in free.iter().enumerate() {
                    step[i] = if dir[r].is_finite() { dir[r] } else { grad[i] };
                }
                step
            };
            let base = lambda.clone();
            let trial_at = |t: f64| -> Vec<f64> {
                base.iter()
                    .zip(&step)
                    .map(|(l, s)| (l + t * s).max(0.0))
                    .collect()
            };
            let mut accepted = false;
            if linear {
                let mut t = 1.0;
                while t < 1e30 {
                    let trial = trial_at(t);
                    let tv = self.dual_value(&trial);
                    if tv > value {
                        lambda = trial;
                        value = tv;
                        accepted = true;
                        t *= 2.0;
                    } else {
                        break;
                    }
                }
            }
            let mut t = 1.0;
            for _ in 0..60 {
                if accepted {
                    break;
                }
                let trial = trial_at(t);
                let tv = self.dual_value(&trial);
                if tv >= value - 1e-15 * abs(value) {
                    lambda = trial;
                    value = tv;
                    accepted = true;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
            x = self.primal(&lambda);
            grad = self.dual_gradient(&lambda, &x);
        }
        let residual = Self::projected_norm(&lambda, &grad);
        (lambda, residual)
    }
}

/// Gaussian elimination with partial pivoting for the small dual system.
fn solve_dense(n: usize, a: &mut [f64], b: &mut [f64]) -> Vec<f64> {
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| abs(a[r * n + col]).total_cmp(&abs(a[s * n + col])))
            .unwrap_or(col);
        if pivot != col {
            for c in 0..n {
                a.swap(col * n + c, pivot * n + c);
            }
            b.swap(col, pivot);
        }
        let d = a[col * n + col];
        if d == 0.0 {
            continue;
        }
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r * n + c] * x[c];
        }
        let d = a[r * n + r];
        x[r] = if d == 0.0 { 0.0 } else { s / d };
    }
    x
}

/// Objective and constraint information at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub f: f64,
    pub df: Vec<f64>,
    pub g: Vec<f64>,
    pub dg: Vec<Vec<f64>>,
}

/// Outcome of [`minimize`].
#[derive(Clone, Debug, PartialEq)]
pub struct MmaRun {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Objective at every evaluated iterate, the start included.
    pub objective: Vec<f64>,
    pub converged: bool,
}

/// Runs MMA until the largest design change drops below `tolerance` or
/// `max_iterations` updates have been made.
pub fn minimize<F>(
    x0: &[f64],
    bounds: &Bounds,
    max_iterations: usize,
    tolerance: f64,
    mut evaluate: F,
) -> Result<MmaRun, MmaError>
where
    F: FnMut(&[f64]) -> Evaluation,
{
    let mut state = MmaState::new(x0.len());
    let mut x = x0.to_vec();
    let mut objective = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iterations {
        let e = evaluate(&x);
        objective.push(e.f);
        let step = mma_update(&x, e.f, &e.df, &e.g, &e.dg, bounds, &mut state)?;
        iterations += 1;
        let change = x
            .iter()
            .zip(&step.x)
            .fold(0.0f64, |a, (p, q)| a.max(abs(p - q)));
        x = step.x;
        if change < tolerance {
            converged = true;
            break;
        }
    }
    objective.push(evaluate(&x).f);
    Ok(MmaRun {
        x,
        iterations,
        objective,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(x: &[f64]) -> Evaluation {
        Evaluation {
            f: x.iter().map(|v| (v - 0.5) * (v - 0.5)).sum(),
            df: x.iter().map(|v| 2.0 * (v - 0.5)).collect(),
            g: vec![],
            dg: vec![],
        }
    }

    #[test]
    fn initial_spread_then_adaptation() {
        let bounds = Bounds::uniform(2, 0.0, 2.0);
        let mut st = MmaState::new(2);
        asymptote_adapt(&mut st, &[1.0, 1.0], &bounds);
        assert_eq!(st.lower_asymptotes, vec![0.0, 0.0]);
        assert_eq!(st.upper_asymptotes, vec![2.0, 2.0]);
        // One stored iterate is not enough to adapt.
        st.x_history = [Some(vec![1.0, 1.0]), None];
        asymptote_adapt(&mut st, &[1.2, 0.8], &bounds);
        assert!((st.lower_asymptotes[0] - 0.2).abs() < 1e-15);

        // First variable oscillates (+ then −), second moves monotonically.
        st.lower_asymptotes = vec![0.5, 0.5];
        st.upper_asymptotes = vec![1.5, 1.5];
        st.x_history = [Some(vec![1.1, 1.1]), Some(vec![1.0, 1.0])];
        asymptote_adapt(&mut st, &[1.05, 1.2], &bounds);
        assert!((st.lower_asymptotes[0] - (1.05 - 0.7 * 0.6)).abs() < 1e-12);
        assert!((st.upper_asymptotes[0] - (1.05 + 0.7 * 0.4)).abs() < 1e-12);
        assert!((st.lower_asymptotes[1] - (1.2 - 1.2 * 0.6)).abs() < 1e-12);
    }

    #[test]
    fn spread_is_clamped() {
        let bounds = Bounds::uniform(1, 0.0, 1.0);
        let mut st = MmaState::new(1);
        st.lower_asymptotes = vec![-9.0];
        st.upper_asymptotes = vec![10.0];
        st.x_history = [Some(vec![0.5]), Some(vec![0.4])];
        asymptote_adapt(&mut st, &[0.6], &bounds);
        assert!((st.lower_asymptotes[0] - (0.6 - 10.0)).abs() < 1e-12);
        assert!((st.upper_asymptotes[0] - (0.6 + 10.0)).abs() < 1e-12);

        st.lower_asymptotes = vec![0.59999];
        st.upper_asymptotes = vec![0.60001];
        st.x_history = [Some(vec![0.6]), Some(vec![0.7])];
        asymptote_adapt(&mut st, &[0.65], &bounds);
        assert!((st.lower_asymptotes[0] - (0.65 - 1e-4)).abs() < 1e-12);
        assert!((st.upper_asymptotes[0] - (0.65 + 1e-4)).abs() < 1e-12);
    }

    #[test]
    fn zero_gradient_leaves_design_unchanged() {
        let x = vec![0.3, 0.7, 0.5];
        let bounds = Bounds::uniform(3, 0.0, 1.0);
        let mut st = MmaState::new(3);
        let step = mma_update(
            &x,
            1.0,
            &[0.0; 3],
            &[-0.5],
            &[vec![0.0; 3]],
            &bounds,
            &mut st,
        )
        .unwrap();
        for (a, b) in x.iter().zip(&step.x) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(!step.infeasible);
    }

    #[test]
    fn iterates_stay_inside_asymptotes_and_bounds() {
        let bounds = Bounds::uniform(4, 0.0, 1.0);
        let mut st = MmaState::new(4);
        let mut x = vec![0.05, 0.95, 0.3, 0.0];
        for _ in 0..10 {
            let e = quadratic(&x);
            let step = mma_update(&x, e.f, &e.df, &e.g, &e.dg, &bounds, &mut st).unwrap();
            for j in 0..4 {
                assert!(st.lower_asymptotes[j] < step.x[j]);
                assert!(step.x[j] < st.upper_asymptotes[j]);
                assert!(step.x[j] >= 0.0 && step.x[j] <= 1.0);
                assert!((step.x[j] - x[j]).abs() <= 0.2 + 1e-12);
            }
            x = step.x;
        }
    }

    #[test]
    fn rejects_nan_gradient() {
        let bounds = Bounds::uniform(2, 0.0, 1.0);
        let mut st = MmaState::new(2);
        let r = mma_update(&[0.5, 0.5], 0.0, &[0.0, f64::NAN], &[], &[], &bounds, &mut st);
        assert!(matches!(
            r,
            Err(MmaError::NonFinite {
                what: "objective gradient",
                index: 1
            })
        ));
        assert_eq!(st.iteration, 0);
    }

    #[test]
    fn infeasible_linearization_is_flagged() {
        // g = 5 − Σx cannot reach zero within one move limit from x = 0.
        let bounds = Bounds::uniform(2, 0.0, 1.0);
        let mut st = MmaState::new(2);
        let step = mma_update(
            &[0.0, 0.0],
            0.0,
            &[1.0, 1.0],
            &[5.0],
            &[vec![-1.0, -1.0]],
            &bounds,
            &mut st,
        )
        .unwrap();
        assert!(step.infeasible);
        assert!(step.slack[0] > 0.0);
        // Closest point: both variables pushed to their move limit.
        for v in &step.x {
            assert!((v - 0.2).abs() < 1e-6, "{v}");
        }
    }

    #[test]
    fn dual_solution_satisfies_kkt() {
        let n = 6;
        let bounds = Bounds::uniform(n, 0.1, 1.0);
        let mut st = MmaState::new(n);
        let x = vec![0.9; n];
        let g = x.iter().map(|v| 1.0 / v).sum::<f64>() - n as f64 / 0.5;
        let dg = vec![x.iter().map(|v| -1.0 / (v * v)).collect::<Vec<_>>()];
        let step = mma_update(&x, 5.4, &[1.0; 6], &[g], &dg, &bounds, &mut st).unwrap();
        assert!(step.kkt_residual < 1e-8, "{}", step.kkt_residual);
    }
}
