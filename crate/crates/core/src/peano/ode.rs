//! The decoupled scalar problem `u' = lambda (sqrt|u| + gamma)`, `u(t0) = y0`.
//!
//! Each coordinate of a solution of `u' = L(a)(u)` inside block `m` must
//! solve this problem with `lambda = a_m` and `gamma = 1/(n+1)`. The RK4
//! integrator is checked against the closed-form inverse `t(u)`.

use crate::error::{require_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarCauchyProblem {
    pub lambda: f64,
    pub gamma: f64,
    pub t0: f64,
    pub y0: f64,
}

impl ScalarCauchyProblem {
    pub fn new(lambda: f64, gamma: f64, t0: f64, y0: f64) -> Result<Self> {
        require_positive("gamma", gamma)?;
        for (name, v) in [("lambda", lambda), ("t0", t0), ("y0", y0)] {
            if !v.is_finite() {
                return Err(Error::domain(name, v, "must be finite"));
            }
        }
        Ok(ScalarCauchyProblem { lambda, gamma, t0, y0 })
    }

    #[inline]
    pub fn rhs(&self, u: f64) -> f64 {
        self.lambda * (u.abs().sqrt() + self.gamma)
    }

    /// The problem solved by `v(s) = u(-s)`: `v' = -lambda (sqrt|v| + gamma)`,
    /// `v(-t0) = y0`.
    pub fn time_reversed(&self) -> Self {
        ScalarCauchyProblem {
            lambda: -self.lambda,
            t0: -self.t0,
            ..*self
        }
    }

    /// `(|lambda| |t - t0| / 2 - sqrt|y0|)_+^2`, a lower bound for `|u(t)|`
    /// whenever `t` lies on the side of `t0` the field pushes towards
    /// (`t > t0` for `lambda > 0`).
    pub fn lower_bound(&self, t: f64) -> f64 {
        let reach = 0.5 * self.lambda.abs() * (t - self.t0).abs() - self.y0.abs().sqrt();
        let reach = reach.max(0.0);
        reach * reach
    }
}

#[inline]
pub fn rk4_step(problem: &ScalarCauchyProblem, u: f64, h: f64) -> f64 {
    let k1 = problem.rhs(u);
    let k2 = problem.rhs(u + 0.5 * h * k1);
    let k3 = problem.rhs(u + 0.5 * h * k2);
    let k4 = problem.rhs(u + h * k3);
    u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Substeps per refinement level and the number of levels used near `u = 0`.
const KINK_SPLIT: u32 = 8;
pub const KINK_REFINEMENT_DEPTH: u32 = 3;

/// One RK4 step of size `h`, subdivided when the step would move `u` by more
/// than a quarter of its distance to the kink of `sqrt|u|` at zero. Away
/// from zero this is a single plain step.
pub fn refined_step(problem: &ScalarCauchyProblem, u: f64, h: f64, depth: u32) -> f64 {
    if depth == 0 || u.abs() > 4.0 * (h * problem.rhs(u)).abs() {
        return rk4_step(problem, u, h);
    }
    let sub = h / f64::from(KINK_SPLIT);
    (0..KINK_SPLIT).fold(u, |v, _| refined_step(problem, v, sub, depth - 1))
}

/// Sampled solution; `times[k] = t0 + k * h` except the last entry, which is
/// exactly the requested end time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        Some((*self.times.last()?, *self.values.last()?))
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// Smallest `sqrt|u(t)| + sqrt|y0| - lambda (t - t0)/2` along the samples.
    pub fn min_blowup_margin(&self, problem: &ScalarCauchyProblem) -> f64 {
        let root0 = problem.y0.abs().sqrt();
        self.iter()
            .map(|(t, u)| u.abs().sqrt() + root0 - 0.5 * problem.lambda.abs() * (t - problem.t0).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Classical fixed-step RK4 from `t0` to `t_end`. `t_end < t0` integrates
/// backwards with step `-step`.
///
/// At `u = 0` the square root is not Lipschitz and plain RK4 drops to order
/// about 1.5 on steps that touch it; those steps alone are refined (see
/// [`refined_step`]). `gamma > 0` keeps the slope away from zero there, so
/// the solution never stalls on the kink.
pub fn integrate_scalar(problem: &ScalarCauchyProblem, step: f64, t_end: f64) -> Result<Trajectory> {
    let step = require_positive("step", step)?;
    if !t_end.is_finite() || t_end == problem.t0 {
        return Err(Error::domain("t_end", t_end, "must be finite and differ from t0"));
    }
    let span = t_end - problem.t0;
    let h = step.copysign(span);
    let full_steps = (span / h).floor() as u64;
    let capacity = full_steps as usize + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut values = Vec::with_capacity(capacity);
    let mut u = problem.y0;
    times.push(problem.t0);
    values.push(u);
    for k in 1..=full_steps {
        u = refined_step(problem, u, h, KINK_REFINEMENT_DEPTH);
        times.push(problem.t0 + k as f64 * h);
        values.push(u);
    }
    let t_last = *times.last().expect("nonempty");
    let rest = t_end - t_last;
    if rest != 0.0 && rest.abs() > 1e-12 * step {
        u = refined_step(problem, u, rest, KINK_REFINEMENT_DEPTH);
        times.push(t_end);
        values.push(u);
    } else {
        *times.last_mut().expect("nonempty") = t_end;
    }
    Ok(Trajectory { times, values })
}

/// Continuous odd antiderivative of `1/(sqrt|u| + gamma)`:
/// `sign(u) (2 sqrt|u| - 2 gamma ln((sqrt|u| + gamma)/gamma))`.
pub fn antiderivative(gamma: f64, u: f64) -> f64 {
    let s = u.abs().sqrt();
    let magnitude = 2.0 * s - 2.0 * gamma * (s / gamma).ln_1p();
    magnitude.copysign(u)
}

/// Time at which the solution reaches `u_target`:
/// `t0 + (H(u_target) - H(y0)) / lambda` with `H` the antiderivative above.
pub fn analytic_time(problem: &ScalarCauchyProblem, u_target: f64) -> Result<f64> {
    if problem.lambda == 0.0 {
        return Err(Error::domain("lambda", 0.0, "the zero field never moves"));
    }
    if !u_target.is_finite() {
        return Err(Error::domain("u_target", u_target, "must be finite"));
    }
    let elapsed =
        (antiderivative(problem.gamma, u_target) - antiderivative(problem.gamma, problem.y0)) / problem.lambda;
    Ok(problem.t0 + elapsed)
}
