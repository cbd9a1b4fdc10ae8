use mvlab::peano::{
    analytic_time, combined_eval, coordinate_problem, integrate_scalar, l1_bound_check, lipschitz_transfer_check,
    partial_combined_coord, peano_failure_witness, spread_independence_rank, L1Coefficients, ScalarCauchyProblem,
    TruncatedPoint, WitnessConfig,
};
use mvlab::Error;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{attempt, rng};
use crate::report::{Check, Status};
use crate::scenario::Scenario;

/// Coordinates of a random point of `c_0`, shrinking like `1/k`.
const POINT_LEN: usize = 64;
/// Sampled positions for the bitwise time-reversal comparison.
const REVERSAL_POSITIONS: u64 = 8;

fn random_point(rng: &mut ChaCha8Rng) -> TruncatedPoint {
    TruncatedPoint::new(
        (0..POINT_LEN)
            .map(|k| rng.random_range(-5.0..5.0) / (k as f64 + 1.0))
            .collect(),
    )
}

pub(super) fn run(s: &Scenario) -> Vec<Check> {
    let sec = s.peano();
    let a = match L1Coefficients::finite(&sec.coefficients) {
        Ok(a) => a,
        Err(e) => return vec![Check::new("coefficients", "a lies in l_1").errored(e)],
    };
    let cfg = WitnessConfig {
        t0: sec.t0,
        t_star: sec.t0 + sec.horizon,
        initial_value: sec.initial_value,
        step: sec.step,
        tolerance: s.thresholds.witness_tolerance,
        coefficient_search: sec.coefficients.len() as u64,
    };
    vec![
        coordinate_identity(s, &a),
        l1_bound(s, &a),
        lipschitz_transfer(s, &a),
        spread_independence(s),
        ode_oracle(s, &a, &cfg),
        blowup_witness(s, &a, &cfg),
        time_reversal(s, &a, &cfg),
        zero_field_rejected(s, &cfg),
    ]
}

fn coordinate_identity(s: &Scenario, a: &L1Coefficients) -> Check {
    attempt(
        "coordinate_identity",
        "coordinate n in block i of sum_i a_i N_i f equals a_i f_n",
        |check| {
            let mut rng = rng(s.seed, 1);
            let m = s.peano().coefficients.len() as u64;
            let mut mismatches = 0u64;
            for _ in 0..s.budgets.random_draws {
                let x = random_point(&mut rng);
                let n = rng.random_range(1..=s.budgets.sample_coordinates);
                if combined_eval(a, s.scheme, n, &x)? != partial_combined_coord(a, s.scheme, m, n, &x)? {
                    mismatches += 1;
                }
            }
            check.set("draws", s.budgets.random_draws);
            check.set("mismatches", mismatches);
            Ok(Status::from_bool(mismatches == 0))
        },
    )
}

/// Shared driver of the two sup-norm estimates.
fn l1_estimate<F>(s: &Scenario, name: &str, anchor: &str, stream: u64, mut bound: F) -> Check
where
    F: FnMut(&mut ChaCha8Rng, u64) -> mvlab::Result<mvlab::BoundCheck>,
{
    attempt(name, anchor, |check| {
        let mut rng = rng(s.seed, stream);
        let m_max = s.peano().coefficients.len() as u64;
        let mut min_slack = f64::INFINITY;
        let mut worst = None;
        for _ in 0..s.budgets.random_draws {
            let m = rng.random_range(1..=m_max);
            let b = bound(&mut rng, m)?;
            if b.slack() < min_slack {
                min_slack = b.slack();
                worst = Some((b, m));
            }
        }
        check.set("draws", s.budgets.random_draws);
        check.set("truncation", s.budgets.sample_coordinates);
        check.set("min_slack", min_slack);
        if let Some((b, m)) = worst {
            check.set("worst_lhs", b.lhs);
            check.set("worst_rhs", b.rhs);
            check.set("worst_m", m);
        }
        Ok(Status::from_bool(min_slack >= -s.thresholds.bound_slack))
    })
}

fn l1_bound(s: &Scenario, a: &L1Coefficients) -> Check {
    l1_estimate(
        s,
        "l1_bound",
        "||sum_{i<=m} a_i N_i f(x)|| <= ||f(x)|| sum_{i<=m} |a_i|",
        2,
        |rng, m| {
            let x = random_point(rng);
            l1_bound_check(
                a,
                s.scheme,
                &x,
                m,
                s.budgets.sample_coordinates,
                s.thresholds.bound_slack,
            )
        },
    )
}

fn lipschitz_transfer(s: &Scenario, a: &L1Coefficients) -> Check {
    l1_estimate(
        s,
        "lipschitz_transfer",
        "||sum a_i N_i f(x) - sum a_i N_i f(y)|| <= ||f(x) - f(y)|| sum_{i<=m} |a_i|",
        3,
        |rng, m| {
            let x = random_point(rng);
            let y = random_point(rng);
            lipschitz_transfer_check(
                a,
                s.scheme,
                &x,
                &y,
                m,
                s.budgets.sample_coordinates,
                s.thresholds.bound_slack,
            )
        },
    )
}

fn spread_independence(s: &Scenario) -> Check {
    attempt(
        "spread_independence",
        "the spreads N_i f over distinct blocks are linearly independent",
        |check| {
            let mut rng = rng(s.seed, 4);
            let k = s.peano().coefficients.len() as u64;
            let blocks: Vec<u64> = (1..=k).collect();
            let x = random_point(&mut rng);
            let rank = spread_independence_rank(&blocks, s.scheme, &x)?;
            check.set("blocks", k);
            check.set("rank", rank);
            Ok(Status::from_bool(rank as u64 == k))
        },
    )
}

fn positions(s: &Scenario) -> Vec<u64> {
    (1..=s.budgets.block_sample).collect()
}

fn ode_oracle(s: &Scenario, a: &L1Coefficients, cfg: &WitnessConfig) -> Check {
    attempt(
        "ode_oracle",
        "RK4 endpoint u(t*) inverts to t* through t(u) = t0 + (H(u) - H(y0))/lambda",
        |check| {
            let block = a.first_nonzero(cfg.coefficient_search).ok_or(Error::ZeroField)?;
            let coefficient = a.get(block);
            let horizon = cfg.t_star - cfg.t0;
            let mut worst = 0.0f64;
            for position in positions(s) {
                let n = s.scheme.encode(block, position)?;
                let problem = coordinate_problem(coefficient, n, cfg)?;
                let traj = integrate_scalar(&problem, cfg.step, problem.t0 + horizon)?;
                let (t, u) = traj.last().expect("trajectory has samples");
                let oracle = analytic_time(&problem, u)?;
                worst = worst.max((oracle - t).abs() / horizon);
            }
            check.set("block", block);
            check.set("samples", s.budgets.block_sample);
            check.set("step", cfg.step);
            check.set("max_relative_error", worst);
            check.set("rtol", s.thresholds.ode_rtol);
            Ok(Status::from_bool(worst <= s.thresholds.ode_rtol))
        },
    )
}

fn blowup_witness(s: &Scenario, a: &L1Coefficients, cfg: &WitnessConfig) -> Check {
    attempt(
        "blowup_witness",
        "|u_{m_j}(t*)| >= (|a_m|(t* - t0)/2 - sqrt|b|)_+^2 uniformly in j, so u(t*) is not null",
        |check| {
            let w = peano_failure_witness(a, s.scheme, &positions(s), cfg)?;
            check.set("block", w.block);
            check.set("coefficient", w.coefficient);
            check.set("horizon", w.horizon);
            check.set("lower_bound", w.lower_bound);
            check.set("uniform_lower_bound", w.uniform_lower_bound);
            check.set("spread", w.spread());
            check.set("samples", w.samples.len());
            check.set("time_reversed", w.time_reversed);
            check.set("tolerance", w.tolerance);
            Ok(Status::from_bool(w.holds()))
        },
    )
}

fn time_reversal(s: &Scenario, a: &L1Coefficients, cfg: &WitnessConfig) -> Check {
    attempt(
        "time_reversal",
        "v(t) = u(-t) solves v' = -lambda (sqrt|v| + gamma)",
        |check| {
            let block = a.first_nonzero(cfg.coefficient_search).ok_or(Error::ZeroField)?;
            let lambda = a.get(block).abs();
            let horizon = cfg.t_star - cfg.t0;
            let mut mismatches = 0u64;
            let mut compared = 0u64;
            for position in 1..=REVERSAL_POSITIONS.min(s.budgets.block_sample) {
                let n = s.scheme.encode(block, position)?;
                let gamma = 1.0 / (n as f64 + 1.0);
                let backward = ScalarCauchyProblem::new(-lambda, gamma, cfg.t0, cfg.initial_value)?;
                let forward = backward.time_reversed();
                let b = integrate_scalar(&backward, cfg.step, cfg.t0 - horizon)?;
                let f = integrate_scalar(&forward, cfg.step, forward.t0 + horizon)?;
                compared += b.len() as u64;
                let same =
                    b.len() == f.len() && b.iter().zip(f.iter()).all(|((tb, ub), (tf, uf))| ub == uf && tb == -tf);
                if !same {
                    mismatches += 1;
                }
            }
            check.set("block", block);
            check.set("compared_points", compared);
            check.set("mismatched_positions", mismatches);
            Ok(Status::from_bool(mismatches == 0))
        },
    )
}

fn zero_field_rejected(s: &Scenario, cfg: &WitnessConfig) -> Check {
    attempt(
        "zero_field_rejected",
        "a = 0 gives the zero field, which has solutions; no witness may exist",
        |check| {
            let zero = L1Coefficients::finite(&vec![0.0; s.peano().coefficients.len()])?;
            let outcome = peano_failure_witness(&zero, s.scheme, &positions(s), cfg);
            check.set("rejected", outcome.is_err());
            Ok(Status::from_bool(matches!(outcome, Err(Error::ZeroField))))
        },
    )
}
