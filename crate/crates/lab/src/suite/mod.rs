//! Certificate suites, one per scenario kind.
//!
//! Every randomized check draws from its own ChaCha8 stream of the scenario
//! seed, so adding or reordering checks never perturbs the others.

mod peano;
mod spread;

use mvlab::{ConvergenceVerdict, DecayIndex, NormPolicy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::{Check, Status};
use crate::scenario::{Kind, Scenario};

pub fn run_suite(scenario: &Scenario) -> Vec<Check> {
    match scenario.kind {
        Kind::Peano => peano::run(scenario),
        _ => spread::run(scenario),
    }
}

pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn policy(scenario: &Scenario) -> mvlab::Result<NormPolicy> {
    NormPolicy::new(
        scenario.budgets.summation,
        scenario.thresholds.divergence,
        scenario.thresholds.tolerance,
    )
}

/// Runs `body` and turns a library error into a failed check.
pub(crate) fn attempt<F>(name: impl Into<String>, anchor: &str, body: F) -> Check
where
    F: FnOnce(&mut Check) -> mvlab::Result<Status>,
{
    let mut check = Check::new(name, anchor);
    match body(&mut check) {
        Ok(status) => check.status(status),
        Err(e) => check.errored(e),
    }
}

pub(crate) fn verdict_name(verdict: &ConvergenceVerdict) -> &'static str {
    match verdict {
        ConvergenceVerdict::Converged { .. } => "converged",
        ConvergenceVerdict::DivergenceCertificate { .. } => "divergence_certificate",
        ConvergenceVerdict::Undecided { .. } => "undecided",
    }
}

/// Records `verdict` under `numbers`.
pub(crate) fn record_verdict(check: &mut Check, verdict: &ConvergenceVerdict) {
    check.set("verdict", verdict_name(verdict));
    match *verdict {
        ConvergenceVerdict::Converged {
            value,
            remainder_bound,
            at_index,
        } => {
            check.set("partial", value);
            check.set("remainder_bound", remainder_bound);
            check.set("at_index", at_index);
        }
        ConvergenceVerdict::DivergenceCertificate {
            threshold,
            crossing_index,
            partial,
        } => {
            check.set("threshold", threshold);
            check.set("crossing_index", crossing_index);
            check.set("partial", partial);
        }
        ConvergenceVerdict::Undecided { budget, partial } => {
            check.set("budget", budget);
            check.set("partial", partial);
        }
    }
}

/// Expecting divergence: a certificate is certified, an exhausted budget is
/// undecided, a convergence proof is a failure.
pub(crate) fn divergence_status(verdict: &ConvergenceVerdict) -> Status {
    match verdict {
        ConvergenceVerdict::DivergenceCertificate { .. } => Status::Certified,
        ConvergenceVerdict::Undecided { .. } => Status::Undecided,
        ConvergenceVerdict::Converged { .. } => Status::Failed,
    }
}

pub(crate) fn convergence_status(verdict: &ConvergenceVerdict) -> Status {
    match verdict {
        ConvergenceVerdict::Converged { .. } => Status::Certified,
        ConvergenceVerdict::Undecided { .. } => Status::Undecided,
        ConvergenceVerdict::DivergenceCertificate { .. } => Status::Failed,
    }
}

pub(crate) fn record_decay(check: &mut Check, key: &str, index: &DecayIndex) {
    match *index {
        DecayIndex::Exact(j) => {
            check.set(key, j);
            check.set(&format!("{key}_exact"), true);
        }
        DecayIndex::Sampled(x) => {
            check.set(key, x);
            check.set(&format!("{key}_exact"), false);
        }
    }
}
