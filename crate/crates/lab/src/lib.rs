//! Scenario runner behind the `lab` binary: loads a TOML scenario, runs the
//! certificate suite of its kind and assembles a JSON report.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod report;
pub mod scenario;
mod suite;

use std::io::Write;
use std::path::Path;

use mvlab::peano::{coordinate_problem, integrate_scalar, L1Coefficients, WitnessConfig};

pub use error::LabError;
pub use report::{Check, Report, Status};
pub use scenario::{Kind, Scenario};
pub use suite::run_suite;

/// Positive real multiplying every integer budget.
pub const BUDGET_SCALE_VAR: &str = "LAB_BUDGET_SCALE";

/// Exit code of configuration errors.
pub const EXIT_CONFIG: i32 = 64;
/// Exit code of output failures.
pub const EXIT_IO: i32 = 74;

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Io { .. } => EXIT_IO,
            LabError::Config(_) | LabError::Core(_) => EXIT_CONFIG,
        }
    }
}

/// Reads and validates a scenario file, then applies `LAB_BUDGET_SCALE`.
pub fn load_scenario(path: &Path) -> Result<Scenario, LabError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut scenario = Scenario::from_toml(&text)?;
    if let Some(factor) = budget_scale()? {
        scenario.scale_budgets(factor)?;
    }
    Ok(scenario)
}

fn budget_scale() -> Result<Option<f64>, LabError> {
    match std::env::var(BUDGET_SCALE_VAR) {
        Ok(raw) => raw
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|e| LabError::Config(format!("{BUDGET_SCALE_VAR}={raw:?}: {e}"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(LabError::Config(format!("{BUDGET_SCALE_VAR}: {e}"))),
    }
}

pub fn run(scenario: &Scenario) -> Report {
    Report::new(scenario.clone(), run_suite(scenario))
}

/// Writes `t,u,bound` rows of coordinate `encode(m, j)` of a would-be
/// solution, `m` the first block with `a_m != 0`. Negative `a_m` yields the
/// time-reversed run.
pub fn write_trajectory<W: Write>(scenario: &Scenario, j: u64, out: W) -> Result<(), LabError> {
    if scenario.kind != Kind::Peano {
        return Err(LabError::Config(format!(
            "trajectory needs a peano scenario, got {}",
            scenario.kind
        )));
    }
    if j == 0 {
        return Err(LabError::Config("block positions start at 1".into()));
    }
    let sec = scenario.peano();
    let a = L1Coefficients::finite(&sec.coefficients)?;
    let block = a
        .first_nonzero(sec.coefficients.len() as u64)
        .ok_or_else(|| LabError::Config("peano.coefficients are all zero".into()))?;
    let cfg = WitnessConfig {
        t0: sec.t0,
        t_star: sec.t0 + sec.horizon,
        initial_value: sec.initial_value,
        step: sec.step,
        ..WitnessConfig::default()
    };
    let n = scenario
        .scheme
        .encode(block, j)
        .map_err(|e| LabError::Config(e.to_string()))?;
    let problem = coordinate_problem(a.get(block), n, &cfg)?;
    let trajectory = integrate_scalar(&problem, sec.step, problem.t0 + sec.horizon)?;

    let mut writer = csv::Writer::from_writer(out);
    let io = |e: csv::Error| LabError::io("trajectory csv", e.into());
    writer.write_record(["t", "u", "bound"]).map_err(io)?;
    for (t, u) in trajectory.iter() {
        writer.serialize((t, u, problem.lower_bound(t))).map_err(io)?;
    }
    writer.flush().map_err(|e| LabError::io("trajectory csv", e))?;
    Ok(())
}
