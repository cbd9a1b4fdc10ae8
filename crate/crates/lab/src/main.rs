use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use mvlab_cli::{load_scenario, run, write_trajectory, Kind, LabError, Scenario, BUDGET_SCALE_VAR, EXIT_CONFIG};

/// Certificate laboratory for mother-vector constructions.
///
/// Exit codes: 0 certified, 1 failed, 2 undecided, 64 configuration error,
/// 74 output error.
#[derive(Parser)]
#[command(name = "lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the certificate suite of a scenario and emit a JSON report.
    Run {
        scenario: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Record wall-clock time in the report (breaks byte-identical reruns).
        #[arg(long)]
        timing: bool,
    },
    /// Emit t,u,bound rows for one coordinate of the blow-up block.
    Trajectory {
        scenario: PathBuf,
        /// Position j inside the block.
        #[arg(long)]
        j: u64,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Print the full default scenario of a kind.
    PrintDefaultConfig {
        /// peano, spread_lp, spread_c0 or spread_lp_plus
        kind: Kind,
    },
}

fn defaults_help() -> String {
    let mut text = format!(
        "Scenario files need only `kind`; omitted fields take the defaults of that kind.\n\
         {BUDGET_SCALE_VAR} (positive real) multiplies every integer budget.\n"
    );
    for kind in Kind::ALL {
        text.push_str(&format!("\nDefaults for kind = \"{kind}\":\n"));
        for line in Scenario::default_for(kind).to_toml().lines() {
            text.push_str("    ");
            text.push_str(line);
            text.push('\n');
        }
    }
    text
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), LabError> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|e| LabError::io(path.display().to_string(), e)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| LabError::io("stdout", e))
        }
    }
}

fn execute(command: Command) -> Result<i32, LabError> {
    match command {
        Command::Run {
            scenario,
            out,
            seed,
            timing,
        } => {
            let mut scenario = load_scenario(&scenario)?;
            if let Some(seed) = seed {
                scenario.seed = seed;
                scenario.validate()?;
            }
            let start = Instant::now();
            let mut report = run(&scenario);
            if timing {
                report.wall_clock_seconds = Some(start.elapsed().as_secs_f64());
            }
            write_output(out.as_deref(), &report.to_json())?;
            Ok(report.verdict.exit_code())
        }
        Command::Trajectory { scenario, j, csv } => {
            let scenario = load_scenario(&scenario)?;
            let file = File::create(&csv).map_err(|e| LabError::io(csv.display().to_string(), e))?;
            write_trajectory(&scenario, j, BufWriter::new(file))?;
            Ok(0)
        }
        Command::PrintDefaultConfig { kind } => {
            write_output(None, &Scenario::default_for(kind).to_toml())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let command = Cli::command().mut_subcommand("run", |c| c.after_long_help(defaults_help()));
    let cli = match command.try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
