use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use catenary::scenario::{
    exit_code, load_scenario, run_scenario, run_suite, trace_scenario, RunOptions,
};

#[derive(Parser)]
#[command(
    name = "catenary",
    version,
    about = "Run catenary verification scenarios"
)]
struct Cli {
    /// Override the scenario RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for reports and CSV output.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Multiply every tolerance by this factor.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its JSON report.
    Run { scenario: PathBuf },
    /// Export the orbit trace of a scenario as CSV.
    Trace { scenario: PathBuf },
    /// Run every scenario listed in a suite file.
    Suite { suite: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions {
        seed: cli.seed,
        out_dir: cli.out_dir,
        tolerance_scale: cli.tolerance_scale,
    };
    let code = match cli.command {
        Command::Run { scenario } => {
            let outcome = run_scenario(&scenario, &opts);
            match &outcome {
                Ok(report) => {
                    for c in &report.checks {
                        println!(
                            "{:<4} {:<34} {:>12.4e} {} {:.1e}",
                            if c.passed { "ok" } else { "FAIL" },
                            c.name,
                            c.value,
                            c.relation,
                            c.limit
                        );
                        if let (false, Some(w)) = (c.passed, &c.witness) {
                            println!("     witness: {w}");
                        }
                    }
                    println!("{}: {:?}", report.scenario, report.verdict);
                }
                Err(e) => eprintln!("error: {e}"),
            }
            exit_code(&outcome)
        }
        Command::Trace { scenario } => {
            match load_scenario(&scenario).and_then(|sc| trace_scenario(&sc, &opts)) {
                Ok(path) => {
                    println!("{}", path.display());
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Command::Suite { suite } => match run_suite(&suite, &opts) {
            Ok(outcome) => {
                if outcome.rows.is_empty() {
                    eprintln!("warning: suite {} lists no scenarios", suite.display());
                }
                print!("{}", outcome.table());
                outcome.code
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
    };
    ExitCode::from(code as u8)
}
