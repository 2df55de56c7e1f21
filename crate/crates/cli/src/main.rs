use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sqzcav_cli::{run_scenario, validate_config, CliError, Scenario, ScenarioConfig};

#[derive(Parser)]
#[command(name = "sqzcav", version, about = "Squeezed-cavity single-atom detection scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write its CSV files.
    Run {
        config: PathBuf,
        /// Output directory, overriding `output_path` in the config.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print derived parameters and checks for a config without running it.
    Validate { config: PathBuf },
    /// List the built-in scenarios.
    ListScenarios,
}

fn report(err: &CliError) -> ExitCode {
    let line = serde_json::json!({ "error": err.category(), "message": err.to_string() });
    eprintln!("{line}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{:<7} {}", s.name(), s.summary());
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => {
            let cfg = match ScenarioConfig::from_file(&config) {
                Ok(c) => c,
                Err(e) => return report(&e),
            };
            let diag = validate_config(&cfg);
            for line in &diag.lines {
                println!("{line}");
            }
            match diag.problems.first() {
                None => ExitCode::SUCCESS,
                Some(e) => report(e),
            }
        }
        Command::Run { config, output } => {
            let result = ScenarioConfig::from_file(&config).and_then(|cfg| run_scenario(&cfg, output.as_deref()));
            match result {
                Ok(summary) => {
                    for w in &summary.warnings {
                        eprintln!("warning: {w}");
                    }
                    for f in &summary.files {
                        println!("{}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => report(&e),
            }
        }
    }
}
