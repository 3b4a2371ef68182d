use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use acsim_cli::{configure_threads, parse_config, run_experiment, CliError, Experiment};

#[derive(Parser)]
#[command(name = "acsim", version, about = "Pseudo-spectral runs and checks for the artificial-compressibility model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON configuration.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the configuration.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Parse and validate a configuration without running it.
    Validate { config: PathBuf },
    /// Print the available experiments.
    ListExperiments,
}

fn load(path: &PathBuf) -> Result<acsim_cli::ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

fn error_json(e: &CliError) -> String {
    let field = match e {
        CliError::Invalid { field, .. } => Some(field.clone()),
        _ => None,
    };
    serde_json::json!({"error": e.to_string(), "field": field}).to_string()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("{}", error_json(&e));
        return ExitCode::from(2);
    }
    match cli.command {
        Command::ListExperiments => {
            for e in Experiment::ALL {
                println!("{:<16}{}", e.name(), e.description());
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&config) {
            Ok(cfg) => {
                println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{}", error_json(&e));
                ExitCode::from(2)
            }
        },
        Command::Run { config, output_dir } => {
            let mut cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{}", error_json(&e));
                    return ExitCode::from(2);
                }
            };
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            match run_experiment(&cfg) {
                Ok(m) => {
                    let summary = serde_json::json!({
                        "experiment": m.experiment,
                        "passed": m.passed,
                        "failures": m.failures,
                        "output_dir": cfg.output_dir,
                    });
                    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
                    if m.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("{}", error_json(&e));
                    ExitCode::from(2)
                }
            }
        }
    }
}
