use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tdcontrol::config::{
    error_record, exit_code, list_builtins, run_experiment, ExperimentConfig, RunOptions,
};

#[derive(Parser)]
#[command(name = "tdcontrol", version, about = "Run dynamical-control experiments from JSON configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Directory for the CSV and summary files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (results do not depend on this).
        #[arg(long)]
        threads: Option<usize>,
        /// Print the effective config and exit without running.
        #[arg(long)]
        dump_effective_config: bool,
    },
    /// List sequence kinds, operator names and experiment kinds.
    List {
        #[arg(long)]
        json: bool,
    },
}

fn fail(e: tdcontrol::Error) -> ExitCode {
    eprintln!("{}", error_record(&e));
    ExitCode::from(exit_code(&e) as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List { json } => {
            let catalog = list_builtins();
            if json {
                println!("{}", serde_json::to_string_pretty(&catalog).unwrap());
            } else {
                print!("{catalog}");
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            out_dir,
            seed,
            threads,
            dump_effective_config,
        } => {
            let cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            if dump_effective_config {
                println!("{}", cfg.effective(seed).to_json());
                return ExitCode::SUCCESS;
            }
            let opts = RunOptions {
                out_dir,
                seed,
                threads,
            };
            match run_experiment(&cfg, &opts) {
                Ok(outcome) => {
                    if let Some(csv) = &outcome.csv {
                        println!("wrote {}", csv.display());
                    }
                    println!("wrote {}", outcome.summary_path.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
