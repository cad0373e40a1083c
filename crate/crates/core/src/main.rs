use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kinwb::diagnostics::{render_json, render_text};
use kinwb::experiments::verify::{verify, Scope};
use kinwb::experiments::{self, ExperimentConfig, Outcome};
use kinwb::par::{init_threads, Execution};

#[derive(Parser)]
#[command(name = "kinwb", version, about = "Well-balanced kinetic schemes: runs, sweeps and verification")]
struct Cli {
    /// Log progress to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a model in time and write density snapshots.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the one-step gap to the limit scheme over `epsilon_list`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the diagnostics suite.
    Verify {
        #[arg(long, default_value = "all")]
        scope: String,
        /// Also write the report as JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn report(outcome: &Outcome) -> ExitCode {
    if outcome.exit_code != 0 {
        if let Some(e) = outcome.manifest.get("error") {
            eprintln!(
                "error in {}: {}",
                e["module"].as_str().unwrap_or("?"),
                e["message"].as_str().unwrap_or("?")
            );
        }
    }
    println!("manifest: {}", outcome.output_dir.join(experiments::MANIFEST).display());
    ExitCode::from(outcome.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "debug" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Ok(n) = std::env::var("KINWB_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                init_threads(n);
            }
            _ => {
                eprintln!("KINWB_THREADS must be a positive integer, got {n:?}");
                return ExitCode::from(2);
            }
        }
    }
    let exec = Execution::default();
    match cli.command {
        Command::Run { config, out } => match ExperimentConfig::load(&config) {
            Ok(cfg) => report(&experiments::run(&cfg, out.as_deref(), exec)),
            Err(e) => report(&experiments::config_failure("run", e, out.as_deref())),
        },
        Command::Sweep { config, out } => match ExperimentConfig::load(&config) {
            Ok(cfg) => report(&experiments::sweep(&cfg, out.as_deref(), exec)),
            Err(e) => report(&experiments::config_failure("sweep", e, out.as_deref())),
        },
        Command::Verify { scope, out } => {
            let scope: Scope = match scope.parse() {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            match verify(scope) {
                Ok(lines) => {
                    print!("{}", render_text(&lines));
                    if let Some(path) = out {
                        if let Err(e) = std::fs::write(&path, render_json(&lines) + "\n") {
                            eprintln!("cannot write {}: {e}", path.display());
                        }
                    }
                    let failed = lines.iter().filter(|l| !l.passed).count();
                    println!("{} checks, {} failed", lines.len(), failed);
                    ExitCode::from(if failed == 0 { 0 } else { 1 })
                }
                Err(e) => {
                    eprintln!("error in {}: {e}", e.module());
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
