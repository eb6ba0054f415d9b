use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use beds_cli::config::{parse_config, ScenarioConfig};
use beds_cli::scenarios::{run_scenario, EXIT_CONFIG, EXIT_IO};

/// Scenario runner for the dissipative belief-dynamics laboratory.
#[derive(Parser, Debug)]
#[command(name = "beds", version, about)]
struct Cli {
    /// Scenario configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's out_dir).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Seed (overrides the config's seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the summary line on stdout.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read config {}: {e}", cli.config.display());
            return ExitCode::from(EXIT_IO);
        }
    };
    let mut cfg: ScenarioConfig = match parse_config(&text) {
        Ok(c) => c,
        Err(errors) => {
            for e in &errors {
                eprintln!("config error: {e}");
            }
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = cli.out_dir {
        cfg.out_dir = Some(dir);
    }
    let out_dir = match &cfg.out_dir {
        Some(d) => d.clone(),
        None => {
            eprintln!("config error: no out_dir in config and no --out-dir flag");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run_scenario(&cfg, &out_dir) {
        Ok(report) => {
            if !cli.quiet {
                println!(
                    "{}: ok in {:.3}s, {} artifact(s) in {}",
                    report.kind,
                    report.wall_time_s,
                    report.artifacts.len(),
                    out_dir.display()
                );
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
