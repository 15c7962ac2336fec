use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use deficit_coverage::harness::commands;
use deficit_coverage::harness::config::{ExperimentConfig, OUT_DIR_ENV};
use deficit_coverage::harness::validation::ValidationOptions;
use deficit_coverage::Result;

#[derive(Parser)]
#[command(
    name = "deficit-coverage",
    version,
    about = "Two-line risk model with mutual deficit coverage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML). Defaults to the shipped baseline.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides `sim.seed`.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    #[arg(long, global = true, value_name = "DIR", help = format!("Output directory; {OUT_DIR_ENV} applies when unset"))]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulated survival at the sweep points (and transform grid).
    Simulate,
    /// Monte-Carlo Wiener-Hopf factor samples and curves.
    Wh,
    /// Analytic transform sweep, with optional simulation overlay.
    Transform,
    /// Run every acceptance check; exits nonzero if any fails.
    Validate,
    /// Headline value, factor curves, transform sweep and plot script.
    ReproducePaper,
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::baseline(),
    };
    if let Some(s) = cli.seed {
        cfg.sim.seed = s;
    }
    if let Some(w) = cli.workers {
        cfg.sim.workers = Some(w.max(1));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = load(cli)?;
    let out = cfg.output_dir(cli.out.as_deref());
    let written = match cli.command {
        Command::Simulate => commands::simulate(&cfg, &out)?,
        Command::Wh => commands::wh(&cfg, &out)?,
        Command::Transform => commands::transform(&cfg, &out)?,
        Command::ReproducePaper => commands::reproduce_paper(&cfg, &out)?,
        Command::Validate => {
            let opts = ValidationOptions {
                seed: cli.seed.unwrap_or(ValidationOptions::default().seed),
                workers: cfg.workers(),
                mutate_prime_sign: false,
            };
            let (report, written) = commands::validate(&opts, &out)?;
            for c in &report.checks {
                println!("{}", c.line());
            }
            for p in written {
                eprintln!("wrote {}", p.display());
            }
            return Ok(report.passed());
        }
    };
    for p in written {
        eprintln!("wrote {}", p.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
