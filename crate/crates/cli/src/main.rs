use std::path::PathBuf;
use std::process::ExitCode;
use std::{env, fs};

use cheeger_flow::{Scenario, ScenarioSpec};
use cheeger_flow_cli::config::DEFAULT_GRID;
use cheeger_flow_cli::{parse_config, run, ConfigError, RunConfig, Verification};
use clap::Parser;

const OUT_ENV: &str = "CHEEGER_FLOW_OUT";
const DEFAULT_OUT: &str = "cheeger-flow-out";

/// Run an axisymmetric Ricci flow scenario and verify its isoperimetric identities.
#[derive(Debug, Parser)]
#[command(name = "cheeger-flow", version)]
struct Args {
    /// TOML run description; without it the unit round sphere is run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: $CHEEGER_FLOW_OUT, then ./cheeger-flow-out].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated verifications, replacing the configured list.
    #[arg(long, value_delimiter = ',')]
    verify: Option<Vec<String>>,
    /// Number of grid intervals.
    #[arg(long)]
    grid: Option<usize>,
    /// Seed for the randomized identity checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Only report failures.
    #[arg(long)]
    quiet: bool,
}

fn load(args: &Args) -> Result<RunConfig, String> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::new(
            ScenarioSpec::new(Scenario::RoundSphere, DEFAULT_GRID).with_parameter("r", 1.0),
        ),
    };
    if let Some(list) = &args.verify {
        config.verify = Verification::parse_list(list).map_err(|e| e.to_string())?;
    }
    if let Some(n) = args.grid {
        config.scenario.grid_n = n;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate().map_err(|e: ConfigError| e.to_string())?;
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if args.quiet {
        "error"
    } else {
        "warn"
    }))
    .init();

    let config = match load(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let dir = args
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .or_else(|| env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));

    let report = match run(&config, &dir) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    if !args.quiet {
        print!("{}", cheeger_flow_cli::run::report_text(&report));
        println!("artifacts in {}", dir.display());
    }
    match report.first_failure() {
        None => ExitCode::SUCCESS,
        Some(first) => {
            eprintln!(
                "verification failed: {} ({:e} against limit {:e})",
                first.name, first.value, first.limit
            );
            ExitCode::FAILURE
        }
    }
}
