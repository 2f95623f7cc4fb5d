//! `rgsim`: runs one simulation scenario and writes CSV artifacts plus a manifest.
//!
//! Exit codes: 0 success, 1 I/O, 2 configuration, 3 numerical divergence,
//! 4 non-convergence.

mod config;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use rgsim::Error;
use serde_json::{json, Value};

use config::{apply_env, merge, Config, Scenario};
use scenarios::Artifacts;

#[derive(Parser, Debug)]
#[command(version, about = "Ring-cavity BEC gravimeter simulations")]
struct Cli {
    /// JSON config; missing fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long, value_enum)]
    scenario: Option<Scenario>,

    #[arg(long)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Run(Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Run(e) => match e {
                Error::InvalidParam(_) | Error::DimensionCap { .. } | Error::Format(_) | Error::Json(_) => 2,
                Error::Divergence { .. } | Error::BoxExit { .. } | Error::UndefinedPhase(_) | Error::UndefinedCom(_) => 3,
                Error::NonConvergence { .. }
                | Error::Fit(_)
                | Error::NonIdentifiable(_)
                | Error::ProjectionVanished(_)
                | Error::Quadrature(_) => 4,
                Error::Io(_) => 1,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Run(e) => write!(f, "{e}"),
        }
    }
}

fn resolve(cli: &Cli) -> Result<Config, Failure> {
    let mut v = serde_json::to_value(Config::default()).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let patch: Value = serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        if !patch.is_object() {
            return Err(Failure::Config(format!("{}: top level must be an object", path.display())));
        }
        merge(&mut v, patch);
    }
    apply_env(&mut v, std::env::vars()).map_err(Failure::Config)?;
    let mut cfg: Config = serde_json::from_value(v).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(s) = cli.scenario {
        cfg.scenario = Some(s);
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let cfg = resolve(cli)?;
    let scenario = cfg.scenario.ok_or_else(|| Failure::Config("no scenario given (--scenario or `scenario` in the config)".into()))?;
    let start = Instant::now();
    let mut out = Artifacts::new(&cfg.out).map_err(Failure::Run)?;
    log::info!("running {} into {}", scenario.name(), cfg.out.display());
    let summary = scenarios::run(scenario, &cfg, &mut out).map_err(Failure::Run)?;
    let manifest = json!({
        "scenario": scenario.name(),
        "seed": cfg.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "outputs": out.files,
        "summary": summary,
        "wall_time_s": start.elapsed().as_secs_f64(),
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Run(e.into()))?;
    std::fs::write(cfg.out.join("manifest.json"), text + "\n").map_err(|e| Failure::Run(e.into()))?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
