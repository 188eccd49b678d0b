//! `qsync`: steady-state sweeps and transients from flat config files.
//!
//! Exit status: 0 on success, 1 for config errors, 2 when any grid point
//! failed, 3 for any other error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qsync::sweep::{
    run_sweep, run_transient, sweep_csv, sweep_json, transient_csv, transient_json, write_outputs, Measure,
    ModelKind, SweepConfig, TransientConfig,
};
use qsync::Error;

#[derive(Parser, Debug)]
#[command(name = "qsync", version, about = "Quantum synchronization sweeps and transients")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for sweeps (overrides run.workers).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output CSV path (overrides output.path).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Largest Fock cutoff tried by the automatic escalation.
    #[arg(long, global = true)]
    max_cutoff: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = LogLevel::Info)]
    log_level: LogLevel,

    /// Also write a JSON mirror next to the CSV.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Van der Pol pair over (Δ, g): mutual information and S_c.
    VdpSweep { config: PathBuf },
    /// Cavity-qubit pair over (Δ, g): qubit mutual information.
    QubitSweep { config: PathBuf },
    /// Cavity-qubit time evolution: ⟨σx⟩, s_p and mutual information.
    QubitTransient { config: PathBuf },
    /// Cavity-qubit pair over (Δ, g): mutual information, classical
    /// correlations and discord.
    Correlations { config: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LogLevel {
    Error,
    Warn,
    Info,
    Debug,
}

impl From<LogLevel> for log::LevelFilter {
    fn from(l: LogLevel) -> Self {
        match l {
            LogLevel::Error => log::LevelFilter::Error,
            LogLevel::Warn => log::LevelFilter::Warn,
            LogLevel::Info => log::LevelFilter::Info,
            LogLevel::Debug => log::LevelFilter::Debug,
        }
    }
}

enum Failure {
    Config(Error),
    Points(usize),
    Internal(Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(cli.log_level.into())
        .format_timestamp(None)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            log::error!("{e}");
            ExitCode::from(1)
        }
        Err(Failure::Points(n)) => {
            log::error!("{n} grid points failed; see the error column");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            log::error!("{e}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::VdpSweep { config } => sweep(cli, config, ModelKind::Vdp, None),
        Command::QubitSweep { config } => sweep(cli, config, ModelKind::CavityQubit, None),
        Command::Correlations { config } => sweep(
            cli,
            config,
            ModelKind::CavityQubit,
            Some(&[Measure::Mi, Measure::Classical, Measure::Discord]),
        ),
        Command::QubitTransient { config } => transient(cli, config),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(Error::Config(format!("cannot read {}: {e}", path.display()))))
}

/// Validation and parameter errors are the user's to fix; everything else is internal.
fn classify(e: Error) -> Failure {
    match e {
        Error::Config(_) | Error::InvalidModel(_) => Failure::Config(e),
        _ => Failure::Internal(e),
    }
}

fn sweep(cli: &Cli, path: &Path, model: ModelKind, measures: Option<&[Measure]>) -> Result<(), Failure> {
    let mut cfg = SweepConfig::parse_with(&read(path)?, Some(model), measures).map_err(Failure::Config)?;
    if cfg.model() != model {
        return Err(Failure::Config(Error::Config(format!(
            "model: this subcommand needs '{}', config has '{}'",
            model.name(),
            cfg.model().name()
        ))));
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(o) = &cli.output {
        cfg.output = o.clone();
    }
    if let Some(m) = cli.max_cutoff {
        cfg.solver.max_cutoff = m;
    }
    cfg.json |= cli.json;
    cfg.validate().map_err(Failure::Config)?;
    for line in cfg.to_config_string().lines() {
        log::info!("config: {line}");
    }

    let result = run_sweep(&cfg).map_err(classify)?;
    let json = cfg.json.then(|| sweep_json(&cfg, &result));
    write_outputs(&cfg.output, &sweep_csv(&cfg, &result), json.as_deref()).map_err(Failure::Internal)?;
    log::info!("wrote {} rows to {}", result.rows.len(), cfg.output.display());
    match result.failures() {
        0 => Ok(()),
        n => Err(Failure::Points(n)),
    }
}

fn transient(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let mut cfg = TransientConfig::parse(&read(path)?).map_err(Failure::Config)?;
    if let Some(o) = &cli.output {
        cfg.output = o.clone();
    }
    if cli.workers.is_some() || cli.max_cutoff.is_some() {
        log::warn!("--workers and --max-cutoff do not apply to transients; the cutoff is params.cutoff");
    }
    cfg.json |= cli.json;
    for line in cfg.to_config_string().lines() {
        log::info!("config: {line}");
    }

    let result = run_transient(&cfg).map_err(classify)?;
    let json = cfg.json.then(|| transient_json(&cfg, &result));
    write_outputs(&cfg.output, &transient_csv(&cfg, &result), json.as_deref()).map_err(Failure::Internal)?;
    log::info!("wrote {} samples to {}", result.times.len(), cfg.output.display());
    Ok(())
}
