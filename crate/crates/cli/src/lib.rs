//! `xtalk`: runs attack campaigns from a JSON config and writes CSV, JSON
//! and SVG results.
//!
//! Exit codes: 0 on success, 1 for invalid input (arguments, config,
//! dataset, file system), 2 when the numerics fail.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use xtalk_core::analysis::SweepTarget;
use xtalk_core::dataset::{parse_dataset, Dataset};
use xtalk_core::protocols::ScenarioTiming;
use xtalk_core::pulse::PulseShape;
use xtalk_core::Error;

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use config::{DegreeGrid, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "xtalk", version, about = "Crosstalk attack simulator for a 3-qubit chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON run config; defaults apply to every absent field.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory, overriding `output.directory`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Victim angle grid in degrees, `start:stop:step`, inclusive.
    #[arg(long, global = true, value_name = "START:STOP:STEP")]
    pub lambda_grid: Option<String>,

    /// attacker-first, victim-first or no-attack.
    #[arg(long, global = true)]
    pub timing: Option<String>,

    /// Dataset CSV with header f1,f2,f3,f4,label.
    #[arg(long, global = true)]
    pub dataset: Option<PathBuf>,

    /// Amplitude sweep target: catalyst (q0) or driver (q1).
    #[arg(long, global = true)]
    pub target: Option<String>,

    /// Restrict the detuning study to one pulse shape.
    #[arg(long, global = true)]
    pub shape: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Influence norm for every coupling × q0 shape pair.
    Scan,
    /// Process tomography of the configured attack.
    Qpt,
    /// One-angle logical fit of the configured attack.
    Fit,
    /// Coin-flip probabilities over the λ grid.
    Coin,
    /// XOR truth table under every timing.
    Xor,
    /// Classifier accuracy, clean and attacked.
    Sqqnn,
    /// Catalyst and driver amplitude sweeps.
    Sweep,
    /// Fit stability across the detuning grid.
    Detuning,
    /// Shot-sampled canary check.
    Detect,
    /// Attacker-first impact against post-reset impact.
    Contain,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Scan => "scan",
            Command::Qpt => "qpt",
            Command::Fit => "fit",
            Command::Coin => "coin",
            Command::Xor => "xor",
            Command::Sqqnn => "sqqnn",
            Command::Sweep => "sweep",
            Command::Detuning => "detuning",
            Command::Detect => "detect",
            Command::Contain => "contain",
        }
    }
}

/// Reads a labelled CSV from disk; a missing file is an ingestion error.
pub fn load_dataset(path: &std::path::Path) -> Result<Dataset<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("dataset {}: {e}", path.display())))?;
    Ok(parse_dataset(&text)?)
}

/// Config from file (or defaults) with command-line overrides applied, validated.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("config {}: {e}", p.display())))?;
            RunConfig::from_json(&text).map_err(|e| match e {
                Error::Validation(m) => CliError::Usage(format!("{}: {m}", p.display())),
                other => CliError::Core(other),
            })?
        }
        None => RunConfig::default(),
    };
    if let Some(o) = &cli.out {
        cfg.output.directory = o.to_string_lossy().into_owned();
    }
    if let Some(g) = &cli.lambda_grid {
        cfg.protocol.lambda_grid_deg = DegreeGrid::parse(g)?;
    }
    if let Some(t) = &cli.timing {
        cfg.protocol.timing = t.parse::<ScenarioTiming>()?;
    }
    if let Some(d) = &cli.dataset {
        cfg.protocol.dataset = Some(d.to_string_lossy().into_owned());
    }
    if let Some(t) = &cli.target {
        cfg.analysis.sweep_target = Some(t.parse::<SweepTarget>()?);
    }
    if let Some(s) = &cli.shape {
        cfg.analysis.detuning_shapes = vec![s.parse::<PulseShape>()?];
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("xtalk {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

/// Runs the parsed command and writes its files, returning their paths.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = resolve_config(cli)?;
    let mut w = output::Writer::new(&cfg.output.directory, &cfg);
    commands::dispatch(cli.command, &cfg, &mut w)?;
    w.commit()
}
