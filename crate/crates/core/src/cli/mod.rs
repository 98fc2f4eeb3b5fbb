//! Experiment runner behind the `chainrebuild` binary: torsion-growth
//! sweeps, Gabber fuzzing, quality regressions and Farber statistics.

mod config;
mod report;
mod runs;

pub use config::{parse_caps_flag, parse_range, Config};
pub use report::{sig12, Cell, Format, Report};
pub use runs::{run_farber, run_gabber_fuzz, run_homology, run_sweep, Family, SWEEP_COLUMNS, SWEEP_SCHEMA};

use crate::chain::ChainError;
use crate::circle::CircleError;
use crate::exact_linalg::Caps;
use crate::farber::FarberError;
use crate::nilpotent::NilpotentError;
use crate::rebuild::RebuildError;
use crate::stack::StackError;
use crate::text::ParseError;
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {}", config_msg(.err))]
    Config { path: String, err: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error(transparent)]
    Rebuild(#[from] RebuildError),
    #[error(transparent)]
    Nilpotent(#[from] NilpotentError),
    #[error(transparent)]
    Stack(#[from] StackError),
    #[error(transparent)]
    Farber(#[from] FarberError),
}

#[derive(Debug, Parser)]
#[command(name = "chainrebuild", version, about = "Exact chain complexes, rebuildings and torsion-growth experiments")]
pub struct Args {
    /// Report format.
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Seed for randomized runs; overrides `seed` in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Resource caps, e.g. `bits=65536,minors=1000000,iterations=10000`.
    #[arg(long, global = true)]
    pub caps: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Homology of a chain complex file (or a `.stack` file's total complex).
    Homology { file: PathBuf },
    /// Rebuild one cover and report it in the sweep schema.
    Rebuild {
        #[command(subcommand)]
        kind: RebuildKind,
    },
    /// Torsion-growth sweep from a config file.
    Sweep { config: PathBuf },
    /// Seeded Gabber-inequality and BT3 fuzzing from a config file.
    GabberFuzz { config: PathBuf },
    /// Fixed-point ratios and the intersection inequality from a config file.
    Farber { config: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum RebuildKind {
    /// The `N`-fold circle cover at scale `T`.
    Circle {
        n: u64,
        #[arg(long, default_value_t = 10.0)]
        t: f64,
    },
    /// `T^d` with the cover for `(Nℤ)^d`.
    Torus {
        n: u64,
        #[arg(long, default_value_t = 2)]
        dim: u64,
        /// Scale for the quality column; the index by default.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Heisenberg mod `N`, or a subgroup file for any named tower.
    Heisenberg {
        subgroup: String,
        #[arg(long)]
        t: Option<f64>,
    },
}

// Line 0 marks a key that is missing or came from the command line.
fn config_msg(err: &ParseError) -> String {
    if err.line == 0 {
        err.msg.clone()
    } else {
        err.to_string()
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), msg: e.to_string() })
}

fn load_config(path: &Path, args: &Args) -> Result<Config, CliError> {
    let cfg_err = |err| CliError::Config { path: path.display().to_string(), err };
    let mut cfg = Config::parse(&read(path)?).map_err(cfg_err)?;
    if let Some(s) = args.seed {
        cfg.set("seed", s.to_string());
    }
    Ok(cfg)
}

fn caps_for(args: &Args, base: Caps) -> Result<Caps, CliError> {
    match &args.caps {
        Some(s) => parse_caps_flag(s, base).map_err(CliError::Usage),
        None => Ok(base),
    }
}

/// Runs a command; the returned format comes from the flag, then the config, then CSV.
pub fn execute(args: &Args) -> Result<(Report, Format), CliError> {
    let flag_format = args.format;
    match &args.command {
        Command::Homology { file } => {
            let caps = caps_for(args, Caps::default())?;
            Ok((run_homology(file, &caps)?, flag_format.unwrap_or(Format::Csv)))
        }
        Command::Rebuild { kind } => {
            let mut cfg = Config::default();
            match kind {
                RebuildKind::Circle { n, t } => {
                    cfg.set("family", "circle".into());
                    cfg.set("n", n.to_string());
                    cfg.set("t", t.to_string());
                }
                RebuildKind::Torus { n, dim, t } => {
                    cfg.set("family", "torus".into());
                    cfg.set("n", n.to_string());
                    cfg.set("d", dim.to_string());
                    if let Some(t) = t {
                        cfg.set("t", t.to_string());
                    }
                }
                RebuildKind::Heisenberg { subgroup, t } => {
                    cfg.set("family", "heisenberg".into());
                    if subgroup.parse::<u64>().is_ok() {
                        cfg.set("n", subgroup.clone());
                    } else {
                        cfg.set("subgroup", subgroup.clone());
                    }
                    if let Some(t) = t {
                        cfg.set("t", t.to_string());
                    }
                }
            }
            let caps = caps_for(args, Caps::default())?;
            let report = run_sweep(&cfg, Path::new("."), &caps).map_err(|e| match e {
                CliError::Config { err, .. } => CliError::Usage(err.msg),
                other => other,
            })?;
            Ok((report, flag_format.unwrap_or(Format::Csv)))
        }
        Command::Sweep { config } | Command::GabberFuzz { config } | Command::Farber { config } => {
            let cfg = load_config(config, args)?;
            let cfg_err = |err| CliError::Config { path: config.display().to_string(), err };
            let format = match flag_format {
                Some(f) => f,
                None => match cfg.raw("format") {
                    Some((ln, v)) => v.parse().map_err(|m: String| cfg_err(ParseError::new(ln, m)))?,
                    None => Format::Csv,
                },
            };
            let caps = caps_for(args, cfg.caps().map_err(cfg_err)?)?;
            let dir = config.parent().unwrap_or(Path::new("."));
            let report = match &args.command {
                Command::Sweep { .. } => run_sweep(&cfg, dir, &caps),
                Command::GabberFuzz { .. } => run_gabber_fuzz(&cfg, &caps),
                _ => run_farber(&cfg, dir),
            }
            .map_err(|e| match e {
                CliError::Config { err, .. } => cfg_err(err),
                other => other,
            })?;
            Ok((report, format))
        }
    }
}

/// Parses arguments, runs, writes the report. Exit status: 0 on success,
/// 1 when a property check failed, 2 on usage, input or resource errors.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (report, format) = match execute(&args) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let text = report.render(format);
    match &args.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error: {}: {e}", p.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    for f in &report.failures {
        eprintln!("FAIL {f}");
    }
    i32::from(!report.failures.is_empty())
}
