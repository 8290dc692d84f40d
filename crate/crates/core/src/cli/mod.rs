//! Command-line front end: flag and config-file ingestion, validation and
//! the per-command pipelines.

mod run;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

pub use run::{run, EXIT_CHECK_FAILED, EXIT_OK, EXIT_SOLVER_FAILED};

use crate::error::{Error, Result};
use crate::geometry::MIN_GRID_SIZE;
use crate::radial::{RadialMesh, MIN_RADIUS};

#[derive(Parser, Debug)]
#[command(name = "csvortex", version, about = "Topological solutions of the skew-symmetric Chern-Simons vortex system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Subcommand, Debug)]
pub enum CommandArgs {
    /// Maximal solution on the torus at one ε.
    SolveTorus(Flags),
    /// Radial entire solution for multiplicities (ν₁, ν₂).
    SolveRadial(Flags),
    /// Run every check on the default scenario and write a report.
    Verify(Flags),
    /// Monotone solves along an ε ladder.
    Sweep(Flags),
    /// Smallest singular values of the radial linearisation.
    Modes(Flags),
    /// Multi-start Newton experiment.
    Uniqueness(Flags),
}

impl CommandArgs {
    fn split(self) -> (Command, Flags) {
        match self {
            CommandArgs::SolveTorus(f) => (Command::SolveTorus, f),
            CommandArgs::SolveRadial(f) => (Command::SolveRadial, f),
            CommandArgs::Verify(f) => (Command::Verify, f),
            CommandArgs::Sweep(f) => (Command::Sweep, f),
            CommandArgs::Modes(f) => (Command::Modes, f),
            CommandArgs::Uniqueness(f) => (Command::Uniqueness, f),
        }
    }
}

/// Flags shared by every command. Any flag overrides the config file.
#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[arg(long)]
    pub eps: Option<f64>,
    /// Comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<f64>>,
    #[arg(long)]
    pub nu1: Option<u32>,
    #[arg(long)]
    pub nu2: Option<u32>,
    /// Grid points per side.
    #[arg(long)]
    pub n: Option<usize>,
    /// Torus side length.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<f64>,
    /// Radial truncation radius.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub r: Option<f64>,
    /// Radial mesh intervals.
    #[arg(long)]
    pub mesh: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Excision radius δ.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Vortex file: `component x y multiplicity` per line.
    #[arg(long)]
    pub vortices: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file with any of the flag keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SolveTorus,
    SolveRadial,
    Verify,
    Sweep,
    Modes,
    Uniqueness,
}

/// Fully resolved run configuration; echoed as `config.toml` in the output
/// directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub eps: Option<f64>,
    pub ladder: Option<Vec<f64>>,
    pub nu1: u32,
    pub nu2: u32,
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub mesh: usize,
    pub tol: f64,
    pub delta: f64,
    pub starts: usize,
    pub seed: u64,
    pub vortices: Option<PathBuf>,
    pub out: PathBuf,
}

impl From<RunConfig> for Flags {
    fn from(c: RunConfig) -> Self {
        Flags {
            eps: c.eps,
            ladder: c.ladder,
            nu1: Some(c.nu1),
            nu2: Some(c.nu2),
            n: Some(c.n),
            l: Some(c.l),
            r: Some(c.r),
            mesh: Some(c.mesh),
            tol: Some(c.tol),
            delta: Some(c.delta),
            starts: Some(c.starts),
            seed: Some(c.seed),
            vortices: c.vortices,
            out: Some(c.out),
            config: None,
        }
    }
}

pub const DEFAULT_LADDER: [f64; 3] = [0.2, 0.1, 0.05];

fn overlay(file: Flags, flags: Flags) -> Result<Flags> {
    let pick = |a: Option<f64>, b: Option<f64>| b.or(a);
    // an ε-type flag replaces the other kind from the file
    let (eps, ladder) = match (flags.eps, flags.ladder) {
        (Some(_), Some(_)) => return Err(Error::Config("conflicting --eps and --ladder".into())),
        (Some(e), None) => (Some(e), None),
        (None, Some(l)) => (None, Some(l)),
        (None, None) => {
            if file.eps.is_some() && file.ladder.is_some() {
                return Err(Error::Config("conflicting eps and ladder in config file".into()));
            }
            (file.eps, file.ladder)
        }
    };
    Ok(Flags {
        eps,
        ladder,
        nu1: flags.nu1.or(file.nu1),
        nu2: flags.nu2.or(file.nu2),
        n: flags.n.or(file.n),
        l: pick(file.l, flags.l),
        r: pick(file.r, flags.r),
        mesh: flags.mesh.or(file.mesh),
        tol: pick(file.tol, flags.tol),
        delta: pick(file.delta, flags.delta),
        starts: flags.starts.or(file.starts),
        seed: flags.seed.or(file.seed),
        vortices: flags.vortices.or(file.vortices),
        out: flags.out.or(file.out),
        config: None,
    })
}

/// Merges flags over an optional TOML file, fills defaults and validates
/// every parameter before any computation.
pub fn parse_config(command: Command, flags: Flags) -> Result<RunConfig> {
    let file = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            match toml::from_str::<RunConfig>(&text) {
                // a resolved config echo
                Ok(echo) if echo.command != command => {
                    return Err(Error::Config(format!("{} was written for another command", path.display())));
                }
                Ok(echo) => Flags::from(echo),
                Err(_) => toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
            }
        }
        None => Flags::default(),
    };
    let merged = overlay(file, flags)?;
    let (eps, ladder) = match command {
        Command::SolveTorus | Command::Uniqueness => {
            if merged.ladder.is_some() {
                return Err(Error::Config("this command takes --eps, not --ladder".into()));
            }
            let default = if command == Command::Uniqueness { 0.05 } else { 0.1 };
            (Some(merged.eps.unwrap_or(default)), None)
        }
        Command::Verify | Command::Sweep => {
            if merged.eps.is_some() {
                return Err(Error::Config("this command takes --ladder, not --eps".into()));
            }
            (None, Some(merged.ladder.unwrap_or_else(|| DEFAULT_LADDER.to_vec())))
        }
        Command::SolveRadial | Command::Modes => (None, None),
    };
    let config = RunConfig {
        command,
        eps,
        ladder,
        nu1: merged.nu1.unwrap_or(1),
        nu2: merged.nu2.unwrap_or(1),
        n: merged.n.unwrap_or(256),
        l: merged.l.unwrap_or(2.0),
        r: merged.r.unwrap_or(25.0),
        mesh: merged.mesh.unwrap_or(2000),
        tol: merged.tol.unwrap_or(1e-9),
        delta: merged.delta.unwrap_or(0.5),
        starts: merged.starts.unwrap_or(10),
        seed: merged.seed.unwrap_or(1),
        vortices: merged.vortices,
        out: merged.out.unwrap_or_else(|| PathBuf::from("out")),
    };
    config.validate()?;
    Ok(config)
}

/// Parses process arguments, program name first.
pub fn parse_args<I, T>(args: I) -> std::result::Result<(Command, Flags), clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Ok(Cli::try_parse_from(args)?.command.split())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if let Some(eps) = self.eps {
            if !(eps > 0.0) {
                return bad(format!("eps must be positive, got {eps}"));
            }
        }
        if let Some(ladder) = &self.ladder {
            if ladder.is_empty() || ladder.iter().any(|&e| !(e > 0.0)) || ladder.windows(2).any(|w| w[1] >= w[0]) {
                return bad(format!("ladder must be non-empty, positive and strictly decreasing: {ladder:?}"));
            }
        }
        if self.n < MIN_GRID_SIZE || self.n % 2 != 0 {
            return bad(format!("n must be even and at least {MIN_GRID_SIZE}, got {}", self.n));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return bad(format!("L must be positive, got {}", self.l));
        }
        if !(self.delta >= 0.0 && self.delta < 0.5 * self.l) {
            return bad(format!("delta must satisfy 0 <= delta < L/2, got {}", self.delta));
        }
        if matches!(self.command, Command::SolveRadial | Command::Modes | Command::Verify) {
            if self.r < MIN_RADIUS {
                return bad(format!("R must be at least {MIN_RADIUS}, got {}", self.r));
            }
            RadialMesh::new(self.r, self.mesh).map_err(|e| Error::Config(e.to_string()))?;
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.starts < 2 && matches!(self.command, Command::Uniqueness | Command::Verify) {
            return bad(format!("starts must be at least 2, got {}", self.starts));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serialises")
    }

    /// Writes `config.toml` into the output directory.
    pub fn echo(&self) -> Result<PathBuf> {
        let path = self.out.join("config.toml");
        fs::write(&path, self.to_toml()).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

/// Entry point shared by the binary: parse, resolve, run.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (command, flags) = match parse_args(args) {
        Ok(v) => v,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_SOLVER_FAILED } else { EXIT_OK };
        }
    };
    match parse_config(command, flags) {
        Ok(config) => run(&config),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_SOLVER_FAILED
        }
    }
}
