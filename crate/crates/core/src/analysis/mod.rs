//! Verification harness: quantitative checks over solver outputs, ε sweeps
//! and the multi-start uniqueness experiment.

mod limits;
mod radial_checks;
mod sweep;
mod uniqueness;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub use limits::{ball_masses, check_concentration, check_rescaling, check_smallness, CONCENTRATION_RADIUS, RESCALING_CUTOFF};
pub use radial_checks::{check_decay, check_nondegeneracy, check_radial_integrals, check_zero_base_order, zero_base_sigma};
pub use sweep::{epsilon_sweep, EntryStatus, SweepEntry, SweepRecord};
pub use uniqueness::{uniqueness_experiment, StartRecord, UniquenessOptions, UniquenessOutcome, CLUSTER_TOL};

use crate::error::{Error, Result};
use crate::torus::{FieldPair, TorusProblem};

/// How measured values are compared with their references.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// `|m - r| ≤ tol·|r|`.
    Relative,
    /// `|m - r| ≤ tol`.
    Absolute,
    /// `m ≤ r + tol`.
    AtMost,
    /// `m ≥ r - tol`.
    AtLeast,
    /// `m < r` strictly; the tolerance is ignored.
    Below,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    /// Which identity or limit statement the check exercises.
    pub anchor: String,
    pub measured: Vec<f64>,
    pub reference: Vec<f64>,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl CheckResult {
    pub fn new(
        name: impl Into<String>,
        anchor: impl Into<String>,
        measured: Vec<f64>,
        reference: Vec<f64>,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        assert_eq!(measured.len(), reference.len(), "measured and reference lengths differ");
        let pass = measured.iter().zip(&reference).all(|(&m, &r)| match comparison {
            Comparison::Relative => (m - r).abs() <= tolerance * r.abs(),
            Comparison::Absolute => (m - r).abs() <= tolerance,
            Comparison::AtMost => m <= r + tolerance,
            Comparison::AtLeast => m >= r - tolerance,
            Comparison::Below => m < r,
        });
        CheckResult { name: name.into(), anchor: anchor.into(), measured, reference, tolerance, comparison, pass }
    }

    pub fn summary_line(&self) -> String {
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.6e}")).collect::<Vec<_>>().join(", ");
        let op = match self.comparison {
            Comparison::Relative => "rel",
            Comparison::Absolute => "abs",
            Comparison::AtMost => "at most",
            Comparison::AtLeast => "at least",
            Comparison::Below => "below",
        };
        format!(
            "{} {}: measured [{}] vs [{}] ({op} {:e}) -- {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            fmt(&self.measured),
            fmt(&self.reference),
            self.tolerance,
            self.anchor
        )
    }
}

/// Flux of each equation against `4πNᵢ`, relative tolerance `1e-3`.
pub fn check_flux(problem: &TorusProblem, pair: &FieldPair) -> Result<CheckResult> {
    let flux = problem.flux(pair)?;
    Ok(CheckResult::new("flux", "flux identity", flux.to_vec(), problem.flux_targets().to_vec(), 1e-3, Comparison::Relative))
}

#[derive(serde::Serialize)]
struct ReportRow<'a> {
    name: &'a str,
    measured: String,
    reference: String,
    tol: f64,
    pass: bool,
    anchor: &'a str,
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(";")
}

/// Writes `report.csv` (`name,measured,reference,tol,pass,anchor`, vectors
/// joined by `;`) and `summary.txt` into `dir`. Fails if a check has no
/// anchor.
pub fn write_report(dir: &Path, checks: &[CheckResult]) -> Result<()> {
    if let Some(c) = checks.iter().find(|c| c.anchor.trim().is_empty()) {
        return Err(Error::Config(format!("check '{}' has no anchor", c.name)));
    }
    let path = dir.join("report.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    for c in checks {
        let row = ReportRow {
            name: &c.name,
            measured: join(&c.measured),
            reference: join(&c.reference),
            tol: c.tolerance,
            pass: c.pass,
            anchor: &c.anchor,
        };
        w.serialize(row).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    let mut text = String::new();
    for c in checks {
        let _ = writeln!(text, "{}", c.summary_line());
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    let _ = writeln!(text, "{passed}/{} checks passed", checks.len());
    let summary = dir.join("summary.txt");
    fs::write(&summary, text).map_err(|e| Error::io(&summary, e))
}
