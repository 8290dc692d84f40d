use std::fmt::Write as _;

use log::info;
use rayon::prelude::*;

use super::limits::ball_masses;
use crate::error::{Error, Result};
use crate::geometry::{Field, TorusGrid, VortexSet};
use crate::torus::{monotone_solve, FieldPair, MonotoneOptions, SolverReport, TorusProblem};

#[derive(Clone, Debug, PartialEq)]
pub enum EntryStatus {
    Converged,
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct SweepEntry {
    pub eps: f64,
    pub status: EntryStatus,
    pub report: Option<SolverReport>,
    /// Regular form of the solution.
    pub pair: Option<FieldPair>,
    /// Full form `u₀ᵢ + uᵢ`, `-∞` at vortex grid points.
    pub full: Option<[Field; 2]>,
}

impl SweepEntry {
    pub fn converged(&self) -> bool {
        self.status == EntryStatus::Converged
    }
}

/// Per-ε monotone solutions on one grid and vortex configuration.
#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub grid: TorusGrid,
    pub vortices: VortexSet,
    pub entries: Vec<SweepEntry>,
}

impl SweepRecord {
    pub fn ladder(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.eps).collect()
    }

    /// Converged entries in ladder order.
    pub fn converged(&self) -> Vec<&SweepEntry> {
        self.entries.iter().filter(|e| e.converged()).collect()
    }

    /// CSV summary, one row per ε, with ball masses of radius `radius`
    /// around every vortex site.
    pub fn to_csv(&self, radius: f64) -> String {
        let sites = self.vortices.sites();
        let mut s = String::from("eps,status,classification,iterations,residual,excised_sup,mean1,mean2,flux1,flux2,energy");
        for k in 0..sites.len() {
            let _ = write!(s, ",site{k}_mass1,site{k}_mass2,site{k}_mixed");
        }
        s.push('\n');
        for e in &self.entries {
            let status = match &e.status {
                EntryStatus::Converged => "converged".to_string(),
                EntryStatus::Failed(msg) => format!("failed: {}", msg.replace(',', ";")),
            };
            let _ = write!(s, "{:?},{status}", e.eps);
            match &e.report {
                Some(r) => {
                    let _ = write!(
                        s,
                        ",{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                        r.classification, r.iterations, r.residual, r.excised_sup, r.means[0], r.means[1], r.flux[0], r.flux[1], r.energy
                    );
                }
                None => s.push_str(",,,,,,,,,"),
            }
            for site in &sites {
                match &e.full {
                    Some(full) => {
                        let m = ball_masses(&self.grid, full, e.eps, site.point, radius);
                        let _ = write!(s, ",{:?},{:?},{:?}", m[0], m[1], m[2]);
                    }
                    None => s.push_str(",,,"),
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Runs the monotone solver for each ε of a strictly decreasing ladder, in
/// parallel. Classification uses `T_{2δ}`. A failed solve is recorded in
/// its entry and does not abort the sweep.
pub fn epsilon_sweep(
    grid: &TorusGrid,
    vortices: &VortexSet,
    ladder: &[f64],
    delta: f64,
    opts: &MonotoneOptions,
) -> Result<SweepRecord> {
    if ladder.is_empty() {
        return Err(Error::InvalidArgument("ε ladder is empty".into()));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) || ladder.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument(format!("ε ladder must be positive and strictly decreasing: {ladder:?}")));
    }
    let grid = grid.with_delta(delta)?;
    let entries = ladder
        .par_iter()
        .map(|&eps| {
            let solved = TorusProblem::new(&grid, vortices, eps).and_then(|p| {
                let (pair, report) = monotone_solve(&p, opts)?;
                let full = p.full(&pair)?.u;
                Ok((pair, report, full))
            });
            match solved {
                Ok((pair, report, full)) => {
                    info!("sweep ε={eps}: {} after {} sweeps", report.classification, report.iterations);
                    SweepEntry { eps, status: EntryStatus::Converged, report: Some(report), pair: Some(pair), full: Some(full) }
                }
                Err(e) => SweepEntry { eps, status: EntryStatus::Failed(e.to_string()), report: None, pair: None, full: None },
            }
        })
        .collect();
    let vortices = VortexSet::on_torus(vortices.vortices().iter().copied(), grid.lengths())?;
    Ok(SweepRecord { grid, vortices, entries })
}
