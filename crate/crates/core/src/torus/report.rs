use std::fmt;
use std::fs;
use std::path::Path;

use super::NON_TOPOLOGICAL_MEAN;
use crate::error::{Error, Result};

/// Dichotomy label of a solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Topological,
    NonTopologicalCandidate,
    /// Converged, but neither small on `T_{2δ}` nor with mean below the
    /// non-topological cutoff.
    Undetermined,
    Diverged,
}

impl Classification {
    pub fn of(converged: bool, excised_sup: f64, means: [f64; 2], threshold: f64) -> Self {
        if !converged {
            Classification::Diverged
        } else if excised_sup < threshold {
            Classification::Topological
        } else if means.iter().all(|&d| d < NON_TOPOLOGICAL_MEAN) {
            Classification::NonTopologicalCandidate
        } else {
            Classification::Undetermined
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Classification::Topological => "topological",
            Classification::NonTopologicalCandidate => "non-topological-candidate",
            Classification::Undetermined => "undetermined",
            Classification::Diverged => "diverged",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverReport {
    pub iterations: usize,
    /// Sup norm of the residual at the returned iterate.
    pub residual: f64,
    pub classification: Classification,
    pub flux: [f64; 2],
    pub energy: f64,
    /// `max_i sup |uᵢ|` of the full solution on `T_{2δ}`.
    pub excised_sup: f64,
    pub means: [f64; 2],
    /// Largest pointwise increase per monotone sweep (≤ 0 up to roundoff).
    pub monotonicity: Vec<f64>,
    /// Energy per iterate; logged only, the functional is indefinite.
    pub energy_log: Vec<f64>,
    pub residual_trace: Vec<f64>,
}

impl SolverReport {
    /// `key=value` lines. The first six keys are stable.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        };
        kv("iterations", self.iterations.to_string());
        kv("residual", format!("{:?}", self.residual));
        kv("classification", self.classification.to_string());
        kv("flux1", format!("{:?}", self.flux[0]));
        kv("flux2", format!("{:?}", self.flux[1]));
        kv("energy", format!("{:?}", self.energy));
        kv("excised_sup", format!("{:?}", self.excised_sup));
        kv("mean1", format!("{:?}", self.means[0]));
        kv("mean2", format!("{:?}", self.means[1]));
        if let Some(m) = self.monotonicity.iter().copied().reduce(f64::max) {
            kv("max_monotone_increase", format!("{m:?}"));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Parses `key=value` lines into pairs, skipping blanks and `#` comments.
pub fn parse_key_values(text: &str) -> Vec<(String, String)> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once('=').map(|(k, v)| (k.trim().to_string(), v.trim().to_string())))
        .collect()
}
