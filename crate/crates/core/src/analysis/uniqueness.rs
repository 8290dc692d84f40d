use std::f64::consts::PI;
use std::fmt::Write as _;

use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{CheckResult, Comparison};
use crate::error::{Error, Result};
use crate::geometry::{Field, TorusGrid};
use crate::torus::{monotone_solve, newton_solve, FieldPair, MonotoneOptions, NewtonOptions, TorusProblem};

/// Solutions closer than this in `∞`-distance belong to one cluster.
pub const CLUSTER_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct UniquenessOptions {
    pub starts: usize,
    pub seed: u64,
    /// Perturbation amplitudes are drawn uniformly from this range.
    pub amplitude: (f64, f64),
    /// Largest Fourier index of the smooth perturbations.
    pub modes: i32,
    pub newton: NewtonOptions,
    pub monotone: MonotoneOptions,
}

impl Default for UniquenessOptions {
    fn default() -> Self {
        UniquenessOptions {
            starts: 10,
            seed: 1,
            amplitude: (0.05, 0.5),
            modes: 3,
            newton: NewtonOptions::default(),
            monotone: MonotoneOptions::default(),
        }
    }
}

/// Reproducibility data for one Newton start.
#[derive(Clone, Debug)]
pub struct StartRecord {
    pub index: usize,
    pub seed: u64,
    pub amplitude: f64,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct UniquenessOutcome {
    pub monotone: FieldPair,
    pub solutions: Vec<Option<FieldPair>>,
    pub starts: Vec<StartRecord>,
    /// Start indices grouped by `∞`-distance below [`CLUSTER_TOL`].
    pub clusters: Vec<Vec<usize>>,
    pub max_pairwise: f64,
    pub distance_to_monotone: f64,
    pub checks: Vec<CheckResult>,
}

impl UniquenessOutcome {
    /// Text record of every start and cluster, for counterexample artifacts.
    pub fn to_text(&self) -> String {
        let mut s = String::from("index,seed,amplitude,iterations,residual,error\n");
        for r in &self.starts {
            let _ = writeln!(
                s,
                "{},{},{:?},{},{},{}",
                r.index,
                r.seed,
                r.amplitude,
                r.iterations.map_or(String::new(), |i| i.to_string()),
                r.residual.map_or(String::new(), |v| format!("{v:?}")),
                r.error.as_deref().unwrap_or("").replace(',', ";")
            );
        }
        for (k, c) in self.clusters.iter().enumerate() {
            let _ = writeln!(s, "# cluster {k}: starts {c:?}");
        }
        s
    }
}

/// A smooth field in `[0, 1]` from random low Fourier modes.
fn smooth_bump(grid: &TorusGrid, rng: &mut ChaCha8Rng, modes: i32) -> Field {
    let [l1, l2] = grid.lengths();
    let mut terms = Vec::new();
    for k1 in -modes..=modes {
        for k2 in 0..=modes {
            if k2 == 0 && k1 <= 0 {
                continue;
            }
            terms.push((k1 as f64, k2 as f64, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0 * PI)));
        }
    }
    let s = grid.sample(|x| {
        terms
            .iter()
            .map(|&(k1, k2, a, phase)| a * (2.0 * PI * (k1 * x[0] / l1 + k2 * x[1] / l2) + phase).cos())
            .sum()
    });
    let scale = s.sup_norm().max(f64::MIN_POSITIVE);
    s.map(|v| 0.5 * (1.0 + v / scale))
}

/// Newton solves from `starts` random initialisations below the maximal
/// solution, `uᵢ - A·φᵢ` with smooth `0 ≤ φᵢ ≤ 1`, compared pairwise and
/// with the monotone-scheme solution.
pub fn uniqueness_experiment(problem: &TorusProblem, opts: &UniquenessOptions) -> Result<UniquenessOutcome> {
    if opts.starts < 2 {
        return Err(Error::InvalidArgument(format!("uniqueness experiment needs at least 2 starts, got {}", opts.starts)));
    }
    let (monotone, _) = monotone_solve(problem, &opts.monotone)?;
    let grid = problem.grid();
    let mut master = ChaCha8Rng::seed_from_u64(opts.seed);
    let seeds: Vec<u64> = (0..opts.starts).map(|_| master.gen()).collect();
    let results: Vec<(StartRecord, Option<FieldPair>)> = seeds
        .par_iter()
        .enumerate()
        .map(|(index, &seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let amplitude = rng.gen_range(opts.amplitude.0..=opts.amplitude.1);
            let mut init = monotone.clone();
            for i in 0..2 {
                let bump = smooth_bump(grid, &mut rng, opts.modes);
                init.u[i].axpy(-amplitude, &bump);
            }
            let mut record = StartRecord { index, seed, amplitude, iterations: None, residual: None, error: None };
            match newton_solve(problem, &init, &opts.newton) {
                Ok((pair, report)) => {
                    record.iterations = Some(report.iterations);
                    record.residual = Some(report.residual);
                    (record, Some(pair))
                }
                Err(e) => {
                    warn!("uniqueness start {index} failed: {e}");
                    record.error = Some(e.to_string());
                    (record, None)
                }
            }
        })
        .collect();
    let (starts, solutions): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let failed = solutions.iter().filter(|s| s.is_none()).count();
    if 2 * failed > opts.starts {
        return Err(Error::TooManyFailures { failed, total: opts.starts });
    }
    let ok: Vec<(usize, &FieldPair)> = solutions.iter().enumerate().filter_map(|(i, s)| s.as_ref().map(|p| (i, p))).collect();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut max_pairwise = 0.0f64;
    for (a, &(i, p)) in ok.iter().enumerate() {
        for &(_, q) in &ok[a + 1..] {
            max_pairwise = max_pairwise.max(p.distance(q));
        }
        match clusters.iter_mut().find(|c| solutions[c[0]].as_ref().unwrap().distance(p) <= CLUSTER_TOL) {
            Some(c) => c.push(i),
            None => clusters.push(vec![i]),
        }
    }
    let distance_to_monotone = ok.iter().map(|(_, p)| p.distance(&monotone)).fold(0.0, f64::max);
    info!("uniqueness: {} clusters, max pairwise {max_pairwise:.2e}, to monotone {distance_to_monotone:.2e}", clusters.len());
    let checks = vec![
        CheckResult::new("uniqueness single cluster", "uniqueness of the maximal solution", vec![max_pairwise], vec![CLUSTER_TOL], 0.0, Comparison::AtMost),
        CheckResult::new("uniqueness matches monotone", "uniqueness of the maximal solution", vec![distance_to_monotone], vec![CLUSTER_TOL], 0.0, Comparison::AtMost),
    ];
    Ok(UniquenessOutcome { monotone, solutions, starts, clusters, max_pairwise, distance_to_monotone, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::VortexSet;

    #[test]
    fn single_start_is_rejected() {
        let grid = TorusGrid::square(1.0, 16, 0.1).unwrap();
        let p = TorusProblem::new(&grid, &VortexSet::empty(), 0.1).unwrap();
        let opts = UniquenessOptions { starts: 1, ..Default::default() };
        assert!(uniqueness_experiment(&p, &opts).is_err());
    }

    #[test]
    fn bumps_are_smooth_and_bounded() {
        let grid = TorusGrid::square(2.0, 32, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = smooth_bump(&grid, &mut rng, 3);
        assert!(b.iter().all(|&v| (0.0..=1.0 + 1e-15).contains(&v)));
        assert!(b.iter().any(|&v| v > 0.99) && b.iter().any(|&v| v < 0.01));
    }
}
