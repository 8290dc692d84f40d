use std::fs;

use log::{info, warn};

use super::{Command, RunConfig};
use crate::analysis::{
    check_concentration, check_decay, check_flux, check_nondegeneracy, check_radial_integrals, check_rescaling,
    check_smallness, check_zero_base_order, epsilon_sweep, uniqueness_experiment, write_report, CheckResult, Comparison,
    EntryStatus, SweepRecord, UniquenessOptions, CONCENTRATION_RADIUS,
};
use crate::error::{Error, Result};
use crate::geometry::{TorusGrid, VortexSet};
use crate::linearization::{mode_records, smallest_modes, write_modes_csv, LinearizedOperator, ModeOptions};
use crate::radial::{radial_integrals, solve_radial, RadialOptions, RadialSolution, MIN_RADIUS};
use crate::torus::{monotone_solve, Classification, MonotoneOptions, NewtonOptions, TorusProblem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_SOLVER_FAILED: i32 = 2;

/// Start of the fitted tail for the decay check.
const DECAY_R_MIN: f64 = 8.0;
/// Chart radius for the rescaled matching.
const RESCALING_R0: f64 = 0.25;
const ZERO_BASE_RADIUS: f64 = 20.0;
const ZERO_BASE_MESHES: [usize; 4] = [64, 128, 256, 512];
const MODES_PER_M: usize = 3;
const ANGULAR_MODES: u32 = 2;

enum Outcome {
    Done,
    Checks(Vec<CheckResult>),
}

/// Runs the pipeline of `config.command`, writing everything under
/// `config.out`. Returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    let result = fs::create_dir_all(&config.out)
        .map_err(|e| Error::io(&config.out, e))
        .and_then(|_| config.echo())
        .and_then(|_| match config.command {
            Command::SolveTorus => solve_torus(config),
            Command::SolveRadial => solve_radial_cmd(config),
            Command::Verify => verify(config),
            Command::Sweep => sweep(config),
            Command::Modes => modes(config),
            Command::Uniqueness => uniqueness(config),
        });
    match result {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::Checks(checks)) => {
            for c in &checks {
                println!("{}", c.summary_line());
            }
            if checks.iter().all(|c| c.pass) {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_SOLVER_FAILED
        }
    }
}

fn grid(config: &RunConfig) -> Result<TorusGrid> {
    TorusGrid::square(config.l, config.n, config.delta)
}

/// Vortices from the file, or one shared vortex at the centre with
/// multiplicities `(nu1, nu2)`.
fn vortices(config: &RunConfig) -> Result<VortexSet> {
    let lengths = [config.l, config.l];
    match &config.vortices {
        Some(path) => VortexSet::on_torus(VortexSet::read(path)?, lengths),
        None => Ok(VortexSet::shared([0.5 * config.l, 0.5 * config.l], [config.nu1, config.nu2])),
    }
}

fn monotone_opts(config: &RunConfig) -> MonotoneOptions {
    MonotoneOptions { tol: config.tol, ..Default::default() }
}

fn radial_opts(config: &RunConfig) -> RadialOptions {
    RadialOptions { tol: config.tol, ..Default::default() }
}

fn eps_tag(eps: f64) -> String {
    format!("{eps}").replace('.', "p")
}

fn solve_torus(config: &RunConfig) -> Result<Outcome> {
    let eps = config.eps.expect("resolved eps");
    let problem = TorusProblem::new(&grid(config)?, &vortices(config)?, eps)?;
    let (pair, report) = monotone_solve(&problem, &monotone_opts(config))?;
    info!("solve-torus ε={eps}: {} in {} sweeps", report.classification, report.iterations);
    pair.write(problem.grid(), &config.out_path("solution.field"))?;
    report.write(&config.out_path("report.txt"))?;
    Ok(Outcome::Done)
}

fn radial_summary(sol: &RadialSolution) -> String {
    let ints = radial_integrals(sol);
    format!(
        "radius={:?}\nmesh={}\niterations={}\nresidual={:?}\ni12={:?}\ni1={:?}\ni2={:?}\n",
        sol.radius(),
        sol.mesh.intervals(),
        sol.iterations,
        sol.residual,
        ints.i12,
        ints.i[0],
        ints.i[1]
    )
}

fn solve_radial_cmd(config: &RunConfig) -> Result<Outcome> {
    let sol = solve_radial([config.nu1, config.nu2], config.r, config.mesh, &radial_opts(config))?;
    sol.write_csv(&config.out_path("profile.csv"))?;
    let path = config.out_path("radial_report.txt");
    fs::write(&path, radial_summary(&sol)).map_err(|e| Error::io(&path, e))?;
    Ok(Outcome::Done)
}

fn write_sweep(config: &RunConfig, record: &SweepRecord) -> Result<()> {
    let path = config.out_path("sweep.csv");
    fs::write(&path, record.to_csv(CONCENTRATION_RADIUS)).map_err(|e| Error::io(&path, e))?;
    for e in &record.entries {
        if let Some(pair) = &e.pair {
            pair.write(&record.grid, &config.out_path(&format!("solution_eps{}.field", eps_tag(e.eps))))?;
        }
    }
    Ok(())
}

fn run_sweep(config: &RunConfig) -> Result<SweepRecord> {
    let ladder = config.ladder.as_ref().expect("resolved ladder");
    let record = epsilon_sweep(&grid(config)?, &vortices(config)?, ladder, config.delta, &monotone_opts(config))?;
    write_sweep(config, &record)?;
    Ok(record)
}

fn first_failure(record: &SweepRecord) -> Option<Error> {
    record.entries.iter().find_map(|e| match &e.status {
        EntryStatus::Failed(msg) => Some(Error::InvalidArgument(format!("sweep entry ε={} failed: {msg}", e.eps))),
        EntryStatus::Converged => None,
    })
}

fn sweep(config: &RunConfig) -> Result<Outcome> {
    let record = run_sweep(config)?;
    match first_failure(&record) {
        Some(e) => Err(e),
        None => Ok(Outcome::Done),
    }
}

fn modes(config: &RunConfig) -> Result<Outcome> {
    let sol = solve_radial([config.nu1, config.nu2], config.r, config.mesh, &radial_opts(config))?;
    let opts = ModeOptions { seed: config.seed, ..Default::default() };
    let mut records = Vec::new();
    for m in 0..=ANGULAR_MODES {
        let op = LinearizedOperator::radial(&sol, m, config.tol)?;
        let modes = smallest_modes(&op, MODES_PER_M, &opts)?;
        records.extend(mode_records(&op, &modes));
    }
    write_modes_csv(&config.out_path("modes.csv"), &records)?;
    Ok(Outcome::Done)
}

fn uniqueness_opts(config: &RunConfig) -> UniquenessOptions {
    UniquenessOptions {
        starts: config.starts,
        seed: config.seed,
        newton: NewtonOptions { tol: config.tol, ..Default::default() },
        monotone: monotone_opts(config),
        ..Default::default()
    }
}

/// Runs the experiment and writes `uniqueness.csv`; a second cluster is
/// kept as field files of each cluster representative.
fn run_uniqueness(config: &RunConfig, grid: &TorusGrid, vortices: &VortexSet, eps: f64) -> Result<Vec<CheckResult>> {
    let problem = TorusProblem::new(grid, vortices, eps)?;
    let outcome = uniqueness_experiment(&problem, &uniqueness_opts(config))?;
    let path = config.out_path("uniqueness.csv");
    fs::write(&path, outcome.to_text()).map_err(|e| Error::io(&path, e))?;
    if outcome.clusters.len() > 1 {
        warn!("uniqueness: {} clusters, writing counterexample fields", outcome.clusters.len());
        for (k, c) in outcome.clusters.iter().enumerate() {
            let rep = outcome.solutions[c[0]].as_ref().expect("clustered start converged");
            rep.write(grid, &config.out_path(&format!("counterexample_cluster{k}.field")))?;
        }
    }
    Ok(outcome.checks)
}

fn uniqueness(config: &RunConfig) -> Result<Outcome> {
    let eps = config.eps.expect("resolved eps");
    let checks = run_uniqueness(config, &grid(config)?, &vortices(config)?, eps)?;
    write_report(&config.out, &checks)?;
    Ok(Outcome::Checks(checks))
}

/// Every torus, radial and linearisation check on the configured scenario.
fn verify(config: &RunConfig) -> Result<Outcome> {
    let record = run_sweep(config)?;
    if let Some(e) = first_failure(&record) {
        return Err(e);
    }
    let mut checks = Vec::new();
    for e in &record.entries {
        let problem = TorusProblem::new(&record.grid, &record.vortices, e.eps)?;
        let mut flux = check_flux(&problem, e.pair.as_ref().expect("converged entry"))?;
        flux.name = format!("flux eps={}", e.eps);
        checks.push(flux);
    }
    let topological = record
        .entries
        .iter()
        .map(|e| f64::from(u8::from(e.report.as_ref().is_some_and(|r| r.classification == Classification::Topological))))
        .collect::<Vec<_>>();
    let ones = vec![1.0; topological.len()];
    checks.push(CheckResult::new(
        "sweep classified topological",
        "maximal solution is topological",
        topological,
        ones,
        0.0,
        Comparison::AtLeast,
    ));
    checks.extend(check_smallness(&record, config.delta)?);
    checks.extend(check_concentration(&record, CONCENTRATION_RADIUS)?);

    let nu = [config.nu1, config.nu2];
    let base = solve_radial(nu, config.r, config.mesh, &radial_opts(config))?;
    if let Some(site) = record.vortices.sites().first() {
        let matched = if site.nu == nu { base.clone() } else { solve_radial(site.nu, config.r, config.mesh, &radial_opts(config))? };
        checks.extend(check_rescaling(&record, &matched, site.point, RESCALING_R0)?);
    }
    checks.push(check_radial_integrals(&base));
    if nu != [0, 0] {
        checks.extend(check_decay(&base, DECAY_R_MIN)?);
        let radii = [(config.r - 5.0).max(MIN_RADIUS), config.r + 5.0];
        let (_, nondeg) = check_nondegeneracy(nu, (config.r, config.mesh / 2), &radii)?;
        checks.push(nondeg);
    }
    checks.push(check_zero_base_order(ZERO_BASE_RADIUS, &ZERO_BASE_MESHES)?);

    let smallest = *record.ladder().last().expect("non-empty ladder");
    checks.extend(run_uniqueness(config, &record.grid, &record.vortices, smallest)?);
    write_report(&config.out, &checks)?;
    Ok(Outcome::Checks(checks))
}
