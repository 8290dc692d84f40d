//! Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use common::properties::*;
use common::shooting::oracle_deviation;
use csvortex::analysis::{
    ball_masses, check_concentration, check_decay, check_flux, check_nondegeneracy, check_radial_integrals,
    check_rescaling, check_smallness, check_zero_base_order, epsilon_sweep, uniqueness_experiment, CheckResult,
    Comparison, SweepRecord, UniquenessOptions, CONCENTRATION_RADIUS,
};
use csvortex::geometry::{TorusGrid, VortexSet};
use csvortex::radial::{radial_integrals, solve_radial, RadialOptions, RadialSolution};
use csvortex::torus::{monotone_solve, MonotoneOptions, TorusProblem};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const LADDER: [f64; 3] = [0.2, 0.1, 0.05];
/// Torus for the ε ladder: side 2, 256², vortex shared at the centre.
const SIDE: f64 = 2.0;
const CENTRE: [f64; 2] = [1.0, 1.0];
/// Excision radius of the sweep grid (classification on `T_{2δ}`).
const SWEEP_DELTA: f64 = 0.5;
const SMALLNESS_DELTA: f64 = 0.2;

type Outcome = Result<(Vec<CheckResult>, String), String>;

fn passed(checks: &[CheckResult]) -> bool {
    checks.iter().all(|c| c.pass)
}

fn radial(nu: [u32; 2], radius: f64, mesh: usize) -> Result<RadialSolution, String> {
    solve_radial(nu, radius, mesh, &RadialOptions::default()).map_err(|e| e.to_string())
}

fn flux_quantization() -> Outcome {
    let start = Instant::now();
    let l = 2.0 * PI;
    let grid = TorusGrid::square(l, 256, 0.2).map_err(|e| e.to_string())?;
    let p = TorusProblem::new(&grid, &VortexSet::shared([0.5 * l, 0.5 * l], [1, 1]), 0.1).map_err(|e| e.to_string())?;
    let (pair, _) = monotone_solve(&p, &MonotoneOptions::default()).map_err(|e| e.to_string())?;
    let flux = check_flux(&p, &pair).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let detail = format!("flux/4π = ({:.7}, {:.7}) in {secs:.1} s", flux.measured[0] / (4.0 * PI), flux.measured[1] / (4.0 * PI));
    let time = CheckResult::new("runtime", "desk-scale runtime", vec![secs], vec![60.0], 0.0, Comparison::AtMost);
    Ok((vec![flux, time], detail))
}

fn integral_identities(base: &RadialSolution) -> Outcome {
    let other = radial([2, 1], 25.0, 2000)?;
    let checks = vec![check_radial_integrals(base), check_radial_integrals(&other)];
    let over = |c: &CheckResult| c.measured.iter().map(|m| format!("{:.6}", m / (4.0 * PI))).collect::<Vec<_>>().join(", ");
    let detail = format!("I/4π = ({}) for ν=(1,1), ({}) for ν=(2,1)", over(&checks[0]), over(&checks[1]));
    Ok((checks, detail))
}

fn decay_law(base: &RadialSolution) -> Outcome {
    let checks = check_decay(base, 8.0).map_err(|e| e.to_string())?;
    let detail = format!("rate {:.4}, power {:.3}", checks[0].measured[0], checks[1].measured[0]);
    Ok((checks, detail))
}

fn symmetric_reduction(base: &RadialSolution) -> Outcome {
    let sym = base.u[0].iter().zip(&base.u[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let dev = oracle_deviation(base);
    let checks = vec![
        CheckResult::new("u1 = u2", "symmetric reduction", vec![sym], vec![1e-9], 0.0, Comparison::AtMost),
        CheckResult::new("shooting oracle", "symmetric reduction", vec![dev], vec![1e-6], 0.0, Comparison::AtMost),
    ];
    Ok((checks, format!("|u1-u2| = {sym:.1e}, oracle deviation {dev:.1e}")))
}

fn smallness(sweep: &SweepRecord) -> Outcome {
    let checks = check_smallness(sweep, SMALLNESS_DELTA).map_err(|e| e.to_string())?;
    let ratio = checks[0].measured.iter().copied().fold(0.0, f64::max);
    let slack = checks[1].measured.iter().zip(&checks[1].reference).map(|(m, r)| m / r).fold(0.0, f64::max);
    Ok((checks, format!("max ratio per halving {ratio:.3e}, max L1/bound {slack:.3}")))
}

fn concentration(sweep: &SweepRecord, base: &RadialSolution) -> Outcome {
    let mut checks = check_concentration(sweep, CONCENTRATION_RADIUS).map_err(|e| e.to_string())?;
    // against the entire solution: component mass I₁ - I₁₂, mixed mass 2I₁₂
    let ints = radial_integrals(base);
    let last = sweep.entries.last().and_then(|e| e.full.as_ref()).ok_or("smallest ε did not converge")?;
    let m = ball_masses(&sweep.grid, last, LADDER[2], CENTRE, CONCENTRATION_RADIUS);
    checks.push(CheckResult::new(
        "ball masses vs radial integrals",
        "weak concentration of the source measure",
        m.to_vec(),
        vec![ints.i[0] - ints.i12, ints.i[1] - ints.i12, 2.0 * ints.i12],
        0.03,
        Comparison::Relative,
    ));
    let detail = format!("ε=0.05, r=1/2: masses/4π = ({:.4}, {:.4}), mixed/8π = {:.4}", m[0] / (4.0 * PI), m[1] / (4.0 * PI), m[2] / (8.0 * PI));
    Ok((checks, detail))
}

fn rescaled_matching(sweep: &SweepRecord, base: &RadialSolution) -> Outcome {
    let checks = check_rescaling(sweep, base, CENTRE, 0.25).map_err(|e| e.to_string())?;
    let m_last = checks[1].measured[0];
    let detail = format!("m steps {:.2e}, {:.2e}; m(0.05) = {m_last:.2e}", checks[0].measured[0], checks[0].measured[1]);
    Ok((checks, detail))
}

fn nondegeneracy() -> Outcome {
    let (sigmas, stable) = check_nondegeneracy([1, 1], (25.0, 1000), &[20.0, 30.0]).map_err(|e| e.to_string())?;
    let order = check_zero_base_order(20.0, &[64, 128, 256, 512]).map_err(|e| e.to_string())?;
    let lo = sigmas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sigmas.iter().copied().fold(0.0, f64::max);
    let min_order = order.measured.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((vec![stable, order], format!("σ_min in [{lo:.7}, {hi:.7}], zero-base order ≥ {min_order:.2}")))
}

fn uniqueness() -> Outcome {
    let grid = TorusGrid::square(SIDE, 256, SWEEP_DELTA).map_err(|e| e.to_string())?;
    let p = TorusProblem::new(&grid, &VortexSet::shared(CENTRE, [1, 1]), 0.05).map_err(|e| e.to_string())?;
    let first = uniqueness_experiment(&p, &UniquenessOptions::default()).map_err(|e| e.to_string())?;
    let second = uniqueness_experiment(&p, &UniquenessOptions { seed: 2, ..Default::default() }).map_err(|e| e.to_string())?;
    let rep = |o: &csvortex::analysis::UniquenessOutcome| o.solutions.iter().flatten().next().cloned();
    let across = match (rep(&first), rep(&second)) {
        (Some(a), Some(b)) => a.distance(&b),
        _ => f64::INFINITY,
    };
    let mut checks = first.checks.clone();
    checks.push(CheckResult::new("seed-varied cluster", "uniqueness of the maximal solution", vec![across], vec![1e-8], 0.0, Comparison::AtMost));
    let detail = format!(
        "{} cluster(s), max pairwise {:.1e}, to monotone {:.1e}, across seeds {across:.1e}",
        first.clusters.len(),
        first.max_pairwise,
        first.distance_to_monotone
    );
    Ok((checks, detail))
}

fn property_suite() -> Outcome {
    let mut failures = Vec::new();
    let mut run = |name: &str, cases: u32, f: &mut dyn FnMut(&mut TestRunner) -> Result<(), String>| {
        let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
        if let Err(e) = f(&mut runner) {
            failures.push(format!("{name}: {e}"));
        }
    };
    run("monotone decrease and u <= 0", 6, &mut |r| {
        r.run(&problem_strategy(), |(p, nu, eps)| monotone_and_nonpositive(p, nu, eps).map_err(TestCaseError::fail)).map_err(|e| e.to_string())
    });
    run("swap equivariance", 6, &mut |r| {
        r.run(&problem_strategy(), |(p, nu, eps)| swap_exact(p, nu, eps).map_err(TestCaseError::fail)).map_err(|e| e.to_string())
    });
    run("Green mean", 64, &mut |r| {
        r.run(&(grid_strategy(), [0.0..1.0f64, 0.0..1.0f64]), |(g, q)| green_mean_zero(g, q).map_err(TestCaseError::fail))
            .map_err(|e| e.to_string())
    });
    run("Poisson round trip", 64, &mut |r| {
        r.run(&(grid_strategy(), modes_strategy()), |(g, c)| poisson_round_trip(g, c).map_err(TestCaseError::fail))
            .map_err(|e| e.to_string())
    });
    let n = failures.len();
    let check = CheckResult::new("property failures", "property suite", vec![n as f64], vec![0.0], 0.0, Comparison::AtMost);
    let detail = if failures.is_empty() { "4 properties held".to_string() } else { failures.join("; ") };
    Ok((vec![check], detail))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let base = radial([1, 1], 25.0, 2000);
    let sweep = TorusGrid::square(SIDE, 256, SWEEP_DELTA).map_err(|e| e.to_string()).and_then(|g| {
        epsilon_sweep(&g, &VortexSet::shared(CENTRE, [1, 1]), &LADDER, SWEEP_DELTA, &MonotoneOptions::default())
            .map_err(|e| e.to_string())
    });
    let with_base = |f: &dyn Fn(&RadialSolution) -> Outcome| base.as_ref().map_err(|e| e.clone()).and_then(f);
    let with_sweep = |f: &dyn Fn(&SweepRecord) -> Outcome| sweep.as_ref().map_err(|e| e.clone()).and_then(f);
    let with_both = |f: &dyn Fn(&SweepRecord, &RadialSolution) -> Outcome| {
        sweep.as_ref().map_err(|e| e.clone()).and_then(|s| base.as_ref().map_err(|e| e.clone()).and_then(|b| f(s, b)))
    };
    let criteria: Vec<(&str, Outcome)> = vec![
        ("flux quantization", flux_quantization()),
        ("radial integral identities", with_base(&integral_identities)),
        ("decay law", with_base(&decay_law)),
        ("symmetric reduction", with_base(&symmetric_reduction)),
        ("smallness off vortices", with_sweep(&smallness)),
        ("concentration", with_both(&concentration)),
        ("rescaled matching", with_both(&rescaled_matching)),
        ("non-degeneracy", nondegeneracy()),
        ("uniqueness", uniqueness()),
        ("property suite", property_suite()),
    ];
    let mut all = true;
    for (k, (title, outcome)) in criteria.iter().enumerate() {
        match outcome {
            Ok((checks, detail)) => {
                let ok = passed(checks);
                all &= ok;
                println!("{} {:>2} {title}: {detail}", if ok { "PASS" } else { "FAIL" }, k + 1);
                for c in checks.iter().filter(|c| !c.pass) {
                    println!("       {}", c.summary_line());
                }
            }
            Err(e) => {
                all = false;
                println!("FAIL {:>2} {title}: error: {e}", k + 1);
            }
        }
    }
    println!("acceptance finished in {:.1} s", start.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
