use std::f64::consts::PI;

use csvortex::geometry::{Field, TorusGrid, Vortex, VortexSet};
use csvortex::torus::{monotone_solve, newton_solve, MonotoneOptions, NewtonOptions, TorusProblem};

fn shared_problem(n: usize, eps: f64) -> TorusProblem {
    let grid = TorusGrid::square(2.0, n, 0.2).unwrap();
    TorusProblem::new(&grid, &VortexSet::shared([1.0, 1.0], [1, 1]), eps).unwrap()
}

fn smooth(grid: &TorusGrid, phase: f64) -> Field {
    let [l1, l2] = grid.lengths();
    grid.sample(|x| (2.0 * PI * x[0] / l1 + phase).sin() * (2.0 * PI * x[1] / l2).cos())
}

#[test]
fn newton_from_monotone_output_stays_put() {
    let p = shared_problem(128, 0.1);
    let (mono, _) = monotone_solve(&p, &MonotoneOptions::default()).unwrap();
    let (newton, report) = newton_solve(&p, &mono, &NewtonOptions::default()).unwrap();
    assert!(report.iterations <= 3, "{} iterations", report.iterations);
    assert!(newton.distance(&mono) <= 1e-8);
}

#[test]
fn perturbed_start_returns_to_maximal_solution() {
    let p = shared_problem(128, 0.05);
    let (mono, _) = monotone_solve(&p, &MonotoneOptions::default()).unwrap();
    let mut init = mono.clone();
    init.u[0].axpy(0.05, &smooth(p.grid(), 0.3));
    init.u[1].axpy(-0.05, &smooth(p.grid(), 1.1));
    let (back, _) = newton_solve(&p, &init, &NewtonOptions::default()).unwrap();
    assert!(back.distance(&mono) <= 1e-8, "distance {:e}", back.distance(&mono));
}

#[test]
fn flux_follows_vortex_counts() {
    let grid = TorusGrid::square(2.0, 128, 0.2).unwrap();
    let set = VortexSet::new([
        Vortex { point: [0.5, 0.5], component: 0, multiplicity: 2 },
        Vortex { point: [1.3, 1.4], component: 1, multiplicity: 1 },
    ])
    .unwrap();
    let p = TorusProblem::new(&grid, &set, 0.1).unwrap();
    let (pair, report) = monotone_solve(&p, &MonotoneOptions::default()).unwrap();
    let flux = p.flux(&pair).unwrap();
    for (f, target) in flux.iter().zip([8.0 * PI, 4.0 * PI]) {
        assert!((f - target).abs() <= 1e-3 * target, "{flux:?}");
    }
    assert_eq!(report.flux, flux);
}

#[test]
fn swapped_problem_gives_swapped_solution() {
    let grid = TorusGrid::square(2.0, 64, 0.2).unwrap();
    let set = VortexSet::new([
        Vortex { point: [0.5, 0.7], component: 0, multiplicity: 2 },
        Vortex { point: [1.25, 1.5], component: 1, multiplicity: 1 },
    ])
    .unwrap();
    let p = TorusProblem::new(&grid, &set, 0.2).unwrap();
    let (a, _) = monotone_solve(&p, &MonotoneOptions::default()).unwrap();
    let (b, _) = monotone_solve(&p.swapped(), &MonotoneOptions::default()).unwrap();
    assert_eq!(a.swapped(), b);
}

#[test]
fn converged_solution_is_critical_for_the_action() {
    let p = shared_problem(128, 0.1);
    let (pair, _) = monotone_solve(&p, &MonotoneOptions::default()).unwrap();
    let phi = smooth(p.grid(), 0.7);
    let at = |t: f64| {
        let mut q = pair.clone();
        q.u[0].axpy(t, &phi);
        q.u[1].axpy(t, &phi);
        p.energy(&q).unwrap()
    };
    let h = 1e-4;
    let slope = (at(h) - at(-h)) / (2.0 * h);
    let norm = p.grid().integrate(&phi.map(|v| v * v)).sqrt();
    assert!(slope.abs() <= 1e-6 * norm, "slope {slope:e}");
}

#[test]
fn solution_converges_under_grid_refinement() {
    let coarse = shared_problem(64, 0.2);
    let fine = shared_problem(128, 0.2);
    let (a, _) = monotone_solve(&coarse, &MonotoneOptions::default()).unwrap();
    let (b, _) = monotone_solve(&fine, &MonotoneOptions::default()).unwrap();
    // means are grid-independent to leading order
    let (ma, mb) = (coarse.means(&a).unwrap(), fine.means(&b).unwrap());
    for i in 0..2 {
        assert!((ma[i] - mb[i]).abs() < 1e-3 * ma[i].abs().max(1.0), "{ma:?} {mb:?}");
    }
}
