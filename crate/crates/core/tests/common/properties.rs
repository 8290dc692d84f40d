use std::f64::consts::PI;

use csvortex::geometry::{green_function, laplacian, poisson_solve, TorusGrid, VortexSet};
use csvortex::torus::{monotone_solve, MonotoneOptions, TorusProblem};
use proptest::prelude::*;

pub type Check = Result<(), String>;

/// Random small problem: side 4, 128² grid (ε/h ≥ 6.4), shared vortex anywhere,
/// multiplicities in {0, 1, 2}, ε in [0.2, 0.25]. Larger ε approaches
/// `|T| ≈ 16πNε²`, past which the iterates drift to -∞.
pub fn problem_strategy() -> impl Strategy<Value = ([f64; 2], [u32; 2], f64)> {
    ([0.0..4.0f64, 0.0..4.0f64], [0u32..3, 0u32..3], 0.2..0.25f64).prop_map(|(p, nu, eps)| (p, nu, eps))
}

pub fn build(point: [f64; 2], nu: [u32; 2], eps: f64) -> TorusProblem {
    let grid = TorusGrid::square(4.0, 128, 0.2).unwrap();
    TorusProblem::new(&grid, &VortexSet::shared(point, nu), eps).unwrap()
}

/// Every sweep is a pointwise decrease up to the Gibbs slack, and the
/// converged full fields are non-positive.
pub fn monotone_and_nonpositive(point: [f64; 2], nu: [u32; 2], eps: f64) -> Check {
    let p = build(point, nu, eps);
    let opts = MonotoneOptions::default();
    let (pair, report) = monotone_solve(&p, &opts).map_err(|e| e.to_string())?;
    if report.monotonicity.len() != report.iterations {
        return Err(format!("{} sweeps, {} monotonicity entries", report.iterations, report.monotonicity.len()));
    }
    if let Some(rise) = report.monotonicity.iter().copied().find(|&r| r > opts.slack) {
        return Err(format!("pointwise rise {rise:e}"));
    }
    let full = p.full(&pair).map_err(|e| e.to_string())?;
    let top = full.u.iter().flat_map(|f| f.iter().copied()).fold(f64::NEG_INFINITY, f64::max);
    if top > 1e-12 {
        return Err(format!("full solution reaches {top:e}"));
    }
    Ok(())
}

/// Swapping components of the data swaps the solution bit for bit.
pub fn swap_exact(point: [f64; 2], nu: [u32; 2], eps: f64) -> Check {
    let p = build(point, nu, eps);
    let opts = MonotoneOptions::default();
    let (a, _) = monotone_solve(&p, &opts).map_err(|e| e.to_string())?;
    let (b, _) = monotone_solve(&p.swapped(), &opts).map_err(|e| e.to_string())?;
    if a.swapped() != b {
        return Err(format!("swap mismatch {:e}", a.swapped().distance(&b)));
    }
    Ok(())
}

pub fn grid_strategy() -> impl Strategy<Value = (f64, f64, usize, usize)> {
    (0.5..8.0f64, 0.5..8.0f64, 8usize..40, 8usize..40).prop_map(|(l1, l2, n1, n2)| (l1, l2, 2 * n1, 2 * n2))
}

pub fn green_mean_zero((l1, l2, n1, n2): (f64, f64, usize, usize), q: [f64; 2]) -> Check {
    let grid = TorusGrid::new(l1, l2, n1, n2, 0.0).unwrap();
    let g = green_function(&grid, [q[0] * l1, q[1] * l2]);
    let mean = g.mean();
    if mean.abs() > 1e-12 {
        return Err(format!("Green mean {mean:e}"));
    }
    Ok(())
}

/// `poisson_solve(Δ_h f) = f` for a band-limited mean-zero `f`.
pub fn poisson_round_trip((l1, l2, n1, n2): (f64, f64, usize, usize), coeffs: Vec<(i32, i32, f64, f64)>) -> Check {
    let grid = TorusGrid::new(l1, l2, n1, n2, 0.0).unwrap();
    let f = grid.sample(|x| {
        coeffs
            .iter()
            .map(|&(k1, k2, a, phase)| a * (2.0 * PI * (k1 as f64 * x[0] / l1 + k2 as f64 * x[1] / l2) + phase).cos())
            .sum()
    });
    let f = f.map(|v| v - f.mean());
    let back = poisson_solve(&grid, &laplacian(&grid, &f)).field;
    let err = back.distance(&f);
    if err > 1e-10 * f.sup_norm().max(1.0) {
        return Err(format!("round trip error {err:e}"));
    }
    Ok(())
}

pub fn modes_strategy() -> impl Strategy<Value = Vec<(i32, i32, f64, f64)>> {
    prop::collection::vec((-3i32..=3, 1i32..=3, -1.0..1.0f64, 0.0..6.28f64), 1..6)
}
