use std::f64::consts::PI;

use log::debug;

use super::{FieldPair, SolverReport, TorusProblem, TOPOLOGICAL_THRESHOLD};
use crate::error::{Error, Result};
use crate::geometry::{shifted_solve, Field, Form, TorusGreen};

#[derive(Clone, Debug)]
pub struct MonotoneOptions {
    /// Stop once the residual sup norm is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Largest pointwise increase tolerated between sweeps. The spectral
    /// resolvent is positive only up to a small Gibbs undershoot.
    pub slack: f64,
    pub threshold: f64,
}

impl Default for MonotoneOptions {
    fn default() -> Self {
        MonotoneOptions { tol: 1e-9, max_iter: 2000, slack: 5e-5, threshold: TOPOLOGICAL_THRESHOLD }
    }
}

/// Regular form of the supersolution whose full value is 0: `uᵢ = -u₀ᵢ`.
/// At a vortex grid point `-u₀ᵢ = +∞`; there the finite part
/// `4π Σ ν γ` (logarithm removed) is used instead, which only affects the
/// first sweep at that point.
fn supersolution(problem: &TorusProblem) -> [Field; 2] {
    let grid = problem.grid();
    let kernel = TorusGreen::new(grid.lengths());
    let sites = problem.vortices().sites();
    std::array::from_fn(|c| {
        let mut u = problem.background().log[c].scaled(-1.0);
        for k in 0..u.len() {
            if u[k].is_infinite() {
                let x = grid.point(k);
                u[k] = sites
                    .iter()
                    .filter(|s| s.nu[c] > 0)
                    .map(|s| {
                        let d = grid.displacement(x, s.point);
                        let g = if d == [0.0, 0.0] { kernel.regular_part(d) } else { kernel.value(d) };
                        4.0 * PI * s.nu[c] as f64 * g
                    })
                    .sum();
            }
        }
        u
    })
}

/// Monotone iteration from the supersolution (full value 0):
///
/// ```text
/// (K - Δ_h) uᵏ⁺¹ = K uᵏ + (1/ε²) Eⱼ(1 - Eᵢ) - 4πNᵢ/|T|,
/// K = max_i sup Eⱼ(1 + Eᵢ) / ε²,
/// ```
///
/// with `K` recomputed every sweep. Iterates decrease pointwise towards the
/// maximal solution; a rise above `slack` aborts.
pub fn monotone_solve(problem: &TorusProblem, opts: &MonotoneOptions) -> Result<(FieldPair, SolverReport)> {
    let grid = problem.grid();
    let eps = problem.eps();
    let inv = 1.0 / (eps * eps);
    let source = problem.source();
    // full values at a vortex grid point are -∞ in every iterate
    let live: [Vec<bool>; 2] = std::array::from_fn(|i| problem.background().exp[i].iter().map(|&b| b > 0.0).collect());
    let mut u = supersolution(problem);
    let mut monotonicity = Vec::new();
    let mut energy_log = Vec::new();
    let mut trace = Vec::new();
    for sweep in 1..=opts.max_iter {
        let e = problem.exponentials(&u);
        let c = (0..2)
            .map(|i| e[1 - i].iter().zip(e[i].iter()).map(|(ej, ei)| ej * (1.0 + ei)).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let shift = c.max(1.0) * inv;
        let f = problem.nonlinearity(&e);
        let next: [Field; 2] = std::array::from_fn(|i| {
            let rhs = u[i].zip_map(&f[i], |a, b| shift * a + b - source[i]);
            shifted_solve(grid, shift, &rhs)
        });
        let rise = (0..2)
            .flat_map(|i| next[i].iter().zip(u[i].iter()).zip(&live[i]).filter(|(_, &l)| l).map(|((a, b), _)| a - b))
            .fold(f64::NEG_INFINITY, f64::max);
        monotonicity.push(rise);
        if rise > opts.slack {
            return Err(Error::MonotonicityViolated { sweep, excess: rise });
        }
        u = next;
        let res = problem.residual_of(&u);
        trace.push(res.norm);
        energy_log.push(problem.energy_of(&u));
        debug!("monotone sweep {sweep}: shift {shift:.3e} residual {:.3e} rise {rise:.2e}", res.norm);
        if res.norm <= opts.tol {
            let pair = FieldPair { u, eps, form: Form::Regular };
            let mut report = problem.report(&pair, sweep, res.norm, true, opts.threshold);
            report.monotonicity = monotonicity;
            report.energy_log = energy_log;
            report.residual_trace = trace;
            return Ok((pair, report));
        }
        if !res.norm.is_finite() {
            break;
        }
    }
    Err(Error::MaxIterExceeded { iterations: opts.max_iter, residual: trace.last().copied().unwrap_or(f64::NAN) })
}
