use log::debug;

use super::{FieldPair, SolverReport, TorusProblem, TOPOLOGICAL_THRESHOLD};
use crate::error::{Error, Result};
use crate::geometry::{laplacian, shifted_solve, Field};
use crate::linalg::gmres;

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Step halvings tried before giving up on a direction.
    pub max_halvings: usize,
    pub gmres_rtol: f64,
    pub gmres_restart: usize,
    pub gmres_max_iter: usize,
    pub threshold: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-9,
            max_iter: 50,
            max_halvings: 30,
            gmres_rtol: 1e-10,
            gmres_restart: 60,
            gmres_max_iter: 600,
            threshold: TOPOLOGICAL_THRESHOLD,
        }
    }
}

/// Smallest singular value estimate below which the Jacobian counts as
/// singular when GMRES fails.
const SINGULAR_SIGMA: f64 = 1e-10;

/// Damped Newton iteration on the discrete regularised system. The Jacobian
///
/// ```text
/// J(φ)ᵢ = Δ_h φᵢ - (1/ε²) EᵢEⱼ φᵢ + (1/ε²) Eⱼ(1 - Eᵢ) φⱼ
/// ```
///
/// is inverted by GMRES preconditioned with `(Δ_h - K)⁻¹`. Steps are halved
/// until the residual decreases.
pub fn newton_solve(problem: &TorusProblem, init: &FieldPair, opts: &NewtonOptions) -> Result<(FieldPair, SolverReport)> {
    problem.check_regular(init)?;
    let grid = problem.grid();
    let n = grid.len();
    let inv = 1.0 / (problem.eps() * problem.eps());
    let mut u = init.u.clone();
    let mut res = problem.residual_of(&u);
    let mut trace = vec![res.norm];
    let mut energy_log = vec![problem.energy_of(&u)];
    for iter in 0..=opts.max_iter {
        debug!("newton iteration {iter}: residual {:.3e}", res.norm);
        if res.norm <= opts.tol {
            let pair = FieldPair { u, eps: problem.eps(), form: init.form };
            let mut report = problem.report(&pair, iter, res.norm, true, opts.threshold);
            report.residual_trace = trace;
            report.energy_log = energy_log;
            return Ok((pair, report));
        }
        if iter == opts.max_iter || !res.norm.is_finite() {
            break;
        }
        let e = problem.exponentials(&u);
        let diag = e[0].zip_map(&e[1], |a, b| inv * a * b);
        let coupling = [
            e[1].zip_map(&e[0], |ej, ei| inv * ej * (1.0 - ei)),
            e[0].zip_map(&e[1], |ej, ei| inv * ej * (1.0 - ei)),
        ];
        let shift = diag.mean().max(1.0 / grid.area());
        let split = |x: &[f64]| [Field(x[..n].to_vec()), Field(x[n..].to_vec())];
        let apply = |x: &[f64]| -> Vec<f64> {
            let phi = split(x);
            let mut out = Vec::with_capacity(2 * n);
            for i in 0..2 {
                let lap = laplacian(grid, &phi[i]);
                out.extend((0..n).map(|k| lap[k] - diag[k] * phi[i][k] + coupling[i][k] * phi[1 - i][k]));
            }
            out
        };
        let precond = |y: &[f64]| -> Vec<f64> {
            let parts = split(y);
            let mut out = Vec::with_capacity(2 * n);
            for p in &parts {
                out.extend(shifted_solve(grid, shift, p).iter().map(|v| -v));
            }
            out
        };
        let rhs: Vec<f64> = res.r[0].iter().chain(res.r[1].iter()).map(|v| -v).collect();
        let lin = gmres(apply, precond, &rhs, opts.gmres_rtol, opts.gmres_restart, opts.gmres_max_iter);
        if !lin.converged && lin.sigma_min_estimate < SINGULAR_SIGMA {
            return Err(Error::SingularJacobian { sigma_min: lin.sigma_min_estimate });
        }
        let step = split(&lin.x);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: [Field; 2] = std::array::from_fn(|i| u[i].zip_map(&step[i], |a, b| a + t * b));
            let r = problem.residual_of(&trial);
            if r.norm < res.norm {
                accepted = Some((trial, r));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, r)) => {
                u = trial;
                res = r;
                trace.push(res.norm);
                energy_log.push(problem.energy_of(&u));
            }
            None => return Err(Error::LineSearchStalled { iteration: iter + 1, residual: res.norm }),
        }
    }
    Err(Error::MaxIterExceeded { iterations: opts.max_iter, residual: res.norm })
}
