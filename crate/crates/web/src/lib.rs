//! wasm-bindgen bindings for the static demo page in `www/`.

use csvortex::geometry::{TorusGrid, VortexSet};
use csvortex::radial::{decay_fit, radial_integrals, solve_radial, RadialOptions, RadialSolution};
use csvortex::torus::{monotone_solve, MonotoneOptions, TorusProblem};
use wasm_bindgen::prelude::*;

/// Largest grid the page offers; bigger solves stall the tab.
const MAX_GRID: usize = 128;
const MAX_MESH: usize = 4000;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct RadialProfile {
    sol: RadialSolution,
}

#[wasm_bindgen]
impl RadialProfile {
    pub fn r(&self) -> Vec<f64> {
        self.sol.r().to_vec()
    }

    /// Full profile of component 0 or 1.
    pub fn u(&self, component: usize) -> Vec<f64> {
        self.sol.u[component.min(1)].clone()
    }

    /// `[I₁₂, I₁, I₂]`.
    pub fn integrals(&self) -> Vec<f64> {
        let ints = radial_integrals(&self.sol);
        vec![ints.i12, ints.i[0], ints.i[1]]
    }

    /// `[rate, power]` of the tail fit from `r_min`, or empty if the tail is
    /// too short or zero.
    pub fn decay(&self, r_min: f64) -> Vec<f64> {
        decay_fit(&self.sol, r_min).map(|f| vec![f.rate, f.power]).unwrap_or_default()
    }

    pub fn iterations(&self) -> usize {
        self.sol.iterations
    }
}

/// Radial entire solution for multiplicities `(nu1, nu2)` on `[0, radius]`.
#[wasm_bindgen]
pub fn radial_profile(nu1: u32, nu2: u32, radius: f64, mesh: usize) -> Result<RadialProfile, JsError> {
    if mesh > MAX_MESH {
        return Err(JsError::new(&format!("mesh {mesh} exceeds {MAX_MESH}")));
    }
    let sol = solve_radial([nu1, nu2], radius, mesh, &RadialOptions::default()).map_err(js_err)?;
    Ok(RadialProfile { sol })
}

#[wasm_bindgen]
pub struct TorusSolution {
    n: usize,
    full: [Vec<f64>; 2],
    flux: [f64; 2],
    classification: String,
    iterations: usize,
}

#[wasm_bindgen]
impl TorusSolution {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major full field of component 0 or 1; `-Infinity` at a vortex
    /// on a grid point.
    pub fn field(&self, component: usize) -> Vec<f64> {
        self.full[component.min(1)].clone()
    }

    pub fn flux(&self) -> Vec<f64> {
        self.flux.to_vec()
    }

    pub fn classification(&self) -> String {
        self.classification.clone()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

/// Maximal solution on a square torus of side `side` with one vortex of
/// multiplicities `(nu1, nu2)` at the centre.
#[wasm_bindgen]
pub fn torus_solution(side: f64, n: usize, eps: f64, nu1: u32, nu2: u32) -> Result<TorusSolution, JsError> {
    if n > MAX_GRID {
        return Err(JsError::new(&format!("grid {n} exceeds {MAX_GRID}")));
    }
    let grid = TorusGrid::square(side, n, 0.25 * side).map_err(js_err)?;
    let vortices = VortexSet::shared([0.5 * side, 0.5 * side], [nu1, nu2]);
    let problem = TorusProblem::new(&grid, &vortices, eps).map_err(js_err)?;
    let (pair, report) = monotone_solve(&problem, &MonotoneOptions::default()).map_err(js_err)?;
    let full = problem.full(&pair).map_err(js_err)?;
    let [a, b] = full.u;
    Ok(TorusSolution {
        n,
        full: [a.0, b.0],
        flux: report.flux,
        classification: report.classification.to_string(),
        iterations: report.iterations,
    })
}
