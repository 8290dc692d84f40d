//! Radial topological solutions of the entire problem on ℝ²,
//!
//! ```text
//! Δuᵢ + e^{uⱼ}(1 - e^{uᵢ}) = 4πνᵢ δ₀,   uᵢ → 0 as r → ∞,
//! ```
//!
//! written as `uᵢ = 2νᵢ ln r + vᵢ` with smooth `vᵢ`, `vᵢ'(0) = 0`.

mod diagnostics;
mod mesh;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use log::debug;

pub use diagnostics::{decay_fit, fit_decay, pohozaev_defect, radial_integrals, DecayFit, RadialIntegrals};
pub use mesh::{RadialMesh, BETA, MAX_SPACING_RATIO};

use crate::error::{Error, Result};
use crate::linalg::BandMatrix;

/// Far-field magnitude above which the truncation radius is too small.
pub const FAR_FIELD_TOL: f64 = 1e-4;

/// Smallest truncation radius accepted by [`solve_radial`].
pub const MIN_RADIUS: f64 = 20.0;

/// Outer boundary closure at `r = R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OuterBc {
    /// `u' = -(1 + 1/(2r)) u`, matching `e^{-r}/√r` decay.
    Robin,
    /// `u(R) = 0`.
    Dirichlet,
}

#[derive(Clone, Debug)]
pub struct RadialOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub bc: OuterBc,
    /// Skip the `R ≥ 20` precondition (used for studies on small disks).
    pub allow_small_radius: bool,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions { tol: 1e-9, max_iter: 60, bc: OuterBc::Robin, allow_small_radius: false }
    }
}

#[derive(Clone, Debug)]
pub struct RadialSolution {
    pub mesh: RadialMesh,
    pub nu: [u32; 2],
    /// Regular parts `vᵢ`.
    pub v: [Vec<f64>; 2],
    /// Profiles `uᵢ = 2νᵢ ln r + vᵢ`; `-∞` at the origin when `νᵢ > 0`.
    pub u: [Vec<f64>; 2],
    pub residual: f64,
    pub iterations: usize,
    pub bc: OuterBc,
}

/// `e^{uᵢ}` at node `k` from the regular part.
fn exp_u(r: f64, nu: u32, v: f64) -> f64 {
    if nu == 0 {
        v.exp()
    } else if r == 0.0 {
        0.0
    } else {
        (2.0 * nu as f64 * r.ln() + v).exp()
    }
}

struct System<'a> {
    mesh: &'a RadialMesh,
    nu: [u32; 2],
    bc: OuterBc,
    lap: Vec<Vec<(usize, f64)>>,
    d1_end: Vec<(usize, f64)>,
}

impl<'a> System<'a> {
    fn new(mesh: &'a RadialMesh, nu: [u32; 2], bc: OuterBc) -> Self {
        let m = mesh.intervals();
        let lap = (0..m).map(|k| mesh.laplacian(k, 1.0)).collect();
        System { mesh, nu, bc, lap, d1_end: mesh.first_derivative(m, 1.0) }
    }

    fn residual(&self, v: &[Vec<f64>; 2]) -> Vec<f64> {
        let m = self.mesh.intervals();
        let r = self.mesh.r();
        let mut out = vec![0.0; 2 * (m + 1)];
        for k in 0..m {
            let e = [exp_u(r[k], self.nu[0], v[0][k]), exp_u(r[k], self.nu[1], v[1][k])];
            for c in 0..2 {
                let lap: f64 = self.lap[k].iter().map(|&(j, w)| w * v[c][j]).sum();
                out[2 * k + c] = lap + e[1 - c] * (1.0 - e[c]);
            }
        }
        let big_r = self.mesh.radius();
        for c in 0..2 {
            let log_part = 2.0 * self.nu[c] as f64 * big_r.ln();
            out[2 * m + c] = match self.bc {
                OuterBc::Dirichlet => v[c][m] + log_part,
                OuterBc::Robin => {
                    let d1: f64 = self.d1_end.iter().map(|&(j, w)| w * v[c][j]).sum();
                    d1 + 2.0 * self.nu[c] as f64 / big_r + (1.0 + 0.5 / big_r) * (log_part + v[c][m])
                }
            };
        }
        out
    }

    fn jacobian(&self, v: &[Vec<f64>; 2]) -> BandMatrix {
        let m = self.mesh.intervals();
        let r = self.mesh.r();
        let mut jac = BandMatrix::zeros(2 * (m + 1), 11, 5);
        for k in 0..m {
            let e = [exp_u(r[k], self.nu[0], v[0][k]), exp_u(r[k], self.nu[1], v[1][k])];
            for c in 0..2 {
                let row = 2 * k + c;
                for &(j, w) in &self.lap[k] {
                    jac.add(row, 2 * j + c, w);
                }
                jac.add(row, row, -e[0] * e[1]);
                jac.add(row, 2 * k + 1 - c, e[1 - c] * (1.0 - e[c]));
            }
        }
        let big_r = self.mesh.radius();
        for c in 0..2 {
            let row = 2 * m + c;
            match self.bc {
                OuterBc::Dirichlet => jac.add(row, row, 1.0),
                OuterBc::Robin => {
                    for &(j, w) in &self.d1_end {
                        jac.add(row, 2 * j + c, w);
                    }
                    jac.add(row, row, 1.0 + 0.5 / big_r);
                }
            }
        }
        jac
    }
}

fn sup(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Solves the radial system on `[0, R]` by damped Newton with a banded LU.
pub fn solve_radial(nu: [u32; 2], radius: f64, intervals: usize, opts: &RadialOptions) -> Result<RadialSolution> {
    if radius < MIN_RADIUS && !opts.allow_small_radius {
        return Err(Error::InvalidArgument(format!("truncation radius must be at least {MIN_RADIUS}, got {radius}")));
    }
    let mesh = RadialMesh::new(radius, intervals)?;
    let sys = System::new(&mesh, nu, opts.bc);
    let n = mesh.len();
    // vortex-core ansatz uᵢ = νᵢ ln(r²/(r² + 2νᵢ))
    let mut v: [Vec<f64>; 2] = std::array::from_fn(|c| {
        let s = 2.0 * nu[c] as f64;
        mesh.r().iter().map(|r| if nu[c] == 0 { 0.0 } else { -(nu[c] as f64) * (r * r + s).ln() }).collect()
    });
    let mut res = sys.residual(&v);
    let mut norm = sup(&res);
    let mut trace = vec![norm];
    let mut iterations = 0;
    while norm > opts.tol {
        if iterations == opts.max_iter || !norm.is_finite() {
            return Err(Error::NewtonFailed { trace });
        }
        let lu = sys.jacobian(&v).factor().ok_or_else(|| Error::NewtonFailed { trace: trace.clone() })?;
        let step = lu.solve(&res);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: [Vec<f64>; 2] = std::array::from_fn(|c| (0..n).map(|k| v[c][k] - t * step[2 * k + c]).collect());
            let r_trial = sys.residual(&trial);
            let n_trial = sup(&r_trial);
            if n_trial < norm {
                v = trial;
                res = r_trial;
                norm = n_trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        trace.push(norm);
        debug!("radial newton {iterations}: residual {norm:.3e} step {t}");
        if !accepted {
            return Err(Error::NewtonFailed { trace });
        }
    }
    let u: [Vec<f64>; 2] = std::array::from_fn(|c| {
        mesh.r()
            .iter()
            .zip(&v[c])
            .map(|(&r, &vk)| if nu[c] == 0 { vk } else { 2.0 * nu[c] as f64 * r.ln() + vk })
            .collect()
    });
    let far = u[0][n - 1].abs().max(u[1][n - 1].abs());
    if far > FAR_FIELD_TOL {
        return Err(Error::RadiusTooSmall { value: far });
    }
    Ok(RadialSolution { mesh, nu, v, u, residual: norm, iterations, bc: opts.bc })
}

impl RadialSolution {
    pub fn r(&self) -> &[f64] {
        self.mesh.r()
    }

    pub fn radius(&self) -> f64 {
        self.mesh.radius()
    }

    /// Regular part `vᵢ(r)` by four-point Lagrange interpolation in `ξ`,
    /// reflecting evenly across the origin. For `r > R` the far-field value
    /// `-2νᵢ ln r` (i.e. `uᵢ = 0`) is returned.
    pub fn regular_at(&self, c: usize, r: f64) -> f64 {
        let r = r.abs();
        if r >= self.radius() {
            return -2.0 * self.nu[c] as f64 * r.ln();
        }
        let m = self.mesh.intervals();
        let x = self.mesh.xi_of(r) * m as f64;
        let k = (x.floor() as i64).clamp(1, m as i64 - 2);
        let nodes = [k - 1, k, k + 1, k + 2];
        let mut acc = 0.0;
        for (a, &na) in nodes.iter().enumerate() {
            let mut w = 1.0;
            for (b, &nb) in nodes.iter().enumerate() {
                if a != b {
                    w *= (x - nb as f64) / (na - nb) as f64;
                }
            }
            acc += w * self.v[c][na.unsigned_abs() as usize];
        }
        acc
    }

    /// `uᵢ(r)` off the origin.
    pub fn profile_at(&self, c: usize, r: f64) -> f64 {
        let log = if self.nu[c] == 0 { 0.0 } else { 2.0 * self.nu[c] as f64 * r.ln() };
        if r >= self.radius() {
            return 0.0;
        }
        log + self.regular_at(c, r)
    }

    /// `uᵢ'(r)` at every node (`+∞` at the origin when `νᵢ > 0`).
    pub fn derivative(&self, c: usize) -> Vec<f64> {
        (0..self.mesh.len())
            .map(|k| {
                let dv: f64 = self.mesh.first_derivative(k, 1.0).iter().map(|&(j, w)| w * self.v[c][j]).sum();
                let r = self.mesh.r()[k];
                if self.nu[c] == 0 {
                    dv
                } else {
                    2.0 * self.nu[c] as f64 / r + dv
                }
            })
            .collect()
    }

    /// Exchanges the component roles.
    pub fn swapped(&self) -> Self {
        RadialSolution {
            mesh: self.mesh.clone(),
            nu: [self.nu[1], self.nu[0]],
            v: [self.v[1].clone(), self.v[0].clone()],
            u: [self.u[1].clone(), self.u[0].clone()],
            residual: self.residual,
            iterations: self.iterations,
            bc: self.bc,
        }
    }

    /// CSV with columns `r,u1,u2,v1,v2`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,u1,u2,v1,v2\n");
        for k in 0..self.mesh.len() {
            let _ = writeln!(s, "{:?},{:?},{:?},{:?},{:?}", self.r()[k], self.u[0][k], self.u[1][k], self.v[0][k], self.v[1][k]);
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}
