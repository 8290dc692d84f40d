use crate::error::{Error, Result};
use crate::geometry::{laplacian, shifted_solve, Field, TorusGrid};
use crate::linalg::{gmres, BandLu, BandMatrix};
use crate::radial::{RadialMesh, RadialSolution};
use crate::torus::{FieldPair, TorusProblem};

/// Pair operator `L(A, B) = (ΔA - d₁A + c₁B, ΔB - d₂B + c₂A)` on a torus
/// grid, applied spectrally. Unknowns are stacked `[A; B]`.
#[derive(Clone, Debug)]
pub struct TorusOperator {
    grid: TorusGrid,
    diag: [Field; 2],
    coupling: [Field; 2],
    shift: f64,
}

/// The same operator restricted to angular mode `m` on a radial mesh,
/// `Δ - m²/r²` in place of `Δ`, with `A(R) = 0` and, for `m ≥ 1`,
/// `A(0) = 0`. Unknowns are interleaved `(A_k, B_k)` over the free nodes.
#[derive(Clone, Debug)]
pub struct RadialOperator {
    mesh: RadialMesh,
    mode: u32,
    start: usize,
    matrix: BandMatrix,
    lu: BandLu,
    /// Square roots of the dual-cell weights on the unknowns.
    sqrt_w: Vec<f64>,
}

#[derive(Clone, Debug)]
pub enum LinearizedOperator {
    Torus(TorusOperator),
    Radial(RadialOperator),
}

const GMRES_RTOL: f64 = 1e-12;
const GMRES_RESTART: usize = 80;
const GMRES_MAX_ITER: usize = 2000;

impl TorusOperator {
    fn apply_with(&self, x: &[f64], coupling: [&Field; 2]) -> Vec<f64> {
        let n = self.grid.len();
        let phi = [Field(x[..n].to_vec()), Field(x[n..].to_vec())];
        let mut out = Vec::with_capacity(2 * n);
        for i in 0..2 {
            let lap = laplacian(&self.grid, &phi[i]);
            let (d, c) = (&self.diag[i], coupling[i]);
            out.extend((0..n).map(|k| lap[k] - d[k] * phi[i][k] + c[k] * phi[1 - i][k]));
        }
        out
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.apply_with(x, [&self.coupling[0], &self.coupling[1]])
    }

    /// `Lᵀ` swaps which row carries each coupling coefficient.
    fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        self.apply_with(x, [&self.coupling[1], &self.coupling[0]])
    }

    fn solve_with(&self, b: &[f64], transpose: bool) -> Result<Vec<f64>> {
        let n = self.grid.len();
        let precond = |y: &[f64]| -> Vec<f64> {
            let mut out = Vec::with_capacity(2 * n);
            for part in [&y[..n], &y[n..]] {
                out.extend(shifted_solve(&self.grid, self.shift, &Field(part.to_vec())).iter().map(|v| -v));
            }
            out
        };
        let lin = if transpose {
            gmres(|x| self.apply_transpose(x), precond, b, GMRES_RTOL, GMRES_RESTART, GMRES_MAX_ITER)
        } else {
            gmres(|x| self.apply(x), precond, b, GMRES_RTOL, GMRES_RESTART, GMRES_MAX_ITER)
        };
        if !lin.converged {
            return Err(Error::Stagnated { iterations: lin.iterations });
        }
        Ok(lin.x)
    }
}

impl RadialOperator {
    fn index(&self, node: usize, c: usize) -> usize {
        2 * (node - self.start) + c
    }

    pub fn mode(&self) -> u32 {
        self.mode
    }

    pub fn mesh(&self) -> &RadialMesh {
        &self.mesh
    }
}

impl LinearizedOperator {
    /// Linearisation at a converged torus solution. Coefficients carry the
    /// `1/ε²` of the scaled system, so the zero base at `ε = 1` gives `Δ - 1`.
    pub fn torus(problem: &TorusProblem, base: &FieldPair, tol: f64) -> Result<Self> {
        let residual = problem.residual(base)?.norm;
        if residual > tol {
            return Err(Error::BaseNotConverged { residual });
        }
        let e = problem.exponentials(&base.u);
        let s = 1.0 / (problem.eps() * problem.eps());
        let d = e[0].zip_map(&e[1], |a, b| s * a * b);
        let coupling = [
            e[1].zip_map(&e[0], |ej, ei| s * ej * (1.0 - ei)),
            e[0].zip_map(&e[1], |ej, ei| s * ej * (1.0 - ei)),
        ];
        Ok(Self::torus_from(problem.grid(), [d.clone(), d], coupling))
    }

    /// Exact difference operator between two solutions `a`, `b`: with
    /// `qᵢ = (Eᵢᵃ - Eᵢᵇ)/(uᵢᵃ - uᵢᵇ)` (or `Eᵢ` where they agree),
    /// `L(uᵃ - uᵇ)` equals the difference of the two residuals.
    pub fn difference(problem: &TorusProblem, a: &FieldPair, b: &FieldPair) -> Result<Self> {
        problem.residual(a)?;
        problem.residual(b)?;
        let (ea, eb) = (problem.exponentials(&a.u), problem.exponentials(&b.u));
        let q: [Field; 2] = std::array::from_fn(|i| {
            let n = ea[i].len();
            Field(
                (0..n)
                    .map(|k| {
                        let d = a.u[i][k] - b.u[i][k];
                        if d == 0.0 {
                            eb[i][k]
                        } else {
                            eb[i][k] * d.exp_m1() / d
                        }
                    })
                    .collect(),
            )
        });
        let s = 1.0 / (problem.eps() * problem.eps());
        let diag: [Field; 2] = std::array::from_fn(|i| eb[1 - i].zip_map(&q[i], |ej, qi| s * ej * qi));
        let coupling: [Field; 2] = std::array::from_fn(|i| ea[i].zip_map(&q[1 - i], |ei, qj| s * (1.0 - ei) * qj));
        Ok(Self::torus_from(problem.grid(), diag, coupling))
    }

    fn torus_from(grid: &TorusGrid, diag: [Field; 2], coupling: [Field; 2]) -> Self {
        let shift = (0.5 * (diag[0].mean() + diag[1].mean())).max(1.0 / grid.area());
        LinearizedOperator::Torus(TorusOperator { grid: grid.clone(), diag, coupling, shift })
    }

    /// Mode-`m` linearisation at a converged radial solution.
    pub fn radial(sol: &RadialSolution, mode: u32, tol: f64) -> Result<Self> {
        if sol.residual > tol {
            return Err(Error::BaseNotConverged { residual: sol.residual });
        }
        let mesh = sol.mesh.clone();
        let m = mesh.intervals();
        let start = usize::from(mode > 0);
        let dim = 2 * (m - start);
        let parity = if mode % 2 == 0 { 1.0 } else { -1.0 };
        let e: [Vec<f64>; 2] = std::array::from_fn(|c| sol.u[c].iter().map(|u| u.exp()).collect());
        let mut matrix = BandMatrix::zeros(dim, 9, 5);
        let idx = |node: usize, c: usize| 2 * (node - start) + c;
        for k in start..m {
            let stencil = mesh.laplacian(k, parity);
            let centrifugal = if k == 0 { 0.0 } else { (mode * mode) as f64 / (mesh.r()[k] * mesh.r()[k]) };
            for c in 0..2 {
                let row = idx(k, c);
                for &(j, w) in &stencil {
                    if j >= start && j < m {
                        matrix.add(row, idx(j, c), w);
                    }
                }
                matrix.add(row, row, -centrifugal - e[0][k] * e[1][k]);
                matrix.add(row, idx(k, 1 - c), e[1 - c][k] * (1.0 - e[c][k]));
            }
        }
        let lu = matrix.clone().factor().ok_or(Error::SingularJacobian { sigma_min: 0.0 })?;
        let w = mesh.area_weights();
        let sqrt_w = (start..m).flat_map(|k| [w[k].sqrt(), w[k].sqrt()]).collect();
        Ok(LinearizedOperator::Radial(RadialOperator { mesh, mode, start, matrix, lu, sqrt_w }))
    }

    /// Number of unknowns.
    pub fn dim(&self) -> usize {
        match self {
            LinearizedOperator::Torus(t) => 2 * t.grid.len(),
            LinearizedOperator::Radial(r) => r.matrix.dim(),
        }
    }

    /// Applies `L` to stacked (torus) or interleaved (radial) unknowns.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            LinearizedOperator::Torus(t) => t.apply(x),
            LinearizedOperator::Radial(r) => r.matrix.mul_vec(x),
        }
    }

    /// Applies `(SᵀS)⁻¹` with `S` the operator in coordinates orthonormal
    /// for the discrete `L²` inner product.
    pub(crate) fn normal_inverse(&self, y: &[f64]) -> Result<Vec<f64>> {
        match self {
            LinearizedOperator::Torus(t) => {
                let z = t.solve_with(y, true)?;
                t.solve_with(&z, false)
            }
            LinearizedOperator::Radial(r) => {
                let w = &r.sqrt_w;
                // S⁻ᵀ = W^{-1/2} M⁻ᵀ W^{1/2}, S⁻¹ = W^{1/2} M⁻¹ W^{-1/2}
                let a: Vec<f64> = y.iter().zip(w).map(|(v, s)| v * s).collect();
                let b: Vec<f64> = r.lu.solve_transpose(&a).iter().zip(w).map(|(v, s)| v / s / s).collect();
                Ok(r.lu.solve(&b).iter().zip(w).map(|(v, s)| v * s).collect())
            }
        }
    }

    /// Splits orthonormal coordinates back into physical `(A, B)` samples
    /// together with their node coordinates.
    pub(crate) fn to_physical(&self, y: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<[f64; 2]>) {
        match self {
            LinearizedOperator::Torus(t) => {
                let n = t.grid.len();
                (y[..n].to_vec(), y[n..].to_vec(), (0..n).map(|k| t.grid.point(k)).collect())
            }
            LinearizedOperator::Radial(r) => {
                let len = r.mesh.len();
                let (mut a, mut b) = (vec![0.0; len], vec![0.0; len]);
                for k in r.start..len - 1 {
                    a[k] = y[r.index(k, 0)] / r.sqrt_w[r.index(k, 0)];
                    b[k] = y[r.index(k, 1)] / r.sqrt_w[r.index(k, 1)];
                }
                (a, b, r.mesh.r().iter().map(|&x| [x, 0.0]).collect())
            }
        }
    }

    /// Short description used in mode reports.
    pub fn descriptor(&self) -> String {
        match self {
            LinearizedOperator::Torus(t) => {
                let [n1, n2] = t.grid.sizes();
                format!("torus {n1}x{n2}")
            }
            LinearizedOperator::Radial(r) => format!("radial R={} m={}", r.mesh.radius(), r.mode),
        }
    }

    /// Grid or mesh size for mode reports.
    pub fn mesh_size(&self) -> usize {
        match self {
            LinearizedOperator::Torus(t) => t.grid.sizes()[0],
            LinearizedOperator::Radial(r) => r.mesh.intervals(),
        }
    }
}
