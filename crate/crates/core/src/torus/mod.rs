//! Topological solutions of the regularised vortex system on the torus,
//!
//! ```text
//! Δuᵢ + (1/ε²) e^{u₀ⱼ+uⱼ} (1 - e^{u₀ᵢ+uᵢ}) = 4πNᵢ/|T|,
//! ```
//!
//! by a monotone iteration ([`monotone_solve`]) and damped Newton
//! ([`newton_solve`]).

mod monotone;
mod newton;
mod report;

use std::f64::consts::PI;
use std::path::Path;

pub use monotone::{monotone_solve, MonotoneOptions};
pub use newton::{newton_solve, NewtonOptions};
pub use report::{parse_key_values, Classification, SolverReport};

use crate::error::{Error, Result};
use crate::geometry::{laplacian, Background, Field, FieldFile, Form, TorusGrid, VortexSet};

/// Default sup-norm cutoff on `T_{2δ}` below which a solution counts as
/// topological.
pub const TOPOLOGICAL_THRESHOLD: f64 = 0.1;

/// Mean below which a converged solution is flagged as a non-topological
/// candidate.
pub const NON_TOPOLOGICAL_MEAN: f64 = -5.0;

/// A pair of grid fields with its coupling parameter and form tag. In
/// regular form the full solution is `u₀ᵢ + uᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPair {
    pub u: [Field; 2],
    pub eps: f64,
    pub form: Form,
}

impl FieldPair {
    pub fn zeros(len: usize, eps: f64) -> Self {
        FieldPair { u: [Field::zeros(len), Field::zeros(len)], eps, form: Form::Regular }
    }

    pub fn swapped(&self) -> Self {
        FieldPair { u: [self.u[1].clone(), self.u[0].clone()], eps: self.eps, form: self.form }
    }

    /// `max_i ‖uᵢ - vᵢ‖_∞`.
    pub fn distance(&self, other: &FieldPair) -> f64 {
        self.u[0].distance(&other.u[0]).max(self.u[1].distance(&other.u[1]))
    }

    pub fn to_file(&self, grid: &TorusGrid) -> FieldFile {
        FieldFile {
            sizes: grid.sizes(),
            lengths: grid.lengths(),
            eps: self.eps,
            form: self.form,
            components: vec![("u1".into(), self.u[0].clone()), ("u2".into(), self.u[1].clone())],
        }
    }

    pub fn from_file(file: FieldFile) -> Result<Self> {
        let FieldFile { eps, form, components, .. } = file;
        let mut it = components.into_iter();
        match (it.next(), it.next(), it.next()) {
            (Some((a, u1)), Some((b, u2)), None) if a == "u1" && b == "u2" => Ok(FieldPair { u: [u1, u2], eps, form }),
            _ => Err(Error::InvalidArgument("field pair file must hold components u1 u2".into())),
        }
    }

    pub fn write(&self, grid: &TorusGrid, path: &Path) -> Result<()> {
        self.to_file(grid).write(path)
    }
}

/// Residual fields of the regularised system and their sup norm.
#[derive(Clone, Debug)]
pub struct Residual {
    pub r: [Field; 2],
    pub norm: f64,
}

/// Grid, vortex data and coupling parameter of one torus solve, with the
/// sampled background fields.
#[derive(Clone, Debug)]
pub struct TorusProblem {
    grid: TorusGrid,
    vortices: VortexSet,
    eps: f64,
    background: Background,
    source: [f64; 2],
}

impl TorusProblem {
    pub fn new(grid: &TorusGrid, vortices: &VortexSet, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("ε must be positive, got {eps}")));
        }
        let vortices = VortexSet::on_torus(vortices.vortices().iter().copied(), grid.lengths())?;
        let background = Background::new(grid, &vortices);
        let source = background.source(grid);
        Ok(TorusProblem { grid: grid.clone(), vortices, eps, background, source })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn vortices(&self) -> &VortexSet {
        &self.vortices
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn background(&self) -> &Background {
        &self.background
    }

    /// Constants `4πNᵢ/|T|`.
    pub fn source(&self) -> [f64; 2] {
        self.source
    }

    /// The same problem with component labels exchanged.
    pub fn swapped(&self) -> Self {
        TorusProblem {
            grid: self.grid.clone(),
            vortices: self.vortices.swapped(),
            eps: self.eps,
            background: self.background.swapped(),
            source: [self.source[1], self.source[0]],
        }
    }

    pub(crate) fn check_regular(&self, pair: &FieldPair) -> Result<()> {
        if pair.form != Form::Regular {
            return Err(Error::InvalidArgument("expected a field pair in regular form".into()));
        }
        if pair.u.iter().any(|f| f.len() != self.grid.len()) {
            return Err(Error::InvalidArgument("field pair does not match the grid".into()));
        }
        Ok(())
    }

    /// `Eᵢ = e^{u₀ᵢ + uᵢ}`, exactly zero at a vortex grid point.
    pub fn exponentials(&self, u: &[Field; 2]) -> [Field; 2] {
        [
            self.background.exp[0].zip_map(&u[0], |b, v| b * v.exp()),
            self.background.exp[1].zip_map(&u[1], |b, v| b * v.exp()),
        ]
    }

    /// `(1/ε²) Eⱼ (1 - Eᵢ)` for both components.
    pub fn nonlinearity(&self, e: &[Field; 2]) -> [Field; 2] {
        let s = 1.0 / (self.eps * self.eps);
        [e[1].zip_map(&e[0], |ej, ei| s * ej * (1.0 - ei)), e[0].zip_map(&e[1], |ej, ei| s * ej * (1.0 - ei))]
    }

    pub fn residual(&self, pair: &FieldPair) -> Result<Residual> {
        self.check_regular(pair)?;
        Ok(self.residual_of(&pair.u))
    }

    pub(crate) fn residual_of(&self, u: &[Field; 2]) -> Residual {
        let f = self.nonlinearity(&self.exponentials(u));
        let r: [Field; 2] = std::array::from_fn(|i| {
            let s = self.source[i];
            laplacian(&self.grid, &u[i]).zip_map(&f[i], |l, fv| l + fv - s)
        });
        let norm = r[0].sup_norm().max(r[1].sup_norm());
        Residual { r, norm }
    }

    /// Discrete fluxes `Σ (1/ε²) Eⱼ(1 - Eᵢ) h₁h₂`, equal to `4πNᵢ` at a solution.
    pub fn flux(&self, pair: &FieldPair) -> Result<[f64; 2]> {
        self.check_regular(pair)?;
        let f = self.nonlinearity(&self.exponentials(&pair.u));
        Ok([self.grid.integrate(&f[0]), self.grid.integrate(&f[1])])
    }

    /// Action functional
    /// `I = ∫ ∇u₁·∇u₂ + (1/ε²)(1 - E₁)(1 - E₂) + (4π/|T|)(N₂u₁ + N₁u₂)`,
    /// whose critical points are the solutions. The gradient term is
    /// evaluated as `-∫ u₁ Δ_h u₂` so that criticality is exact on the grid.
    pub fn energy(&self, pair: &FieldPair) -> Result<f64> {
        self.check_regular(pair)?;
        Ok(self.energy_of(&pair.u))
    }

    pub(crate) fn energy_of(&self, u: &[Field; 2]) -> f64 {
        let e = self.exponentials(u);
        let inv = 1.0 / (self.eps * self.eps);
        let lap = laplacian(&self.grid, &u[1]);
        let grad = -self.grid.integrate(&u[0].zip_map(&lap, |a, b| a * b));
        let pot = self.grid.integrate(&e[0].zip_map(&e[1], |a, b| inv * (1.0 - a) * (1.0 - b)));
        let lin = self.source[1] * self.grid.integrate(&u[0]) + self.source[0] * self.grid.integrate(&u[1]);
        grad + pot + lin
    }

    /// Full-form solution `u₀ᵢ + uᵢ`, `-∞` at vortex grid points.
    pub fn full(&self, pair: &FieldPair) -> Result<FieldPair> {
        self.check_regular(pair)?;
        Ok(FieldPair {
            u: [self.background.log[0].zip_map(&pair.u[0], |a, b| a + b), self.background.log[1].zip_map(&pair.u[1], |a, b| a + b)],
            eps: pair.eps,
            form: Form::Full,
        })
    }

    /// Regular form of a full-form pair. Values at vortex grid points are not
    /// recoverable from `-∞` and are taken from the nearest finite neighbour
    /// average.
    pub fn regular(&self, pair: &FieldPair) -> Result<FieldPair> {
        if pair.form == Form::Regular {
            return Ok(pair.clone());
        }
        let [n1, n2] = self.grid.sizes();
        let u: [Field; 2] = std::array::from_fn(|c| {
            let mut r = pair.u[c].zip_map(&self.background.log[c], |a, b| a - b);
            for k in 0..r.len() {
                if !r[k].is_finite() {
                    let (i, j) = (k % n1, k / n1);
                    let nb = [
                        self.grid.index((i + 1) % n1, j),
                        self.grid.index((i + n1 - 1) % n1, j),
                        self.grid.index(i, (j + 1) % n2),
                        self.grid.index(i, (j + n2 - 1) % n2),
                    ];
                    let finite: Vec<f64> = nb.iter().map(|&m| r[m]).filter(|v| v.is_finite()).collect();
                    r[k] = finite.iter().sum::<f64>() / finite.len().max(1) as f64;
                }
            }
            r
        });
        Ok(FieldPair { u, eps: pair.eps, form: Form::Regular })
    }

    /// Grid points at distance at least `radius` from every vortex.
    pub fn excised_mask(&self, radius: f64) -> Vec<bool> {
        let sites = self.vortices.sites();
        (0..self.grid.len())
            .map(|k| {
                let x = self.grid.point(k);
                sites.iter().all(|s| self.grid.distance(x, s.point) >= radius)
            })
            .collect()
    }

    /// `max_i sup |u₀ᵢ + uᵢ|` over `T_{2δ}` with `δ` from the grid.
    pub fn excised_sup(&self, pair: &FieldPair) -> Result<f64> {
        let full = self.full(pair)?;
        let mask = self.excised_mask(2.0 * self.grid.delta());
        Ok(full
            .u
            .iter()
            .flat_map(|f| f.iter().zip(&mask).filter(|(_, &m)| m).map(|(v, _)| v.abs()))
            .fold(0.0, f64::max))
    }

    /// Means `dᵢ = (1/|T|)∫(u₀ᵢ + uᵢ)`. The continuum background has zero
    /// mean, so this is the mean of the regular part.
    pub fn means(&self, pair: &FieldPair) -> Result<[f64; 2]> {
        self.check_regular(pair)?;
        Ok([pair.u[0].mean(), pair.u[1].mean()])
    }

    /// Summary report for a converged (or failed) iterate.
    pub(crate) fn report(
        &self,
        pair: &FieldPair,
        iterations: usize,
        residual: f64,
        converged: bool,
        threshold: f64,
    ) -> SolverReport {
        let sup = self.excised_sup(pair).unwrap_or(f64::INFINITY);
        let means = self.means(pair).unwrap_or([f64::NAN; 2]);
        let classification = Classification::of(converged, sup, means, threshold);
        SolverReport {
            iterations,
            residual,
            classification,
            flux: self.flux(pair).unwrap_or([f64::NAN; 2]),
            energy: self.energy(pair).unwrap_or(f64::NAN),
            excised_sup: sup,
            means,
            monotonicity: Vec::new(),
            energy_log: Vec::new(),
            residual_trace: Vec::new(),
        }
    }

    /// Flux targets `4πNᵢ`.
    pub fn flux_targets(&self) -> [f64; 2] {
        let n = self.vortices.totals();
        [4.0 * PI * n[0] as f64, 4.0 * PI * n[1] as f64]
    }
}
