//! Periodic Green's function of `-Δ` on the torus and the background fields
//! `u₀,ᵢ = -4π Σⱼ G(x, pⱼ,ᵢ)` that absorb the vortex singularities.
//!
//! Two representations are provided:
//!
//! * the *discrete* Green's function [`green_function`], the spectral inverse
//!   of the grid Laplacian applied to a band-limited unit mass. It has zero
//!   discrete mean and satisfies `-Δ_h G = δ_q^h - 1/|T|` exactly.
//! * the *continuum* Green's function [`TorusGreen`], evaluated pointwise from
//!   the Jacobi theta function `θ₁`. Its samples carry the true logarithmic
//!   singularity and are what the nonlinear solvers use for `e^{u₀}`.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::grid::{Field, TorusGrid};
use super::vortex::{Site, VortexSet};

/// Continuum Green's function of a rectangular torus, normalised to zero mean.
///
/// With `w = π(x + iy)/L₁` and nome `q = e^{-πL₂/L₁}`,
/// `G = -(1/2π) ln|θ₁(w)| + y²/(2|T|) + C`, evaluated on the minimum image.
#[derive(Clone, Debug)]
pub struct TorusGreen {
    /// Lengths ordered so that `lengths[1] ≥ lengths[0]`.
    lengths: [f64; 2],
    swapped: bool,
    ratio: f64,
    constant: f64,
}

impl TorusGreen {
    pub fn new(lengths: [f64; 2]) -> Self {
        let swapped = lengths[1] < lengths[0];
        let lengths = if swapped { [lengths[1], lengths[0]] } else { lengths };
        let ratio = lengths[1] / lengths[0];
        let nome2 = (-2.0 * PI * ratio).exp();
        let mut log_prod = 0.0;
        let mut qn = nome2;
        while qn > 1e-18 {
            log_prod += (-qn).ln_1p();
            qn *= nome2;
        }
        let constant = log_prod / (2.0 * PI) - ratio / 24.0;
        TorusGreen { lengths, swapped, ratio, constant }
    }

    fn reduce(&self, d: [f64; 2]) -> (f64, f64) {
        let (x, y) = if self.swapped { (d[1], d[0]) } else { (d[0], d[1]) };
        let f = |v: f64, l: f64| (v + 0.5 * l).rem_euclid(l) - 0.5 * l;
        (f(x, self.lengths[0]), f(y, self.lengths[1]))
    }

    fn area(&self) -> f64 {
        self.lengths[0] * self.lengths[1]
    }

    /// `G(x, q)` as a function of the displacement `x - q`. Returns `+∞` at
    /// the source.
    pub fn value(&self, d: [f64; 2]) -> f64 {
        let (x, y) = self.reduce(d);
        if x == 0.0 && y == 0.0 {
            return f64::INFINITY;
        }
        let w = Complex64::new(PI * x / self.lengths[0], PI * y / self.lengths[0]);
        let theta = theta1_series(w, self.ratio, false);
        -theta.norm().ln() / (2.0 * PI) + y * y / (2.0 * self.area()) + self.constant
    }

    /// Regular part `γ = G + (1/2π) ln|x - q|` on the minimum image; finite
    /// and smooth near the source.
    pub fn regular_part(&self, d: [f64; 2]) -> f64 {
        let (x, y) = self.reduce(d);
        let w = Complex64::new(PI * x / self.lengths[0], PI * y / self.lengths[0]);
        let theta_over_w = theta1_series(w, self.ratio, true);
        -(theta_over_w.norm().ln() + (PI / self.lengths[0]).ln()) / (2.0 * PI)
            + y * y / (2.0 * self.area())
            + self.constant
    }
}

/// `θ₁(w)` (or `θ₁(w)/w` when `divide_by_w`) for nome `e^{-π·ratio}`.
/// Each term is formed in the exponent so large `Im w` does not overflow.
fn theta1_series(w: Complex64, ratio: f64, divide_by_w: bool) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..64 {
        let nf = n as f64;
        let odd = 2.0 * nf + 1.0;
        let log_q = -PI * ratio * (nf + 0.5) * (nf + 0.5);
        let term = if divide_by_w && w.norm() * odd < 1e-3 {
            // sin(z)/w = odd·(1 - z²/6 + z⁴/120) for z = odd·w
            let z2 = (w * odd) * (w * odd);
            (1.0 - z2 / 6.0 + z2 * z2 / 120.0) * odd * log_q.exp()
        } else {
            let plus = (log_q + i * odd * w).exp();
            let minus = (log_q - i * odd * w).exp();
            let s = (plus - minus) / (2.0 * i);
            if divide_by_w {
                s / w
            } else {
                s
            }
        };
        let signed = if n % 2 == 0 { term } else { -term };
        sum += signed * 2.0;
        let bound = (-PI * ratio * (nf * nf - 0.25)).exp() * odd;
        if n > 1 && bound < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// Band-limited discrete unit mass at `q`: `(1/|T|) Σ_k cos(k·(x - q))` over
/// the resolved modes. For `q` on the grid it is `1/(h₁h₂)` at `q`, else 0.
pub fn discrete_delta(grid: &TorusGrid, q: [f64; 2]) -> Field {
    let scale = 1.0 / grid.cell_area();
    let mut spec = vec![Complex64::new(scale, 0.0); grid.len()];
    grid.scale_spectrum(&mut spec, |k1, k2| Complex64::from_polar(1.0, -(k1 * q[0] + k2 * q[1])));
    grid.inverse_real(spec)
}

/// Discrete Green's function: the mean-zero solution of
/// `-Δ_h G = δ_q^h - 1/|T|` with the spectral Laplacian.
pub fn green_function(grid: &TorusGrid, q: [f64; 2]) -> Field {
    let scale = 1.0 / grid.cell_area();
    let mut spec = vec![Complex64::new(scale, 0.0); grid.len()];
    grid.scale_spectrum(&mut spec, |k1, k2| {
        let k2sum = k1 * k1 + k2 * k2;
        if k2sum == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(1.0 / k2sum, -(k1 * q[0] + k2 * q[1]))
        }
    });
    grid.inverse_real(spec)
}

/// Discrete Green's functions and regular parts for every distinct vortex
/// location of a configuration.
#[derive(Clone, Debug)]
pub struct GreenTable {
    sites: Vec<Site>,
    discrete: Vec<Field>,
    kernel: TorusGreen,
}

impl GreenTable {
    pub fn new(grid: &TorusGrid, vortices: &VortexSet) -> Self {
        let sites = vortices.sites();
        let discrete = sites.par_iter().map(|s| green_function(grid, s.point)).collect();
        GreenTable { sites, discrete, kernel: TorusGreen::new(grid.lengths()) }
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn discrete(&self, site: usize) -> &Field {
        &self.discrete[site]
    }

    pub fn kernel(&self) -> &TorusGreen {
        &self.kernel
    }

    /// Regular part `γ(x, q)` of the Green's function at site `site`.
    pub fn regular_part(&self, grid: &TorusGrid, site: usize, x: [f64; 2]) -> f64 {
        self.kernel.regular_part(grid.displacement(x, self.sites[site].point))
    }

    /// Discrete background fields `u₀,ᵢ = -4π Σ G_h(·, p)`, mean-zero.
    pub fn background_fields(&self, grid: &TorusGrid) -> [Field; 2] {
        let mut out = [Field::zeros(grid.len()), Field::zeros(grid.len())];
        for (site, g) in self.sites.iter().zip(&self.discrete) {
            for (c, field) in out.iter_mut().enumerate() {
                if site.nu[c] > 0 {
                    field.axpy(-4.0 * PI * site.nu[c] as f64, g);
                }
            }
        }
        out
    }
}

/// Discrete background fields of a configuration; see
/// [`GreenTable::background_fields`].
pub fn background_fields(grid: &TorusGrid, vortices: &VortexSet) -> [Field; 2] {
    GreenTable::new(grid, vortices).background_fields(grid)
}

/// Continuum background fields sampled on the grid, as used by the solvers.
///
/// `log[i]` holds `u₀,ᵢ(x) = -4π Σ G(x, p)` from [`TorusGreen`] (`-∞` at a grid
/// point that coincides with a vortex of component `i`), and `exp[i]` holds
/// `e^{u₀,ᵢ}`, which vanishes like `|x - p|^{2νᵢ}` and is exactly zero at the
/// vortex.
#[derive(Clone, Debug)]
pub struct Background {
    pub log: [Field; 2],
    pub exp: [Field; 2],
    pub totals: [u32; 2],
}

impl Background {
    pub fn new(grid: &TorusGrid, vortices: &VortexSet) -> Self {
        let kernel = TorusGreen::new(grid.lengths());
        let sites = vortices.sites();
        let make = |c: usize| {
            grid.sample(|x| {
                sites
                    .iter()
                    .filter(|s| s.nu[c] > 0)
                    .map(|s| -4.0 * PI * s.nu[c] as f64 * kernel.value(grid.displacement(x, s.point)))
                    .sum::<f64>()
            })
        };
        let log = [make(0), make(1)];
        let exp = [log[0].map(f64::exp), log[1].map(f64::exp)];
        Background { log, exp, totals: vortices.totals() }
    }

    /// Source constants `4πNᵢ/|T|` of the regularised system.
    pub fn source(&self, grid: &TorusGrid) -> [f64; 2] {
        [
            4.0 * PI * self.totals[0] as f64 / grid.area(),
            4.0 * PI * self.totals[1] as f64 / grid.area(),
        ]
    }

    /// Exchanges the component roles.
    pub fn swapped(&self) -> Self {
        Background {
            log: [self.log[1].clone(), self.log[0].clone()],
            exp: [self.exp[1].clone(), self.exp[0].clone()],
            totals: [self.totals[1], self.totals[0]],
        }
    }
}
