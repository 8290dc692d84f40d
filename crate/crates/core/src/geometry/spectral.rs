//! Fourier-multiplier differential operators on the torus.

use log::warn;
use rustfft::num_complex::Complex64;

use super::grid::{Field, TorusGrid};

/// Flux mismatch `|mean(g)|·|T|` above which [`poisson_solve`] warns.
pub const FLUX_MISMATCH_TOL: f64 = 1e-8;

/// Spectral Laplacian. Exact on resolved trigonometric modes.
pub fn laplacian(grid: &TorusGrid, f: &Field) -> Field {
    grid.apply_multiplier(f, |k1, k2| -(k1 * k1 + k2 * k2))
}

/// Result of a periodic Poisson solve: the mean-zero solution and the mean
/// that was removed from the data.
#[derive(Clone, Debug)]
pub struct PoissonSolution {
    pub field: Field,
    pub removed_mean: f64,
}

/// Solves `Δf = g - mean(g)` for mean-zero `f`.
///
/// A non-zero mean makes the periodic problem unsolvable; it is subtracted
/// and reported. A warning is logged when `|mean(g)|·|T|` exceeds
/// [`FLUX_MISMATCH_TOL`], since on the torus that signals a flux imbalance.
pub fn poisson_solve(grid: &TorusGrid, g: &Field) -> PoissonSolution {
    let removed_mean = g.mean();
    if removed_mean.abs() * grid.area() > FLUX_MISMATCH_TOL {
        warn!(
            "poisson_solve: data mean {removed_mean:.3e} (flux mismatch {:.3e}) removed",
            removed_mean * grid.area()
        );
    }
    let field = grid.apply_multiplier(g, |k1, k2| {
        let k2sum = k1 * k1 + k2 * k2;
        if k2sum == 0.0 {
            0.0
        } else {
            -1.0 / k2sum
        }
    });
    PoissonSolution { field, removed_mean }
}

/// Solves `(shift - Δ) f = g` for `shift > 0`.
pub fn shifted_solve(grid: &TorusGrid, shift: f64, g: &Field) -> Field {
    debug_assert!(shift > 0.0);
    grid.apply_multiplier(g, |k1, k2| 1.0 / (shift + k1 * k1 + k2 * k2))
}

/// Spectral gradient `(∂₁f, ∂₂f)`. Nyquist modes are dropped since the odd
/// multiplier has no real symmetric extension there.
pub fn gradient(grid: &TorusGrid, f: &Field) -> [Field; 2] {
    let spec = grid.forward(&f.0);
    let [n1, n2] = grid.sizes();
    let (nyq1, nyq2) = (grid.wavenumbers(0)[n1 / 2], grid.wavenumbers(1)[n2 / 2]);
    let mut out = [Field::zeros(0), Field::zeros(0)];
    for (axis, slot) in out.iter_mut().enumerate() {
        let mut s = spec.clone();
        grid.scale_spectrum(&mut s, |k1, k2| {
            let (k, nyq) = if axis == 0 { (k1, nyq1) } else { (k2, nyq2) };
            if k == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k)
            }
        });
        *slot = grid.inverse_real(s);
    }
    out
}

/// Band-limited interpolation of `f` at an arbitrary point via the
/// trigonometric interpolant (Nyquist terms symmetrised).
pub fn interpolate(grid: &TorusGrid, spectrum: &[Complex64], p: [f64; 2]) -> f64 {
    let [n1, n2] = grid.sizes();
    let (k1s, k2s) = (grid.wavenumbers(0), grid.wavenumbers(1));
    let ex: Vec<Complex64> = k1s
        .iter()
        .enumerate()
        .map(|(i, &k)| if i == n1 / 2 { Complex64::new((k * p[0]).cos(), 0.0) } else { Complex64::from_polar(1.0, k * p[0]) })
        .collect();
    let mut acc = 0.0;
    for (j, &k2) in k2s.iter().enumerate() {
        let ey = if j == n2 / 2 { Complex64::new((k2 * p[1]).cos(), 0.0) } else { Complex64::from_polar(1.0, k2 * p[1]) };
        let row = &spectrum[j * n1..(j + 1) * n1];
        let s: Complex64 = row.iter().zip(&ex).map(|(c, e)| c * e).sum();
        acc += (s * ey).re;
    }
    acc / (n1 * n2) as f64
}
