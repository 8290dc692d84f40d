use std::f64::consts::PI;

use log::warn;
use nalgebra::{DMatrix, DVector};

use super::RadialSolution;
use crate::error::{Error, Result};

/// Fewest mesh points accepted in a decay-fit window.
pub const MIN_FIT_POINTS: usize = 20;

/// Relative tail size above which [`radial_integrals`] warns.
pub const TAIL_WARN: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub power: f64,
    pub points: usize,
}

/// Least-squares fit `ln|u| ≈ c - rate·r - power·ln r` over the samples with
/// `r ∈ [r_min, r_max]` and `u ≠ 0`.
pub fn fit_decay(r: &[f64], u: &[f64], r_min: f64, r_max: f64) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = r
        .iter()
        .zip(u)
        .filter(|(&x, &y)| x >= r_min && x <= r_max && x > 0.0 && y != 0.0 && y.is_finite())
        .map(|(&x, &y)| (x, y.abs().ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::TailUnderresolved { points: pts.len() });
    }
    let a = DMatrix::from_fn(pts.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => -pts[i].0,
        _ => -pts[i].0.ln(),
    });
    let b = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let coef = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidArgument(format!("decay fit failed: {e}")))?;
    Ok(DecayFit { rate: coef[1], power: coef[2], points: pts.len() })
}

/// Tail decay of the solution fitted over `[r_min, 0.9 R]`, averaged over the
/// components that are not identically zero.
pub fn decay_fit(sol: &RadialSolution, r_min: f64) -> Result<DecayFit> {
    let r_max = 0.9 * sol.radius();
    let fits = (0..2)
        .filter(|&c| sol.u[c].iter().any(|&x| x != 0.0))
        .map(|c| fit_decay(sol.r(), &sol.u[c], r_min, r_max))
        .collect::<Result<Vec<_>>>()?;
    if fits.is_empty() {
        return Err(Error::TailUnderresolved { points: 0 });
    }
    let k = fits.len() as f64;
    Ok(DecayFit {
        rate: fits.iter().map(|f| f.rate).sum::<f64>() / k,
        power: fits.iter().map(|f| f.power).sum::<f64>() / k,
        points: fits.iter().map(|f| f.points).min().unwrap_or(0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialIntegrals {
    /// `2π∫(1 - e^{u₁})(1 - e^{u₂}) r dr`.
    pub i12: f64,
    /// `2π∫(1 - e^{uᵢ}) r dr`.
    pub i: [f64; 2],
    /// Analytic tail contributions beyond `R`, already included above.
    pub tails: [f64; 3],
}

/// `2π ∫_R^∞ |g(R)| e^{-a(r-R)} (R/r)^p r dr`, integrated numerically.
fn model_tail(radius: f64, value: f64, fit: DecayFit) -> f64 {
    if value == 0.0 {
        return 0.0;
    }
    let a = fit.rate.max(0.1);
    let span = 40.0 / a;
    let n = 4000;
    let h = span / n as f64;
    let f = |r: f64| (-a * (r - radius)).exp() * (radius / r).powf(fit.power) * r;
    let mut acc = 0.5 * (f(radius) + f(radius + span));
    for k in 1..n {
        acc += f(radius + k as f64 * h);
    }
    2.0 * PI * value.abs() * acc * h
}

fn trapezoid(r: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..r.len()).map(|k| 0.5 * (r[k] - r[k - 1]) * (f(k) * r[k] + f(k - 1) * r[k - 1])).sum::<f64>() * 2.0 * PI
}

/// Integrals `(I₁₂, I₁, I₂)` by the trapezoid rule on the mesh, completed
/// beyond `R` with the fitted exponential tail.
pub fn radial_integrals(sol: &RadialSolution) -> RadialIntegrals {
    let r = sol.r();
    let n = r.len();
    let g: [Vec<f64>; 2] = std::array::from_fn(|c| sol.u[c].iter().map(|&u| -u.exp_m1()).collect());
    let body12 = trapezoid(r, |k| g[0][k] * g[1][k]);
    let body = [trapezoid(r, |k| g[0][k]), trapezoid(r, |k| g[1][k])];
    let big_r = sol.radius();
    let default = DecayFit { rate: 1.0, power: 0.5, points: 0 };
    let fit: [DecayFit; 2] = std::array::from_fn(|c| fit_decay(r, &sol.u[c], 0.5 * big_r, 0.9 * big_r).unwrap_or(default));
    let tail = [model_tail(big_r, g[0][n - 1], fit[0]), model_tail(big_r, g[1][n - 1], fit[1])];
    let joint = DecayFit { rate: fit[0].rate + fit[1].rate, power: fit[0].power + fit[1].power, points: 0 };
    let tail12 = model_tail(big_r, g[0][n - 1] * g[1][n - 1], joint);
    let totals = [body12 + tail12, body[0] + tail[0], body[1] + tail[1]];
    for (t, total) in [tail12, tail[0], tail[1]].iter().zip(totals) {
        if *t > TAIL_WARN * total.abs() {
            warn!("radial integral tail {t:.3e} exceeds {TAIL_WARN:e} of total {total:.6}; increase R");
        }
    }
    RadialIntegrals { i12: totals[0], i: [totals[1], totals[2]], tails: [tail12, tail[0], tail[1]] }
}

/// Pohozaev defect at radius `ρ`:
///
/// ```text
/// 2πρ²(u₁'u₂' - (1 - e^{u₁})(1 - e^{u₂}))  -  (8πν₁ν₂ - 2 I₁₂(ρ)),
/// ```
///
/// which vanishes for an exact solution. `ρ` is snapped to the nearest node.
pub fn pohozaev_defect(sol: &RadialSolution, rho: f64) -> f64 {
    let r = sol.r();
    let k = r.partition_point(|&x| x < rho).min(r.len() - 1);
    let k = if k > 0 && (rho - r[k - 1]).abs() < (r[k] - rho).abs() { k - 1 } else { k };
    let d = [sol.derivative(0), sol.derivative(1)];
    let g: [Vec<f64>; 2] = std::array::from_fn(|c| sol.u[c].iter().map(|&u| -u.exp_m1()).collect());
    let inner = trapezoid(&r[..=k], |j| g[0][j] * g[1][j]);
    let rk = r[k];
    let boundary = 2.0 * PI * rk * rk * (d[0][k] * d[1][k] - g[0][k] * g[1][k]);
    boundary - (8.0 * PI * (sol.nu[0] * sol.nu[1]) as f64 - 2.0 * inner)
}
