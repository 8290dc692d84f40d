use std::f64::consts::PI;

use super::{CheckResult, Comparison};
use crate::error::Result;
use crate::linearization::{smallest_modes, LinearizedOperator, ModeOptions};
use crate::radial::{decay_fit, radial_integrals, solve_radial, OuterBc, RadialOptions, RadialSolution};

/// First zero of `J₀`.
const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// `(I₁₂, I₁, I₂)` against `4π(ν₁ν₂, ν₁ν₂ + ν₁, ν₁ν₂ + ν₂)`, 1e-3 relative.
pub fn check_radial_integrals(sol: &RadialSolution) -> CheckResult {
    let ints = radial_integrals(sol);
    let [n1, n2] = sol.nu.map(|n| n as f64);
    let expect = vec![4.0 * PI * n1 * n2, 4.0 * PI * (n1 * n2 + n1), 4.0 * PI * (n1 * n2 + n2)];
    CheckResult::new(
        format!("radial integrals nu=({},{})", sol.nu[0], sol.nu[1]),
        "Pohozaev integral identities",
        vec![ints.i12, ints.i[0], ints.i[1]],
        expect,
        1e-3,
        Comparison::Relative,
    )
}

/// Tail rate `1 ± 5%` and power `0.5 ± 0.2` of the fitted decay.
pub fn check_decay(sol: &RadialSolution, r_min: f64) -> Result<Vec<CheckResult>> {
    let fit = decay_fit(sol, r_min)?;
    Ok(vec![
        CheckResult::new("decay rate", "exponential decay at infinity", vec![fit.rate], vec![1.0], 0.05, Comparison::Relative),
        CheckResult::new("decay power", "exponential decay at infinity", vec![fit.power], vec![0.5], 0.2, Comparison::Absolute),
    ])
}

fn sigma_min(sol: &RadialSolution, mode: u32) -> Result<f64> {
    let op = LinearizedOperator::radial(sol, mode, 1e-8)?;
    Ok(smallest_modes(&op, 1, &ModeOptions::default())?[0].sigma)
}

/// Mode-0 `σ_min` of the linearisation at the radial `ν` solution on
/// `(R, mesh)`, `(R, 2·mesh)` and `(r, 2·mesh)` for each `r` in `radii`.
/// Every value must be positive and within 10% of the first.
pub fn check_nondegeneracy(nu: [u32; 2], base: (f64, usize), radii: &[f64]) -> Result<(Vec<f64>, CheckResult)> {
    let (radius, mesh) = base;
    let opts = RadialOptions::default();
    let mut configs = vec![(radius, mesh), (radius, 2 * mesh)];
    configs.extend(radii.iter().map(|&r| (r, 2 * mesh)));
    let sigmas = configs
        .iter()
        .map(|&(r, m)| sigma_min(&solve_radial(nu, r, m, &opts)?, 0))
        .collect::<Result<Vec<f64>>>()?;
    let reference = vec![sigmas[0]; sigmas.len()];
    let mut check =
        CheckResult::new("non-degeneracy sigma_min stability", "non-degeneracy of the linearisation", sigmas.clone(), reference, 0.1, Comparison::Relative);
    check.pass &= sigmas.iter().all(|&s| s > 0.0);
    Ok((sigmas, check))
}

/// Mode-0 `σ_min` at the zero base on a disk of radius `R` with the outer
/// Dirichlet closure, whose continuum value is `1 + (j₀₁/R)²`.
pub fn zero_base_sigma(radius: f64, mesh: usize) -> Result<(f64, f64)> {
    let opts = RadialOptions { bc: OuterBc::Dirichlet, ..Default::default() };
    let sol = solve_radial([0, 0], radius, mesh, &opts)?;
    let exact = 1.0 + (J0_FIRST_ZERO / radius).powi(2);
    Ok((sigma_min(&sol, 0)?, exact))
}

/// Observed convergence order of the zero-base `σ_min` over successive mesh
/// doublings; each order must be at least 1.8.
pub fn check_zero_base_order(radius: f64, meshes: &[usize]) -> Result<CheckResult> {
    let errors = meshes
        .iter()
        .map(|&m| zero_base_sigma(radius, m).map(|(s, exact)| (s - exact).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let orders: Vec<f64> = errors
        .windows(2)
        .zip(meshes.windows(2))
        .map(|(e, m)| (e[0] / e[1]).ln() / (m[1] as f64 / m[0] as f64).ln())
        .collect();
    let floor = vec![1.8; orders.len()];
    Ok(CheckResult::new("zero-base sigma_min order", "decoupled limit operator", orders, floor, 0.0, Comparison::AtLeast))
}
