//! Linearised pair operator around computed solutions, its smallest
//! singular values, and normalised differences of two solutions.

mod operator;

use std::io::Write as _;
use std::path::Path;

use log::debug;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use operator::{LinearizedOperator, RadialOperator, TorusOperator};

use crate::error::{Error, Result};
use crate::geometry::{interpolate, Field, TorusGrid};
use crate::torus::FieldPair;

/// Raw difference norms below this cannot be normalised.
pub const IDENTICAL_TOL: f64 = 1e-13;

/// Normalised pair `(A, B)` with `‖A‖_∞ = 1 ≥ ‖B‖_∞`, sampled at `nodes`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearizedPair {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub nodes: Vec<[f64; 2]>,
    /// `‖·‖_∞` of the raw first component before normalisation.
    pub norm: f64,
    /// Node where `|A|` attains its maximum.
    pub location: [f64; 2],
    /// The raw components were exchanged to put the larger one first.
    pub swapped: bool,
}

fn sup(x: &[f64]) -> (f64, usize) {
    x.iter().enumerate().fold((0.0, 0), |(m, at), (k, v)| if v.abs() > m { (v.abs(), k) } else { (m, at) })
}

impl LinearizedPair {
    pub fn normalized(a: Vec<f64>, b: Vec<f64>, nodes: Vec<[f64; 2]>) -> Result<Self> {
        let (na, nb) = (sup(&a).0, sup(&b).0);
        let swapped = nb > na;
        let (a, b) = if swapped { (b, a) } else { (a, b) };
        let (norm, at) = sup(&a);
        if norm < IDENTICAL_TOL {
            return Err(Error::IdenticalSolutions { norm });
        }
        Ok(LinearizedPair {
            a: a.iter().map(|v| v / norm).collect(),
            b: b.iter().map(|v| v / norm).collect(),
            location: nodes[at],
            nodes,
            norm,
            swapped,
        })
    }
}

/// `(A, B) = (u - ũ)/‖u₁ - ũ₁‖_∞` for two regular-form solutions on `grid`.
pub fn difference_pair(grid: &TorusGrid, sol_a: &FieldPair, sol_b: &FieldPair) -> Result<LinearizedPair> {
    if sol_a.form != sol_b.form || sol_a.u[0].len() != grid.len() || sol_b.u[0].len() != grid.len() {
        return Err(Error::InvalidArgument("difference pair needs two fields of the same form on the grid".into()));
    }
    if sol_a.eps != sol_b.eps {
        return Err(Error::InvalidArgument(format!("mismatched ε: {} and {}", sol_a.eps, sol_b.eps)));
    }
    let d: [Vec<f64>; 2] = std::array::from_fn(|i| sol_a.u[i].iter().zip(sol_b.u[i].iter()).map(|(x, y)| x - y).collect());
    let [a, b] = d;
    LinearizedPair::normalized(a, b, (0..grid.len()).map(|k| grid.point(k)).collect())
}

/// Samples `y ↦ (A, B)(center + ε y)` on a lattice of spacing
/// `radius/samples` in the disk `|y| ≤ radius`, by trigonometric
/// interpolation of a torus pair.
pub fn rescaled_pair(
    grid: &TorusGrid,
    pair: &LinearizedPair,
    center: [f64; 2],
    eps: f64,
    radius: f64,
    samples: usize,
) -> Result<LinearizedPair> {
    if pair.a.len() != grid.len() {
        return Err(Error::InvalidArgument("pair does not live on this grid".into()));
    }
    let [l1, l2] = grid.lengths();
    if eps * radius >= 0.5 * l1.min(l2) {
        return Err(Error::RadiusExceedsChart);
    }
    let h = radius / samples.max(1) as f64;
    let s = samples as i64;
    let nodes: Vec<[f64; 2]> = (-s..=s)
        .flat_map(|j| (-s..=s).map(move |i| [i as f64 * h, j as f64 * h]))
        .filter(|y| y[0].hypot(y[1]) <= radius + 1e-12)
        .collect();
    let (sa, sb) = (grid.forward(&pair.a), grid.forward(&pair.b));
    let at = |spec: &[_], y: &[f64; 2]| interpolate(grid, spec, [center[0] + eps * y[0], center[1] + eps * y[1]]);
    let a: Vec<f64> = nodes.iter().map(|y| at(&sa, y)).collect();
    let b: Vec<f64> = nodes.iter().map(|y| at(&sb, y)).collect();
    let (norm, k) = sup(&a);
    Ok(LinearizedPair { location: nodes[k], a, b, nodes, norm: norm * pair.norm, swapped: pair.swapped })
}

#[derive(Clone, Debug)]
pub struct Mode {
    pub sigma: f64,
    pub pair: LinearizedPair,
}

#[derive(Clone, Debug)]
pub struct ModeOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Extra vectors carried in the block to speed convergence.
    pub guard: usize,
    pub seed: u64,
}

impl Default for ModeOptions {
    fn default() -> Self {
        ModeOptions { tol: 1e-10, max_iter: 1000, guard: 3, seed: 7 }
    }
}

fn orthonormalize(x: DMatrix<f64>) -> DMatrix<f64> {
    x.qr().q()
}

/// The `k` smallest singular values of `op` (ascending) with their singular
/// vectors, by block inverse iteration on `(SᵀS)⁻¹` from a seeded start and
/// Rayleigh–Ritz extraction.
pub fn smallest_modes(op: &LinearizedOperator, k: usize, opts: &ModeOptions) -> Result<Vec<Mode>> {
    if k == 0 {
        return Err(Error::InvalidArgument("at least one mode must be requested".into()));
    }
    let n = op.dim();
    let p = (k + opts.guard).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut y = orthonormalize(DMatrix::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0)));
    let mut last: Option<Vec<f64>> = None;
    for iter in 1..=opts.max_iter {
        let mut z = DMatrix::zeros(n, p);
        for j in 0..p {
            let col = op.normal_inverse(y.column(j).as_slice())?;
            z.column_mut(j).copy_from_slice(&col);
        }
        let h = y.transpose() * &z;
        let h = 0.5 * (&h + h.transpose());
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let sigma: Vec<f64> = order.iter().map(|&j| 1.0 / eig.eigenvalues[j].max(f64::MIN_POSITIVE).sqrt()).collect();
        let done = last
            .as_ref()
            .is_some_and(|prev| (0..k).all(|i| (sigma[i] - prev[i]).abs() <= opts.tol * sigma[i]));
        if done {
            debug!("modes converged after {iter} block iterations: {:?}", &sigma[..k]);
            let ritz = &y * &eig.eigenvectors;
            return order[..k]
                .iter()
                .zip(&sigma)
                .map(|(&j, &s)| {
                    let (a, b, nodes) = op.to_physical(ritz.column(j).as_slice());
                    Ok(Mode { sigma: s, pair: LinearizedPair::normalized(a, b, nodes)? })
                })
                .collect();
        }
        last = Some(sigma);
        let v = DMatrix::from_fn(p, p, |r, c| eig.eigenvectors[(r, order[c])]);
        y = orthonormalize(z * v);
    }
    Err(Error::Stagnated { iterations: opts.max_iter })
}

/// One line of a mode report.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ModeRecord {
    pub mode: usize,
    pub sigma: f64,
    pub mesh: usize,
    pub base: String,
}

pub fn mode_records(op: &LinearizedOperator, modes: &[Mode]) -> Vec<ModeRecord> {
    modes
        .iter()
        .enumerate()
        .map(|(i, m)| ModeRecord { mode: i, sigma: m.sigma, mesh: op.mesh_size(), base: op.descriptor() })
        .collect()
}

/// Writes mode records as CSV with columns `mode,sigma,mesh,base`.
pub fn write_modes_csv(path: &Path, records: &[ModeRecord]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in records {
        w.serialize(r).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    }
    w.into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?
        .flush()
        .map_err(|e| Error::io(path, e))
}

/// Constant-field check helper: pair with `A ≡ value`, `B ≡ 0` on the grid.
pub fn constant_pair(grid: &TorusGrid, value: f64) -> LinearizedPair {
    let a = Field::constant(grid.len(), value).0;
    LinearizedPair {
        location: grid.point(0),
        b: vec![0.0; a.len()],
        a,
        nodes: (0..grid.len()).map(|k| grid.point(k)).collect(),
        norm: value.abs(),
        swapped: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::VortexSet;
    use crate::radial::{solve_radial, RadialOptions};
    use crate::torus::TorusProblem;

    #[test]
    fn identical_solutions_cannot_be_normalized() {
        let grid = TorusGrid::square(1.0, 16, 0.1).unwrap();
        let p = FieldPair::zeros(grid.len(), 0.1);
        assert!(matches!(difference_pair(&grid, &p, &p), Err(Error::IdenticalSolutions { .. })));
    }

    #[test]
    fn larger_component_is_put_first() {
        let grid = TorusGrid::square(1.0, 16, 0.1).unwrap();
        let zero = FieldPair::zeros(grid.len(), 0.1);
        let mut other = zero.clone();
        other.u[0] = Field::constant(grid.len(), 0.5);
        other.u[1] = grid.sample(|x| -2.0 * (2.0 * std::f64::consts::PI * x[0]).cos());
        let pair = difference_pair(&grid, &other, &zero).unwrap();
        assert!(pair.swapped);
        assert_eq!(pair.norm, 2.0);
        assert_eq!(sup(&pair.a).0, 1.0);
        assert!(sup(&pair.b).0 <= 1.0);
        assert_eq!(pair.location, [0.0, 0.0]);
    }

    #[test]
    fn rescaling_keeps_constants_and_center_value() {
        let grid = TorusGrid::square(2.0, 32, 0.1).unwrap();
        let c = constant_pair(&grid, 0.75);
        let r = rescaled_pair(&grid, &c, [0.3, 1.1], 0.1, 4.0, 8).unwrap();
        assert!(r.a.iter().all(|v| (v - 0.75).abs() < 1e-12));
        let f = grid.sample(|x| (std::f64::consts::PI * x[0]).sin() * (std::f64::consts::PI * x[1]).cos());
        let pair = LinearizedPair::normalized(f.0.clone(), vec![0.0; grid.len()], c.nodes.clone()).unwrap();
        let center = [0.4, 0.7];
        let r = rescaled_pair(&grid, &pair, center, 0.05, 2.0, 4).unwrap();
        let zero = r.nodes.iter().position(|y| *y == [0.0, 0.0]).unwrap();
        let exact = (std::f64::consts::PI * 0.4).sin() * (std::f64::consts::PI * 0.7).cos() / pair.norm;
        assert!((r.a[zero] - exact).abs() < 1e-8);
        assert!(matches!(rescaled_pair(&grid, &pair, center, 0.5, 2.0, 4), Err(Error::RadiusExceedsChart)));
    }

    #[test]
    fn zero_base_torus_sigma_is_one() {
        let grid = TorusGrid::square(2.0, 16, 0.1).unwrap();
        let problem = TorusProblem::new(&grid, &VortexSet::empty(), 1.0).unwrap();
        let op = LinearizedOperator::torus(&problem, &FieldPair::zeros(grid.len(), 1.0), 1e-12).unwrap();
        let modes = smallest_modes(&op, 3, &ModeOptions::default()).unwrap();
        assert!((modes[0].sigma - 1.0).abs() < 1e-9);
        // next level 1 + (2π/L)² is fourfold per component
        let next = 1.0 + std::f64::consts::PI * std::f64::consts::PI;
        assert!((modes[2].sigma - next).abs() < 1e-6 * next);
        assert!(modes.windows(2).all(|w| w[0].sigma <= w[1].sigma));
    }

    #[test]
    fn radial_modes_are_ordered_and_deterministic() {
        let sol = solve_radial([1, 1], 20.0, 400, &RadialOptions::default()).unwrap();
        let op = LinearizedOperator::radial(&sol, 0, 1e-8).unwrap();
        let a = smallest_modes(&op, 3, &ModeOptions::default()).unwrap();
        let b = smallest_modes(&op, 3, &ModeOptions::default()).unwrap();
        assert!(a.windows(2).all(|w| w[0].sigma <= w[1].sigma));
        assert!(a.iter().zip(&b).all(|(x, y)| x.sigma == y.sigma));
        assert!(a[0].sigma > 0.0);
    }
}
