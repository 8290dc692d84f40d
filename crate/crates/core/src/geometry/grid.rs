//! Periodic rectangular lattice on the flat torus and its Fourier calculus.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Grid sizes below this are rejected; the spectral tables need room for a
/// few resolved modes on each axis.
pub const MIN_GRID_SIZE: usize = 16;

/// A scalar field sampled on a [`TorusGrid`], row-major with `x` fastest.
#[derive(Clone, PartialEq, Debug)]
pub struct Field(pub Vec<f64>);

impl Field {
    pub fn zeros(len: usize) -> Self {
        Field(vec![0.0; len])
    }

    pub fn constant(len: usize, value: f64) -> Self {
        Field(vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Arithmetic mean over grid points (the discrete analogue of
    /// `(1/|T|) ∫ f`). Summed sequentially so results are reproducible.
    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Field {
        Field(self.0.par_iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64 + Sync) -> Field {
        assert_eq!(self.len(), other.len(), "field length mismatch");
        Field(self.0.par_iter().zip(other.0.par_iter()).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn scaled(&self, s: f64) -> Field {
        self.map(|v| v * s)
    }

    pub fn axpy(&mut self, a: f64, x: &Field) {
        self.0.iter_mut().zip(&x.0).for_each(|(y, &xv)| *y += a * xv);
    }

    /// `max |a - b|` over grid points.
    pub fn distance(&self, other: &Field) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl std::ops::Index<usize> for Field {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for Field {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Periodic `n₁ × n₂` lattice on `[0, L₁) × [0, L₂)` with precomputed FFT plans
/// and angular wavenumber tables.
#[derive(Clone)]
pub struct TorusGrid {
    lengths: [f64; 2],
    sizes: [usize; 2],
    delta: f64,
    wavenumbers: [Vec<f64>; 2],
    plans: [Arc<dyn Fft<f64>>; 2],
    inverse_plans: [Arc<dyn Fft<f64>>; 2],
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("lengths", &self.lengths)
            .field("sizes", &self.sizes)
            .field("delta", &self.delta)
            .finish()
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.lengths == other.lengths && self.sizes == other.sizes && self.delta == other.delta
    }
}

impl TorusGrid {
    /// Builds the lattice. Sizes must be even and at least [`MIN_GRID_SIZE`];
    /// the excision radius must satisfy `0 ≤ δ < min(L₁, L₂)/2`.
    pub fn new(l1: f64, l2: f64, n1: usize, n2: usize, delta: f64) -> Result<Self> {
        if !(l1 > 0.0 && l2 > 0.0) || !l1.is_finite() || !l2.is_finite() {
            return Err(Error::InvalidGrid(format!("side lengths must be positive, got ({l1}, {l2})")));
        }
        for n in [n1, n2] {
            if n % 2 != 0 {
                return Err(Error::InvalidGrid("grid size must be even".into()));
            }
            if n < MIN_GRID_SIZE {
                return Err(Error::InvalidGrid(format!("grid size must be at least {MIN_GRID_SIZE}, got {n}")));
            }
        }
        if !(delta >= 0.0 && delta < 0.5 * l1.min(l2)) {
            return Err(Error::InvalidGrid(format!("excision radius {delta} outside [0, min(L)/2)")));
        }
        let mut planner = FftPlanner::new();
        let wavenumbers = [angular_wavenumbers(n1, l1), angular_wavenumbers(n2, l2)];
        Ok(TorusGrid {
            lengths: [l1, l2],
            sizes: [n1, n2],
            delta,
            wavenumbers,
            plans: [planner.plan_fft_forward(n1), planner.plan_fft_forward(n2)],
            inverse_plans: [planner.plan_fft_inverse(n1), planner.plan_fft_inverse(n2)],
        })
    }

    /// Square torus of side `l` with `n × n` points.
    pub fn square(l: f64, n: usize, delta: f64) -> Result<Self> {
        Self::new(l, l, n, n, delta)
    }

    pub fn lengths(&self) -> [f64; 2] {
        self.lengths
    }

    pub fn sizes(&self) -> [usize; 2] {
        self.sizes
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta < 0.5 * self.lengths[0].min(self.lengths[1])) {
            return Err(Error::InvalidGrid(format!("excision radius {delta} outside [0, min(L)/2)")));
        }
        let mut g = self.clone();
        g.delta = delta;
        Ok(g)
    }

    pub fn spacing(&self) -> [f64; 2] {
        [self.lengths[0] / self.sizes[0] as f64, self.lengths[1] / self.sizes[1] as f64]
    }

    /// Area element `h₁h₂` of the midpoint rule.
    pub fn cell_area(&self) -> f64 {
        let [h1, h2] = self.spacing();
        h1 * h2
    }

    pub fn area(&self) -> f64 {
        self.lengths[0] * self.lengths[1]
    }

    pub fn len(&self) -> usize {
        self.sizes[0] * self.sizes[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.sizes[0] + i
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        let [h1, h2] = self.spacing();
        let (i, j) = (idx % self.sizes[0], idx / self.sizes[0]);
        [i as f64 * h1, j as f64 * h2]
    }

    pub fn wavenumbers(&self, axis: usize) -> &[f64] {
        &self.wavenumbers[axis]
    }

    /// Reduces a point into the fundamental cell `[0, L₁) × [0, L₂)`.
    pub fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0].rem_euclid(self.lengths[0]), p[1].rem_euclid(self.lengths[1])]
    }

    /// Minimum-image displacement `x - y` with components in `[-L/2, L/2)`.
    pub fn displacement(&self, x: [f64; 2], y: [f64; 2]) -> [f64; 2] {
        let f = |d: f64, l: f64| (d + 0.5 * l).rem_euclid(l) - 0.5 * l;
        [f(x[0] - y[0], self.lengths[0]), f(x[1] - y[1], self.lengths[1])]
    }

    pub fn distance(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        let [dx, dy] = self.displacement(x, y);
        dx.hypot(dy)
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn sample(&self, f: impl Fn([f64; 2]) -> f64 + Sync) -> Field {
        Field((0..self.len()).into_par_iter().map(|k| f(self.point(k))).collect())
    }

    /// Midpoint-rule integral `Σ f h₁h₂`.
    pub fn integrate(&self, f: &Field) -> f64 {
        f.iter().sum::<f64>() * self.cell_area()
    }

    /// Grid points inside the closed ball `|x - c| ≤ r` (minimum-image metric).
    pub fn ball_mask(&self, center: [f64; 2], r: f64) -> Vec<bool> {
        (0..self.len()).map(|k| self.distance(self.point(k), center) <= r).collect()
    }

    /// Forward 2-D DFT of a real field (unnormalised).
    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        assert_eq!(f.len(), self.len(), "field length mismatch");
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft2(&mut buf, false);
        buf
    }

    /// Inverse 2-D DFT normalised by `1/(n₁n₂)`, keeping the real part. Taking
    /// the real part symmetrises the unpaired Nyquist modes.
    pub fn inverse_real(&self, mut spec: Vec<Complex64>) -> Field {
        self.fft2(&mut spec, true);
        let norm = 1.0 / self.len() as f64;
        Field(spec.into_iter().map(|c| c.re * norm).collect())
    }

    /// Applies the Fourier multiplier `m(k₁, k₂)` to `f`.
    pub fn apply_multiplier(&self, f: &Field, m: impl Fn(f64, f64) -> f64 + Sync) -> Field {
        let mut spec = self.forward(&f.0);
        self.scale_spectrum(&mut spec, |k1, k2| Complex64::new(m(k1, k2), 0.0));
        self.inverse_real(spec)
    }

    pub(crate) fn scale_spectrum(&self, spec: &mut [Complex64], m: impl Fn(f64, f64) -> Complex64 + Sync) {
        let n1 = self.sizes[0];
        let (k1s, k2s) = (&self.wavenumbers[0], &self.wavenumbers[1]);
        spec.par_chunks_mut(n1).enumerate().for_each(|(j, row)| {
            let k2 = k2s[j];
            for (c, &k1) in row.iter_mut().zip(k1s) {
                *c *= m(k1, k2);
            }
        });
    }

    fn fft2(&self, buf: &mut [Complex64], inverse: bool) {
        let [n1, n2] = self.sizes;
        let plans = if inverse { &self.inverse_plans } else { &self.plans };
        let rows_per_task = (4096 / n1).max(1);
        buf.par_chunks_mut(n1 * rows_per_task).for_each(|chunk| plans[0].process(chunk));
        let mut t = transpose(buf, n1, n2);
        let cols_per_task = (4096 / n2).max(1);
        t.par_chunks_mut(n2 * cols_per_task).for_each(|chunk| plans[1].process(chunk));
        let back = transpose(&t, n2, n1);
        buf.copy_from_slice(&back);
    }
}

/// Angular wavenumbers `2πk/L` in FFT order, `k = 0, 1, …, n/2-1, -n/2, …, -1`.
fn angular_wavenumbers(n: usize, l: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let k = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
            2.0 * PI * k / l
        })
        .collect()
}

fn transpose(a: &[Complex64], cols: usize, rows: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len()];
    out.par_chunks_mut(rows).enumerate().for_each(|(i, dst)| {
        for (j, d) in dst.iter_mut().enumerate() {
            *d = a[j * cols + i];
        }
    });
    out
}
