//! Graded radial mesh `r = R sinh(βξ)/sinh β` on a uniform `ξ ∈ [0, 1]` grid,
//! and fourth-order difference stencils in `ξ`.

use crate::error::{Error, Result};

/// Grading strength of the sinh map.
pub const BETA: f64 = 3.0;

/// Largest allowed ratio between adjacent mesh spacings.
pub const MAX_SPACING_RATIO: f64 = 1.05;

#[derive(Clone, Debug, PartialEq)]
pub struct RadialMesh {
    radius: f64,
    intervals: usize,
    r: Vec<f64>,
    /// `dr/dξ` and `d²r/dξ²` at the nodes.
    dr: Vec<f64>,
    d2r: Vec<f64>,
}

impl RadialMesh {
    pub fn new(radius: f64, intervals: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("mesh radius must be positive, got {radius}")));
        }
        if intervals < 8 {
            return Err(Error::InvalidArgument(format!("mesh needs at least 8 intervals, got {intervals}")));
        }
        let s = BETA.sinh();
        let xi = |k: usize| k as f64 / intervals as f64;
        let r: Vec<f64> = (0..=intervals).map(|k| radius * (BETA * xi(k)).sinh() / s).collect();
        let dr = (0..=intervals).map(|k| radius * BETA * (BETA * xi(k)).cosh() / s).collect();
        let d2r = (0..=intervals).map(|k| radius * BETA * BETA * (BETA * xi(k)).sinh() / s).collect();
        let mesh = RadialMesh { radius, intervals, r, dr, d2r };
        let ratio = mesh.max_spacing_ratio();
        if ratio > MAX_SPACING_RATIO {
            return Err(Error::InvalidArgument(format!(
                "mesh of {intervals} intervals has spacing ratio {ratio:.4} above {MAX_SPACING_RATIO}"
            )));
        }
        Ok(mesh)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of nodes, `intervals + 1`.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    fn step(&self) -> f64 {
        1.0 / self.intervals as f64
    }

    pub fn max_spacing_ratio(&self) -> f64 {
        self.r
            .windows(3)
            .map(|w| {
                let (a, b) = (w[1] - w[0], w[2] - w[1]);
                (b / a).max(a / b)
            })
            .fold(1.0, f64::max)
    }

    /// Quadrature weights for `∫ f r dr` over dual cells
    /// `[r_{k-½}, r_{k+½}]`, all positive.
    pub fn area_weights(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|k| {
                let lo = if k == 0 { 0.0 } else { 0.5 * (self.r[k - 1] + self.r[k]) };
                let hi = if k + 1 == n { self.r[k] } else { 0.5 * (self.r[k] + self.r[k + 1]) };
                0.5 * (hi * hi - lo * lo)
            })
            .collect()
    }

    /// Position `ξ ∈ [0, 1]` of radius `r`.
    pub fn xi_of(&self, r: f64) -> f64 {
        (r * BETA.sinh() / self.radius).asinh() / BETA
    }

    /// Stencil `(node, weight)` for `d/dr` at node `k`. Ghost nodes below
    /// the origin are folded back with the given parity (`+1` for even
    /// functions of `r`).
    pub fn first_derivative(&self, k: usize, parity: f64) -> Vec<(usize, f64)> {
        let offs = self.offsets(k, true);
        let w = fd_weights(&offs, 1);
        let scale = 1.0 / (self.step() * self.dr[k]);
        self.fold(k, &offs, &w, scale, parity)
    }

    /// Stencil for the radial Laplacian `f'' + f'/r` at node `k`. At the
    /// origin it is `2 f''(0)`, valid for even `f`.
    pub fn laplacian(&self, k: usize, parity: f64) -> Vec<(usize, f64)> {
        let offs = self.offsets(k, false);
        let (w1, w2) = (fd_weights(&offs, 1), fd_weights(&offs, 2));
        let h = self.step();
        let (rp, rpp) = (self.dr[k], self.d2r[k]);
        let combined: Vec<f64> = if k == 0 {
            w2.iter().map(|&b| 2.0 * b / (h * h * rp * rp)).collect()
        } else {
            let r = self.r[k];
            w1.iter()
                .zip(&w2)
                .map(|(&a, &b)| b / (h * h * rp * rp) + a / h * (1.0 / (r * rp) - rpp / (rp * rp * rp)))
                .collect()
        };
        self.fold(k, &offs, &combined, 1.0, parity)
    }

    fn offsets(&self, k: usize, first: bool) -> Vec<i64> {
        let m = self.intervals;
        if k + 2 <= m {
            vec![-2, -1, 0, 1, 2]
        } else if k + 1 == m {
            vec![-4, -3, -2, -1, 0, 1]
        } else if first {
            vec![-4, -3, -2, -1, 0]
        } else {
            vec![-5, -4, -3, -2, -1, 0]
        }
    }

    fn fold(&self, k: usize, offs: &[i64], w: &[f64], scale: f64, parity: f64) -> Vec<(usize, f64)> {
        offs.iter()
            .zip(w)
            .map(|(&o, &wt)| {
                let j = k as i64 + o;
                if j < 0 {
                    ((-j) as usize, parity * wt * scale)
                } else {
                    (j as usize, wt * scale)
                }
            })
            .collect()
    }
}

/// Finite-difference weights for the `order`-th derivative at offset 0 on
/// integer nodes `offs` (unit spacing), by Fornberg's recursion.
pub(crate) fn fd_weights(offs: &[i64], order: usize) -> Vec<f64> {
    let n = offs.len();
    let x: Vec<f64> = offs.iter().map(|&o| o as f64).collect();
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0];
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i];
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[order]).collect()
}
