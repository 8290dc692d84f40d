//! Small linear-algebra kernels: banded LU with partial pivoting and
//! restarted, right-preconditioned GMRES.

use nalgebra::DMatrix;

/// Banded matrix with `kl` sub- and `ku` super-diagonals. Storage has `kl`
/// extra super-diagonals for fill-in from pivoting.
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl, "({i},{j}) outside band");
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku {
            0.0
        } else {
            self.data[self.slot(i, j)]
        }
    }

    /// Adds `v` to entry `(i, j)`, which must lie inside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "({i},{j}) outside band");
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.data[self.slot(i, j)] * x[j]).sum()
            })
            .collect()
    }

    pub fn mul_vec_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            for j in lo..=hi {
                y[j] += self.data[self.slot(i, j)] * x[i];
            }
        }
        y
    }

    /// LU factorisation with partial pivoting. Returns `None` for an exactly
    /// singular pivot.
    pub fn factor(mut self) -> Option<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut piv = vec![0; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.slot(k, k)].abs();
            for i in k + 1..=last {
                let v = self.data[self.slot(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            piv[k] = p;
            let right = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=right {
                    let (a, b) = (self.slot(k, j), self.slot(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.slot(k, k)];
            for i in k + 1..=last {
                let s = self.slot(i, k);
                let l = self.data[s] / pivot;
                self.data[s] = l;
                if l != 0.0 {
                    for j in k + 1..=right {
                        let (a, b) = (self.slot(i, j), self.slot(k, j));
                        self.data[a] -= l * self.data[b];
                    }
                }
            }
        }
        Some(BandLu { m: self, piv })
    }
}

#[derive(Clone, Debug)]
pub struct BandLu {
    m: BandMatrix,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let BandMatrix { n, kl, ku, .. } = self.m;
        let a = &self.m;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] -= a.data[a.slot(i, k)] * xk;
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..=(i + kl + ku).min(n - 1) {
                s -= a.data[a.slot(i, j)] * x[j];
            }
            x[i] = s / a.data[a.slot(i, i)];
        }
        x
    }

    /// Solves `Aᵀx = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let BandMatrix { n, kl, ku, .. } = self.m;
        let a = &self.m;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for j in i.saturating_sub(kl + ku)..i {
                s -= a.data[a.slot(j, i)] * y[j];
            }
            y[i] = s / a.data[a.slot(i, i)];
        }
        for k in (0..n).rev() {
            let mut s = 0.0;
            for i in k + 1..=(k + kl).min(n - 1) {
                s += a.data[a.slot(i, k)] * y[i];
            }
            y[k] -= s;
            y.swap(k, self.piv[k]);
        }
        y
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Debug)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
    /// Smallest singular value of the last Arnoldi Hessenberg matrix, an
    /// estimate of `σ_min(A M⁻¹)`.
    pub sigma_min_estimate: f64,
}

/// Restarted GMRES for `A x = b` with right preconditioner `M⁻¹`, started
/// from zero.
pub fn gmres(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    precond: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    rtol: f64,
    restart: usize,
    max_iter: usize,
) -> GmresOutcome {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return GmresOutcome { x, iterations: 0, relative_residual: 0.0, converged: true, sigma_min_estimate: f64::NAN };
    }
    let mut total = 0;
    let mut sigma = f64::NAN;
    let mut r = b.to_vec();
    loop {
        let beta = norm2(&r);
        if beta <= rtol * bnorm || total >= max_iter {
            return GmresOutcome {
                x,
                iterations: total,
                relative_residual: beta / bnorm,
                converged: beta <= rtol * bnorm,
                sigma_min_estimate: sigma,
            };
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|t| t / beta).collect()];
        let mut h = DMatrix::<f64>::zeros(restart + 1, restart);
        let (mut cs, mut sn) = (vec![0.0; restart], vec![0.0; restart]);
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut k = 0;
        while k < restart && total < max_iter {
            let mut w = apply(&precond(&v[k]));
            for (i, vi) in v.iter().enumerate() {
                let hij = dot(&w, vi);
                h[(i, k)] = hij;
                w.iter_mut().zip(vi).for_each(|(a, b)| *a -= hij * b);
            }
            // one reorthogonalisation pass
            for (i, vi) in v.iter().enumerate() {
                let c = dot(&w, vi);
                h[(i, k)] += c;
                w.iter_mut().zip(vi).for_each(|(a, b)| *a -= c * b);
            }
            let wn = norm2(&w);
            h[(k + 1, k)] = wn;
            let raw = h.view((0, 0), (k + 2, k + 1)).into_owned();
            sigma = raw.singular_values().min();
            for i in 0..k {
                let t = cs[i] * h[(i, k)] + sn[i] * h[(i + 1, k)];
                h[(i + 1, k)] = -sn[i] * h[(i, k)] + cs[i] * h[(i + 1, k)];
                h[(i, k)] = t;
            }
            let d = h[(k, k)].hypot(h[(k + 1, k)]);
            cs[k] = h[(k, k)] / d;
            sn[k] = h[(k + 1, k)] / d;
            h[(k, k)] = d;
            h[(k + 1, k)] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k += 1;
            if g[k].abs() <= rtol * bnorm || wn == 0.0 {
                break;
            }
            v.push(w.iter().map(|t| t / wn).collect());
        }
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| h[(i, j)] * y[j]).sum();
            y[i] = (g[i] - s) / h[(i, i)];
        }
        let mut z = vec![0.0; n];
        for (yi, vi) in y.iter().zip(&v) {
            z.iter_mut().zip(vi).for_each(|(a, b)| *a += yi * b);
        }
        let dx = precond(&z);
        x.iter_mut().zip(&dx).for_each(|(a, b)| *a += b);
        let ax = apply(&x);
        r = b.iter().zip(&ax).map(|(a, b)| a - b).collect();
    }
}
