use csvortex::radial::RadialSolution;

/// Scalar profile `v'' + v'/r + r²eᵛ(1 - r²eᵛ) = 0`, `v'(0) = 0`, integrated
/// by RK4 from the origin series; returns samples of `v` every `h`.
pub fn shoot(a: f64, h: f64, r_end: f64) -> (Vec<f64>, bool) {
    let rhs = |r: f64, v: f64, dv: f64| {
        let q = r * r * v.exp();
        [dv, -dv / r - q * (1.0 - q)]
    };
    let mut r = h;
    let mut y = [a - a.exp() * h.powi(4) / 16.0, -a.exp() * h.powi(3) / 4.0];
    let mut out = vec![a, y[0]];
    let steps = (r_end / h).round() as usize;
    for _ in 1..steps {
        let k1 = rhs(r, y[0], y[1]);
        let k2 = rhs(r + h / 2.0, y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]);
        let k3 = rhs(r + h / 2.0, y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]);
        let k4 = rhs(r + h, y[0] + h * k3[0], y[1] + h * k3[1]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        r += h;
        out.push(y[0]);
        // u = 2 ln r + v crossing zero: a was too large
        if 2.0 * r.ln() + y[0] > 0.0 {
            return (out, true);
        }
        // u' < 0: the profile turned back, a was too small
        if 2.0 / r + y[1] < 0.0 {
            return (out, false);
        }
    }
    (out, false)
}

pub fn scalar_oracle(h: f64) -> Vec<f64> {
    let (mut lo, mut hi) = (-5.0, 5.0);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if shoot(mid, h, 14.0).1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    shoot(lo, h, 8.0).0
}

/// Step of the shooting oracle.
pub const ORACLE_STEP: f64 = 1e-3;

/// `sup |v₁ - v_oracle|` at `r = 0, 0.5, …, 8`.
pub fn oracle_deviation(sol: &RadialSolution) -> f64 {
    let oracle = scalar_oracle(ORACLE_STEP);
    (0..=16)
        .map(|j| {
            let r = 0.5 * j as f64;
            (sol.regular_at(0, r) - oracle[(r / ORACLE_STEP).round() as usize]).abs()
        })
        .fold(0.0, f64::max)
}
