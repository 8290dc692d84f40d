//! Periodic Green's function checked against an Ewald lattice sum.

use std::f64::consts::PI;

use csvortex::geometry::{background_fields, green_function, TorusGreen, TorusGrid, VortexSet};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `E1(x)` for `x > 0`.
fn e1(x: f64) -> f64 {
    if x < 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            sum += term / k as f64;
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        // modified Lentz on the continued fraction e^{-x}/(x+1-1/(x+3-4/(x+5-...)))
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Mean-zero torus Green's function by Ewald splitting with parameter `alpha`.
fn ewald(lengths: [f64; 2], d: [f64; 2], alpha: f64) -> f64 {
    let area = lengths[0] * lengths[1];
    let mut recip = 0.0;
    let m = 40i32;
    for a in -m..=m {
        for b in -m..=m {
            if a == 0 && b == 0 {
                continue;
            }
            let k = [2.0 * PI * a as f64 / lengths[0], 2.0 * PI * b as f64 / lengths[1]];
            let k2 = k[0] * k[0] + k[1] * k[1];
            recip += (-k2 / (4.0 * alpha)).exp() * (k[0] * d[0] + k[1] * d[1]).cos() / k2;
        }
    }
    let mut real = 0.0;
    for a in -8..=8 {
        for b in -8..=8 {
            let x = d[0] - a as f64 * lengths[0];
            let y = d[1] - b as f64 * lengths[1];
            let r2 = x * x + y * y;
            if alpha * r2 < 700.0 {
                real += e1(alpha * r2);
            }
        }
    }
    recip / area + real / (4.0 * PI) - 1.0 / (4.0 * alpha * area)
}

#[test]
fn e1_reference_values() {
    // tabulated E1(1) and E1(0.5), E1(5)
    assert!((e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-14);
    assert!((e1(0.5) - 0.559_773_594_776_160_8).abs() < 1e-14);
    assert!((e1(5.0) - 0.001_148_295_591_275_325_8).abs() < 1e-16);
}

#[test]
fn ewald_sum_is_independent_of_splitting() {
    let l = [1.0, 1.7];
    for d in [[0.3, 0.2], [0.5, 0.85]] {
        let a = ewald(l, d, 4.0);
        let b = ewald(l, d, 12.0);
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn theta_formula_matches_lattice_sum() {
    for lengths in [[1.0, 1.0], [2.0, 1.0], [1.0, 2.5], [2.0 * PI, 2.0 * PI]] {
        let kern = TorusGreen::new(lengths);
        let alpha = 10.0 / (lengths[0] * lengths[1]);
        for f in [[0.5, 0.5], [0.1, 0.02], [0.37, 0.81], [0.9, 0.05], [0.001, 0.0]] {
            let d = [f[0] * lengths[0], f[1] * lengths[1]];
            let exact = ewald(lengths, d, alpha);
            let got = kern.value(d);
            assert!((got - exact).abs() < 1e-11, "{lengths:?} {d:?}: {got} vs {exact}");
        }
    }
}

#[test]
fn unit_square_value_at_half_period() {
    let oracle = ewald([1.0, 1.0], [0.5, 0.5], 10.0);
    let kern = TorusGreen::new([1.0, 1.0]);
    assert!((kern.value([0.5, 0.5]) - oracle).abs() < 1e-12);
    // the discrete spectral Green's function converges to the same value
    let mut prev = f64::INFINITY;
    for n in [32, 64, 128, 256] {
        let g = TorusGrid::square(1.0, n, 0.0).unwrap();
        let gq = green_function(&g, [0.0, 0.0]);
        let err = (gq[g.index(n / 2, n / 2)] - oracle).abs();
        assert!(err < prev, "n = {n}: {err}");
        prev = err;
    }
    assert!(prev < 1e-4, "{prev}");
}

#[test]
fn background_log_coefficient_approaches_two() {
    // u₀ ≈ 2ν ln|x - p| + O(1) at the nearest grid neighbour; the plain ratio
    // approaches 2 only like 1/ln h, the slope between refinements much faster
    let p = [0.0, 0.0];
    let mut samples = Vec::new();
    for n in [32, 64, 128, 256, 512] {
        let g = TorusGrid::square(1.0, n, 0.0).unwrap();
        let [u0, _] = background_fields(&g, &VortexSet::shared(p, [1, 0]));
        let k = g.index(1, 0);
        samples.push((g.distance(g.point(k), p).ln(), u0[k]));
    }
    let ratios: Vec<f64> = samples.iter().map(|(lr, u)| u / lr).collect();
    for w in ratios.windows(2) {
        assert!((w[1] - 2.0).abs() < (w[0] - 2.0).abs(), "{ratios:?}");
    }
    let slopes: Vec<f64> = samples.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    assert!((slopes.last().unwrap() - 2.0).abs() < 1e-3, "{slopes:?}");
}

#[test]
fn discrete_green_symmetry_is_second_order() {
    let n = 64;
    let g = TorusGrid::new(1.0, 1.3, n, n, 0.0).unwrap();
    let pts = [[0.11, 0.2], [0.6, 0.93], [0.45, 0.4]];
    let mut worst = 0.0f64;
    for &x in &pts {
        for &q in &pts {
            let gq = green_function(&g, q);
            let gx = green_function(&g, x);
            let spec_q = g.forward(gq.as_slice());
            let spec_x = g.forward(gx.as_slice());
            let a = csvortex::geometry::interpolate(&g, &spec_q, x);
            let b = csvortex::geometry::interpolate(&g, &spec_x, q);
            worst = worst.max((a - b).abs());
        }
    }
    let h = 1.0 / n as f64;
    assert!(worst <= 10.0 * h * h, "{worst}");
}
