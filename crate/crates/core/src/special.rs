//! Standard normal CDF/density and Gauss-Legendre rules.
//!
//! `normal_cdf` goes through the complementary error function so that both
//! tails keep full relative precision. `normal_cdf_increment` returns
//! `Φ(x + d) − Φ(x)` accurately even when `d` is tiny relative to `x`, which
//! is what the leading-term integrands and the fifth-order Taylor remainder
//! actually need.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use libm::erfc;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
///
/// `x²` is split into its rounded value and the exact rounding error so the
/// exponential keeps full relative precision for large `|x|`.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    let sq = x * x;
    let err = x.mul_add(x, -sq);
    INV_SQRT_2PI * (-0.5 * sq).exp() * (1.0 - 0.5 * err)
}

/// Derivative of the standard normal density, `φ′(x) = −x φ(x)`.
#[inline]
pub fn normal_pdf_derivative(x: f64) -> f64 {
    -x * normal_pdf(x)
}

const MILLS_CUTOVER: f64 = 5.0;

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < -MILLS_CUTOVER {
        return upper_tail(-x);
    }
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 − Φ(x)` without cancellation for large `x`.
pub fn normal_sf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x > MILLS_CUTOVER {
        return upper_tail(x);
    }
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// `1 − Φ(t)` for `t > 5` as `φ(t)` times the Mills ratio, the latter from its
/// continued fraction `1/(t + 1/(t + 2/(t + …)))` evaluated by modified Lentz.
fn upper_tail(t: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    const TINY: f64 = 1e-300;
    let mut f = t;
    let mut c = t;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64;
        d = t + a * d;
        d = if d.abs() < TINY { TINY } else { d };
        c = t + a / c;
        c = if c.abs() < TINY { TINY } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    normal_pdf(t) / f
}

/// `Φ(x + d) − Φ(x)`, accurate relative to the size of the increment.
///
/// Short increments are integrated with Gauss-Legendre against the density;
/// long ones fall back to tail-aware differences of the distribution function.
pub fn normal_cdf_increment(x: f64, d: f64) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    if !x.is_finite() || !d.is_finite() {
        return normal_cdf(x + d) - normal_cdf(x);
    }
    if d.abs() <= 2.0 {
        let rule = gauss_legendre(if d.abs() <= 0.25 { 12 } else { 24 });
        let half = 0.5 * d;
        let mid = x + half;
        let sum: f64 = rule
            .iter()
            .map(|&(node, weight)| weight * normal_pdf(mid + half * node))
            .sum();
        return half * sum;
    }
    let a = x + d;
    if x >= 0.0 && a >= 0.0 {
        normal_sf(x) - normal_sf(a)
    } else {
        normal_cdf(a) - normal_cdf(x)
    }
}

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[−1, 1]`.
///
/// Rules are computed once by Newton iteration on the Legendre recurrence and
/// cached. Only the sizes 12, 15 and 24 are available.
pub fn gauss_legendre(m: usize) -> &'static [(f64, f64)] {
    static R12: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static R15: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static R24: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    match m {
        12 => R12.get_or_init(|| legendre_rule(12)),
        15 => R15.get_or_init(|| legendre_rule(15)),
        24 => R24.get_or_init(|| legendre_rule(24)),
        _ => panic!("no cached Gauss-Legendre rule with {m} points"),
    }
}

fn legendre_rule(m: usize) -> Vec<(f64, f64)> {
    assert!(m >= 1);
    let mut rule = vec![(0.0, 0.0); m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        // Tricomi initial guess for the i-th root.
        let mut z = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let step = p / d;
            z -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule[i] = (-z, w);
        rule[m - 1 - i] = (z, w);
    }
    rule
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
