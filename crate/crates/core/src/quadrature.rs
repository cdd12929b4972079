//! Globally adaptive Gauss-Legendre quadrature.
//!
//! Each panel is integrated with a 15-point rule on the whole panel and on its
//! two halves; the difference is the error estimate. The panel with the
//! largest estimate is split until the summed estimate meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::special::gauss_legendre;

const RULE_POINTS: usize = 15;
const MAX_PANELS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    abs_mass: f64,
    error: f64,
}

impl Panel {
    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = a + half;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for &(node, weight) in gauss_legendre(RULE_POINTS) {
        let v = f(mid + half * node);
        sum += weight * v;
        abs_sum += weight * v.abs();
    }
    (half * sum, half.abs() * abs_sum)
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, evals: &mut usize) -> Panel {
    let m = 0.5 * (a + b);
    let (left, la) = rule(f, a, m);
    let (right, ra) = rule(f, m, b);
    *evals += 2 * RULE_POINTS;
    Panel {
        a,
        b,
        left,
        right,
        abs_mass: la + ra,
        error: (whole - (left + right)).abs(),
    }
}

/// Integrates `f` over the finite interval `[a, b]` to absolute tolerance `tol`.
///
/// Convergence is also accepted once the error estimate falls to the rounding
/// floor of the integral of `|f|`, since no further splitting can improve it.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("interval", "integration limits must be finite"));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut evals = RULE_POINTS;
    let (whole, _) = rule(&f, a, b);
    let first = panel(&f, a, b, whole, &mut evals);
    let mut total_error = first.error;
    let mut abs_mass = first.abs_mass;
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Panel> = Vec::new();
    heap.push(first);
    loop {
        let goal = tol.max(64.0 * f64::EPSILON * abs_mass);
        let exhausted = heap.is_empty() || heap.len() + done.len() >= MAX_PANELS;
        if total_error <= goal || exhausted {
            let value: f64 = heap.iter().chain(done.iter()).map(Panel::value).sum();
            // Recompute to shed accumulated drift from the running sum.
            let error: f64 = heap.iter().chain(done.iter()).map(|p| p.error).sum();
            if error > goal {
                return Err(Error::Quadrature {
                    estimate: value,
                    error,
                    tolerance: tol,
                });
            }
            return Ok(Integral {
                value,
                error,
                evaluations: evals,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let m = 0.5 * (worst.a + worst.b);
        let width = worst.b - worst.a;
        if m <= worst.a || m >= worst.b || width <= 1e-14 * worst.a.abs().max(worst.b.abs()) {
            done.push(worst);
            continue;
        }
        let left = panel(&f, worst.a, m, worst.left, &mut evals);
        let right = panel(&f, m, worst.b, worst.right, &mut evals);
        total_error += left.error + right.error - worst.error;
        abs_mass += left.abs_mass + right.abs_mass - worst.abs_mass;
        heap.push(left);
        heap.push(right);
    }
}

/// Integrates over consecutive pieces `[p0, p1], [p1, p2], …`, splitting the
/// tolerance evenly. Breakpoints must be nondecreasing.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], tol: f64) -> Result<Integral> {
    let pieces = breakpoints.windows(2).filter(|w| w[1] > w[0]).count().max(1);
    let share = tol / pieces as f64;
    let mut out = Integral {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    for w in breakpoints.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let part = integrate(&f, w[0], w[1], share)?;
        out.value += part.value;
        out.error += part.error;
        out.evaluations += part.evaluations;
    }
    Ok(out)
}

/// Integrates `f` over `[a, ∞)` through the substitution `t = a + w(1 − s)/s`
/// with `w = max(|a|, 1)`, which maps the half line onto `s ∈ (0, 1]`.
pub fn integrate_upper_tail<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<Integral> {
    let w = a.abs().max(1.0);
    integrate(
        |s: f64| {
            let t = a + w * (1.0 - s) / s;
            let v = f(t);
            if v == 0.0 {
                0.0
            } else {
                v * w / (s * s)
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integrates `f` over `(−∞, a]`.
pub fn integrate_lower_tail<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<Integral> {
    integrate_upper_tail(|t| f(-t), -a, tol)
}
