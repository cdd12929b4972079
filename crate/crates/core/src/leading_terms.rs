//! Approximation curves evaluated on a grid: the leading term `L_n`, its split
//! at `α b_n`, the polynomial form `Q_{n1}`, the non-Studentized terms and the
//! one-term Edgeworth forms.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::functionals::{compute_delta, compute_functionals, TruncationFunctionals};
use crate::special::{normal_cdf_increment, normal_pdf, normal_pdf_derivative};

/// Expectation error budget as a fraction of `δ_n / n`; the resulting curve
/// error is this fraction of `δ_n`.
pub const CURVE_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TermKind {
    #[serde(rename = "L_n")]
    Ln,
    #[serde(rename = "M_n1")]
    Mn1,
    #[serde(rename = "M_n2")]
    Mn2,
    #[serde(rename = "Q_n1")]
    Qn1,
    #[serde(rename = "L_n1")]
    Ln1,
    #[serde(rename = "L_n2")]
    Ln2,
    #[serde(rename = "edgeworth_student")]
    EdgeworthStudent,
    #[serde(rename = "edgeworth_plain")]
    EdgeworthPlain,
    #[serde(rename = "empirical_cdf")]
    EmpiricalCdf,
}

impl TermKind {
    pub fn label(self) -> &'static str {
        match self {
            TermKind::Ln => "L_n",
            TermKind::Mn1 => "M_n1",
            TermKind::Mn2 => "M_n2",
            TermKind::Qn1 => "Q_n1",
            TermKind::Ln1 => "L_n1",
            TermKind::Ln2 => "L_n2",
            TermKind::EdgeworthStudent => "edgeworth_student",
            TermKind::EdgeworthPlain => "edgeworth_plain",
            TermKind::EmpiricalCdf => "empirical_cdf",
        }
    }
}

/// A strictly increasing set of evaluation points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("grid", "grid is empty"));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("grid", "grid points must be finite"));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok(Self(points))
    }

    /// Points `min, min + step, …` up to `max` (inclusive within rounding).
    ///
    /// When `min` is an integer multiple of `step` the points are formed as
    /// `k·step`, so grids through the origin contain an exact zero.
    pub fn uniform(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) || step <= 0.0 || max < min {
            return Err(Error::invalid("grid", "need finite min <= max and step > 0"));
        }
        let count = ((max - min) / step + 1e-9).floor() as usize;
        if count > 50_000_000 {
            return Err(Error::invalid("grid", "grid has too many points"));
        }
        let k0 = (min / step).round();
        let aligned = (min / step - k0).abs() < 1e-9;
        let points = (0..=count)
            .map(|i| {
                if aligned {
                    (k0 + i as f64) * step
                } else {
                    min + i as f64 * step
                }
            })
            .collect();
        Self::new(points)
    }

    /// `[−10, 10]` at step 0.005 with `±x0` and `x1` added.
    pub fn default_with(x0: f64, x1: f64) -> Self {
        let mut pts: Vec<f64> = (-2000..=2000).map(|k| k as f64 / 200.0).collect();
        pts.extend([-x0, x0, x1]);
        Self::new(pts).expect("finite default grid")
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self::default_with(2.0, 0.0)
    }
}

/// One approximation term evaluated on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveOnGrid {
    pub term: TermKind,
    pub dist: String,
    pub n: u64,
    pub alpha: Option<f64>,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl CurveOnGrid {
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Value at a grid point, if present.
    pub fn at(&self, x: f64) -> Option<f64> {
        self.grid.iter().position(|g| *g == x).map(|i| self.values[i])
    }

    /// `max_i |self_i − other_i|` over a shared grid.
    pub fn max_gap(&self, other: &CurveOnGrid) -> f64 {
        assert_eq!(self.grid, other.grid, "curves on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `Φ(x(1 + u²)^{1/2} − u) − Φ(x)`.
pub fn studentized_increment(x: f64, u: f64) -> f64 {
    let d = if u.abs() <= 1e8 {
        let w = u * u;
        x * w / ((1.0 + w).sqrt() + 1.0) - u
    } else {
        let r = u.recip();
        u.abs() * x * (1.0 + r * r).sqrt() - x - u
    };
    normal_cdf_increment(x, d)
}

/// Which part of the expectation a term integrates.
#[derive(Debug, Clone, Copy)]
enum Region {
    All,
    Outside(f64),
    Inside(f64),
}

impl Region {
    fn keeps(self, t: f64) -> bool {
        match self {
            Region::All => true,
            Region::Outside(c) => t.abs() > c,
            Region::Inside(c) => t.abs() <= c,
        }
    }
}

fn eval_points<F>(grid: &Grid, f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    grid.points().par_iter().map(|&x| f(x)).collect()
}

/// `n E[(Φ(x(1 + (X/b)²)^{1/2} − X/b) − Φ(x)) I(region)]` on the grid.
fn studentized_expectation(
    dist: &DistributionSpec,
    n: u64,
    b: f64,
    delta: f64,
    region: Region,
    breaks: &[f64],
    grid: &Grid,
) -> Result<Vec<f64>> {
    let nf = n as f64;
    let tol = CURVE_TOLERANCE * delta / nf;
    eval_points(grid, |x| {
        let e = dist.expect(
            |t| {
                if region.keeps(t) {
                    studentized_increment(x, t / b)
                } else {
                    0.0
                }
            },
            breaks,
            tol,
        )?;
        Ok(nf * e)
    })
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n", "sample size must be at least 1"));
    }
    Ok(())
}

/// `L_n(x) = n E[Φ(x(1 + (X/b_n)²)^{1/2} − X/b_n) − Φ(x)]`.
pub fn eval_ln(dist: &DistributionSpec, n: u64, grid: &Grid) -> Result<CurveOnGrid> {
    check_n(n)?;
    // The term is scale-free; evaluating at unit scale makes that exact.
    let dist = &dist.unit();
    let (b, delta) = compute_delta(dist, n)?;
    let values = studentized_expectation(dist, n, b, delta.total(), Region::All, &[-b, b], grid)?;
    Ok(CurveOnGrid {
        term: TermKind::Ln,
        dist: dist.name().to_string(),
        n,
        alpha: None,
        grid: grid.points().to_vec(),
        values,
    })
}

/// `(M_{n1}, M_{n2})`: the leading term restricted to `|X| > α b_n` and to
/// `|X| ≤ α b_n`. Both pieces carry the subtracted `Φ(x)`, so they add up to
/// `L_n`.
pub fn eval_mn_split(dist: &DistributionSpec, n: u64, alpha: f64, grid: &Grid) -> Result<(CurveOnGrid, CurveOnGrid)> {
    check_n(n)?;
    let dist = &dist.unit();
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(
            "alpha",
            format!("alpha must lie in (0, 1], got {alpha}"),
        ));
    }
    let (b, delta) = compute_delta(dist, n)?;
    let cut = alpha * b;
    let breaks = [-b, -cut, cut, b];
    let outer = studentized_expectation(dist, n, b, delta.total(), Region::Outside(cut), &breaks, grid)?;
    let inner = studentized_expectation(dist, n, b, delta.total(), Region::Inside(cut), &breaks, grid)?;
    let curve = |term, values| CurveOnGrid {
        term,
        dist: dist.name().to_string(),
        n,
        alpha: Some(alpha),
        grid: grid.points().to_vec(),
        values,
    };
    Ok((curve(TermKind::Mn1, outer), curve(TermKind::Mn2, inner)))
}

/// `Q_{n1}(x) = −u₁φ(x) + u₃(2x² + 1)φ(x)/6 + u₄x(x² − 3)φ(x)/12`.
pub fn eval_qn1(functionals: &TruncationFunctionals, grid: &Grid) -> CurveOnGrid {
    let [u1, _, u3, u4] = functionals.u;
    let values = grid
        .points()
        .iter()
        .map(|&x| {
            let poly = -u1 + u3 * (2.0 * x * x + 1.0) / 6.0 + u4 * x * (x * x - 3.0) / 12.0;
            poly * normal_pdf(x)
        })
        .collect();
    CurveOnGrid {
        term: TermKind::Qn1,
        dist: functionals.dist.clone(),
        n: functionals.n,
        alpha: Some(functionals.alpha),
        grid: grid.points().to_vec(),
        values,
    }
}

/// `n E[Φ(x − X/s) − Φ(x)] − ½ n s⁻² φ′(x)` for a scale `s`.
fn plain_term(dist: &DistributionSpec, n: u64, s: f64, delta: f64, grid: &Grid) -> Result<Vec<f64>> {
    let nf = n as f64;
    let tol = CURVE_TOLERANCE * delta / nf;
    let half_curv = 0.5 * nf / (s * s);
    eval_points(grid, |x| {
        let e = dist.expect(|t| normal_cdf_increment(x, -t / s), &[-s, s], tol)?;
        Ok(nf * e - half_curv * normal_pdf_derivative(x))
    })
}

/// `L_{n1}(x) = n E[Φ(x − X/b_n) − Φ(x)] − ½ n b_n⁻² φ′(x)`.
pub fn eval_ln1(dist: &DistributionSpec, n: u64, grid: &Grid) -> Result<CurveOnGrid> {
    check_n(n)?;
    let dist = &dist.unit();
    let (b, delta) = compute_delta(dist, n)?;
    Ok(CurveOnGrid {
        term: TermKind::Ln1,
        dist: dist.name().to_string(),
        n,
        alpha: None,
        grid: grid.points().to_vec(),
        values: plain_term(dist, n, b, delta.total(), grid)?,
    })
}

/// `L_{n2}`: `L_{n1}` with `b_n` replaced by `n^{1/2} σ_n`.
pub fn eval_ln2(dist: &DistributionSpec, n: u64, grid: &Grid) -> Result<CurveOnGrid> {
    check_n(n)?;
    let dist = &dist.unit();
    let (b, delta) = compute_delta(dist, n)?;
    let sigma2 = dist.truncated_moment(2, b)?;
    if sigma2 <= 0.0 {
        return Err(Error::invalid("dist", "sigma_n^2 = 0"));
    }
    let s = (n as f64 * sigma2).sqrt();
    Ok(CurveOnGrid {
        term: TermKind::Ln2,
        dist: dist.name().to_string(),
        n,
        alpha: None,
        grid: grid.points().to_vec(),
        values: plain_term(dist, n, s, delta.total(), grid)?,
    })
}

/// `γ (2x² + 1) φ(x) / (6√n)`, the Studentized one-term Edgeworth correction.
pub fn edgeworth_student(gamma: f64, n: u64, grid: &Grid) -> Result<CurveOnGrid> {
    check_n(n)?;
    if !gamma.is_finite() {
        return Err(Error::invalid("gamma", "third moment must be finite"));
    }
    let c = gamma / (6.0 * (n as f64).sqrt());
    Ok(CurveOnGrid {
        term: TermKind::EdgeworthStudent,
        dist: String::new(),
        n,
        alpha: None,
        grid: grid.points().to_vec(),
        values: grid
            .points()
            .iter()
            .map(|&x| c * (2.0 * x * x + 1.0) * normal_pdf(x))
            .collect(),
    })
}

/// `−γ (x² − 1) φ(x) / (6√n)`, the one-term Edgeworth correction for the
/// standardized mean.
pub fn edgeworth_plain(gamma: f64, n: u64, grid: &Grid) -> Result<CurveOnGrid> {
    check_n(n)?;
    if !gamma.is_finite() {
        return Err(Error::invalid("gamma", "third moment must be finite"));
    }
    let c = gamma / (6.0 * (n as f64).sqrt());
    Ok(CurveOnGrid {
        term: TermKind::EdgeworthPlain,
        dist: String::new(),
        n,
        alpha: None,
        grid: grid.points().to_vec(),
        values: grid
            .points()
            .iter()
            .map(|&x| -c * (x * x - 1.0) * normal_pdf(x))
            .collect(),
    })
}

/// Evaluates `term` for `(dist, n, alpha)`; the single entry point used by the
/// command line.
pub fn eval_term(term: TermKind, dist: &DistributionSpec, n: u64, alpha: f64, grid: &Grid) -> Result<CurveOnGrid> {
    match term {
        TermKind::Ln => eval_ln(dist, n, grid),
        TermKind::Mn1 => Ok(eval_mn_split(dist, n, alpha, grid)?.0),
        TermKind::Mn2 => Ok(eval_mn_split(dist, n, alpha, grid)?.1),
        TermKind::Qn1 => Ok(eval_qn1(&compute_functionals(dist, n, alpha)?, grid)),
        TermKind::Ln1 => eval_ln1(dist, n, grid),
        TermKind::Ln2 => eval_ln2(dist, n, grid),
        TermKind::EdgeworthStudent | TermKind::EdgeworthPlain => {
            let gamma = dist
                .gamma()
                .ok_or_else(|| Error::invalid("dist", format!("{} has no finite third moment", dist.name())))?;
            let mut c = if term == TermKind::EdgeworthStudent {
                edgeworth_student(gamma, n, grid)?
            } else {
                edgeworth_plain(gamma, n, grid)?
            };
            c.dist = dist.name().to_string();
            Ok(c)
        }
        TermKind::EmpiricalCdf => Err(Error::invalid("term", "the empirical cdf is not a leading term")),
    }
}

/// Remainder of the fifth-order expansion of `Φ(x(1 + u²)^{1/2} − u)`:
/// returns `|Φ(x(1+u²)^{1/2} − u) − Φ(x) − p(x, u) φ(x)|` with
/// `p = −u + u³(2x² + 1)/6 + u⁴x(x² − 3)/12`, and its ratio to `|u|⁵`
/// (zero when `u = 0`).
pub fn taylor5_check(x: f64, u: f64) -> Result<(f64, f64)> {
    if u.is_nan() || u.abs() > 1.0 {
        return Err(Error::invalid("u", format!("|u| must not exceed 1, got {u}")));
    }
    if !x.is_finite() {
        return Err(Error::invalid("x", "x must be finite"));
    }
    if u == 0.0 {
        return Ok((0.0, 0.0));
    }
    let u3 = u * u * u;
    let poly = -u + u3 * (2.0 * x * x + 1.0) / 6.0 + u3 * u * x * (x * x - 3.0) / 12.0;
    let err = (studentized_increment(x, u) - poly * normal_pdf(x)).abs();
    Ok((err, err / u.abs().powi(5)))
}

/// Result of sweeping [`taylor5_check`] over a rectangular `(x, u)` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorSweep {
    pub max_ratio: f64,
    pub argmax_x: f64,
    pub argmax_u: f64,
}

/// Sweeps `nx` equally spaced `x` in `[−6, 6]` and `nu` equally spaced `u` in
/// `[−1, 1]`, endpoints included.
pub fn taylor5_sweep(nx: usize, nu: usize) -> Result<TaylorSweep> {
    if nx < 2 || nu < 2 {
        return Err(Error::invalid("sweep", "need at least two points per axis"));
    }
    let mut best = TaylorSweep {
        max_ratio: 0.0,
        argmax_x: 0.0,
        argmax_u: 0.0,
    };
    for i in 0..nx {
        let x = -6.0 + 12.0 * i as f64 / (nx - 1) as f64;
        for j in 0..nu {
            let u = -1.0 + 2.0 * j as f64 / (nu - 1) as f64;
            let (_, r) = taylor5_check(x, u)?;
            if r > best.max_ratio {
                best = TaylorSweep {
                    max_ratio: r,
                    argmax_x: x,
                    argmax_u: u,
                };
            }
        }
    }
    Ok(best)
}

/// `φ(0) = (2π)^{-1/2}`, exposed for checks of the closed forms.
pub fn phi0() -> f64 {
    1.0 / (2.0 * PI).sqrt()
}
