//! Zero-mean test laws with truncated moments, tails, distribution functions
//! and deterministic samplers.
//!
//! Every law is a base family at unit scale times a positive scale factor.
//! Moments, tails and expectations are evaluated in base coordinates, so
//! `X ↦ cX` changes results only through the exact power `c^j`.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StudentT};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_lower_tail, integrate_pieces, integrate_upper_tail};

const SQRT3: f64 = 1.732_050_807_568_877_2;
pub const MAX_MOMENT_ORDER: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    Interval { lo: f64, hi: f64 },
    Atoms(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
enum Family {
    Discrete { atoms: Vec<f64>, probs: Vec<f64> },
    Uniform,
    CenteredExponential,
    StudentT { nu: f64, log_norm: f64 },
    ParetoTail,
}

/// A zero-mean law: a base family at unit scale, multiplied by `scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    name: String,
    family: Family,
    scale: f64,
}

impl DistributionSpec {
    pub fn rademacher() -> Self {
        Self::discrete("rademacher", vec![-1.0, 1.0], vec![0.5, 0.5]).expect("valid atoms")
    }

    /// Atoms −1, 0, 2 with probabilities ½, ¼, ¼.
    pub fn three_point() -> Self {
        Self::discrete("three-point", vec![-1.0, 0.0, 2.0], vec![0.5, 0.25, 0.25]).expect("valid atoms")
    }

    /// Uniform on `[−√3, √3]` (unit variance).
    pub fn uniform() -> Self {
        Self::from_family("uniform", Family::Uniform)
    }

    /// `E − 1` with `E` standard exponential.
    pub fn centered_exponential() -> Self {
        Self::from_family("centered-exponential", Family::CenteredExponential)
    }

    /// Student's t with `nu > 2` degrees of freedom, unscaled.
    pub fn student_t(nu: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 2.0) {
            return Err(Error::invalid(
                "nu",
                "degrees of freedom must exceed 2 for a finite variance",
            ));
        }
        let log_norm = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * PI).ln();
        let name = if nu.fract() == 0.0 {
            format!("student-t{}", nu as u64)
        } else {
            format!("student-t{nu}")
        };
        Ok(Self::from_family(&name, Family::StudentT { nu, log_norm }))
    }

    /// Symmetric law with density `|x|⁻³` on `|x| ≥ 1`.
    pub fn pareto_tail() -> Self {
        Self::from_family("pareto-tail", Family::ParetoTail)
    }

    /// A finite discrete law. Probabilities must be positive and sum to one,
    /// and the mean must vanish.
    pub fn discrete(name: &str, atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != probs.len() {
            return Err(Error::invalid(
                "atoms",
                "need one probability per atom and at least one atom",
            ));
        }
        if atoms.iter().any(|a| !a.is_finite()) || probs.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::invalid(
                "atoms",
                "atoms must be finite and probabilities positive",
            ));
        }
        let mut order: Vec<usize> = (0..atoms.len()).collect();
        order.sort_by(|&i, &j| atoms[i].total_cmp(&atoms[j]));
        let atoms: Vec<f64> = order.iter().map(|&i| atoms[i]).collect();
        let probs: Vec<f64> = order.iter().map(|&i| probs[i]).collect();
        if atoms.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("atoms", "atoms must be distinct"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("probs", format!("probabilities sum to {total}, not 1")));
        }
        let mean: f64 = atoms.iter().zip(&probs).map(|(a, p)| a * p).sum();
        let spread = atoms.iter().fold(0.0f64, |m, a| m.max(a.abs())).max(1.0);
        if mean.abs() > 1e-12 * spread {
            return Err(Error::invalid("atoms", format!("mean is {mean}, not 0")));
        }
        Ok(Self::from_family(name, Family::Discrete { atoms, probs }))
    }

    fn from_family(name: &str, family: Family) -> Self {
        Self {
            name: name.to_string(),
            family,
            scale: 1.0,
        }
    }

    /// The law of `c·X`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid("scale", "scale must be positive and finite"));
        }
        let mut out = self.clone();
        out.scale *= c;
        Ok(out)
    }

    /// The same law at unit scale.
    pub fn unit(&self) -> Self {
        Self {
            scale: 1.0,
            ..self.clone()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Family parameters (degrees of freedom, or atoms followed by their
    /// probabilities); the scale is reported separately.
    pub fn params(&self) -> Vec<f64> {
        match &self.family {
            Family::StudentT { nu, .. } => vec![*nu],
            Family::Discrete { atoms, probs } => atoms.iter().chain(probs).copied().collect(),
            _ => Vec::new(),
        }
    }

    pub fn kind(&self) -> Kind {
        match self.family {
            Family::Discrete { .. } => Kind::Discrete,
            _ => Kind::Continuous,
        }
    }

    pub fn is_discrete(&self) -> bool {
        self.kind() == Kind::Discrete
    }

    pub fn support(&self) -> Support {
        let s = self.scale;
        match &self.family {
            Family::Discrete { atoms, .. } => Support::Atoms(atoms.iter().map(|a| a * s).collect()),
            Family::Uniform => Support::Interval {
                lo: -SQRT3 * s,
                hi: SQRT3 * s,
            },
            Family::CenteredExponential => Support::Interval {
                lo: -s,
                hi: f64::INFINITY,
            },
            Family::StudentT { .. } | Family::ParetoTail => Support::Interval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            },
        }
    }

    /// Atoms and probabilities of a discrete law (scaled).
    pub fn atoms(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.family {
            Family::Discrete { atoms, probs } => Some((atoms.iter().map(|a| a * self.scale).collect(), probs.clone())),
            _ => None,
        }
    }

    /// `E X³`, when `E|X|³` is finite.
    pub fn gamma(&self) -> Option<f64> {
        let base = match &self.family {
            Family::Discrete { atoms, probs } => atoms.iter().zip(probs).map(|(a, p)| p * a.powi(3)).sum(),
            Family::Uniform => 0.0,
            Family::CenteredExponential => 2.0,
            Family::StudentT { nu, .. } if *nu > 3.0 => 0.0,
            Family::StudentT { .. } | Family::ParetoTail => return None,
        };
        Some(base * self.scale.powi(3))
    }

    pub fn has_finite_variance(&self) -> bool {
        !matches!(self.family, Family::ParetoTail)
    }

    pub fn is_symmetric(&self) -> bool {
        match &self.family {
            Family::Discrete { atoms, probs } => {
                let k = atoms.len();
                (0..k).all(|i| atoms[i] == -atoms[k - 1 - i] && probs[i] == probs[k - 1 - i])
            }
            Family::CenteredExponential => false,
            Family::Uniform | Family::StudentT { .. } | Family::ParetoTail => true,
        }
    }

    fn check_radius(c: f64) -> Result<()> {
        if !c.is_finite() {
            return Err(Error::invalid("c", "truncation point must be finite"));
        }
        if c <= 0.0 {
            return Err(Error::invalid("c", "truncation point must be positive"));
        }
        Ok(())
    }

    fn check_order(j: u32) -> Result<()> {
        if j > MAX_MOMENT_ORDER {
            return Err(Error::invalid(
                "j",
                format!("moment order {j} exceeds {MAX_MOMENT_ORDER}"),
            ));
        }
        Ok(())
    }

    /// `E[X^j I(|X| ≤ c)]`.
    pub fn truncated_moment(&self, j: u32, c: f64) -> Result<f64> {
        Self::check_order(j)?;
        Self::check_radius(c)?;
        if j % 2 == 1 && self.is_symmetric() {
            return Ok(0.0);
        }
        let r = c / self.scale;
        let base = match &self.family {
            Family::Discrete { atoms, probs } => atoms
                .iter()
                .zip(probs)
                .filter(|(a, _)| a.abs() <= r)
                .fold(0.0, |s, (a, p)| s + p * a.powi(j as i32)),
            Family::Uniform => {
                let m = r.min(SQRT3);
                m.powi(j as i32 + 1) / ((j as f64 + 1.0) * SQRT3)
            }
            Family::CenteredExponential => exponential_moment(j, r),
            Family::ParetoTail => pareto_moment(j, r),
            Family::StudentT { .. } => self.base_moment_by_quadrature(j, r)?,
        };
        Ok(base * self.scale.powi(j as i32))
    }

    /// `E[X^j I(|X| ≤ c)]` by adaptive quadrature against the density,
    /// ignoring any closed form. Continuous laws only.
    pub fn truncated_moment_by_quadrature(&self, j: u32, c: f64) -> Result<f64> {
        Self::check_order(j)?;
        Self::check_radius(c)?;
        if self.is_discrete() {
            return Err(Error::invalid("dist", "quadrature moments need a density"));
        }
        Ok(self.base_moment_by_quadrature(j, c / self.scale)? * self.scale.powi(j as i32))
    }

    fn base_moment_by_quadrature(&self, j: u32, r: f64) -> Result<f64> {
        let mut cuts = vec![-r, r];
        cuts.extend(self.base_kinks().into_iter().filter(|k| k.abs() < r));
        cuts.extend(geometric_cuts(r));
        if let Support::Interval { lo, hi } = self.base_support() {
            cuts.retain(|k| *k >= lo && *k <= hi);
            cuts.extend([lo, hi].into_iter().filter(|k| k.abs() < r));
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        // Asks for more than 1e-12·max(1, c^j); the rounding floor inside
        // `integrate` ends refinement at machine precision.
        let tol = 1e-15 * r.powi(j as i32).max(1.0);
        let jj = j as i32;
        Ok(integrate_pieces(|t| t.powi(jj) * self.base_density(t), &cuts, tol)?.value)
    }

    /// `P(|X| > c)`.
    pub fn tail(&self, c: f64) -> Result<f64> {
        Self::check_radius(c)?;
        let r = c / self.scale;
        Ok(match &self.family {
            Family::Discrete { atoms, probs } => atoms
                .iter()
                .zip(probs)
                .filter(|(a, _)| a.abs() > r)
                .fold(0.0, |s, (_, p)| s + p),
            Family::Uniform => (1.0 - r / SQRT3).max(0.0),
            Family::CenteredExponential => {
                let upper = (-(r + 1.0)).exp();
                let lower = if r < 1.0 { -(-(1.0 - r)).exp_m1() } else { 0.0 };
                upper + lower
            }
            Family::ParetoTail => {
                if r < 1.0 {
                    1.0
                } else {
                    r.powi(-2)
                }
            }
            Family::StudentT { nu, .. } => 2.0 * student(*nu).sf(r),
        })
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let r = x / self.scale;
        match &self.family {
            Family::Discrete { atoms, probs } => atoms
                .iter()
                .zip(probs)
                .filter(|(a, _)| **a <= r)
                .map(|(_, p)| p)
                .sum::<f64>()
                .min(1.0),
            Family::Uniform => ((r + SQRT3) / (2.0 * SQRT3)).clamp(0.0, 1.0),
            Family::CenteredExponential => {
                if r <= -1.0 {
                    0.0
                } else {
                    -(-(r + 1.0)).exp_m1()
                }
            }
            Family::ParetoTail => {
                if r <= -1.0 {
                    0.5 * r.powi(-2)
                } else if r < 1.0 {
                    0.5
                } else {
                    1.0 - 0.5 * r.powi(-2)
                }
            }
            Family::StudentT { nu, .. } => student(*nu).cdf(r),
        }
    }

    /// `P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match &self.family {
            Family::Discrete { atoms, probs } => {
                let r = x / self.scale;
                atoms
                    .iter()
                    .zip(probs)
                    .filter(|(a, _)| **a < r)
                    .map(|(_, p)| p)
                    .sum::<f64>()
                    .min(1.0)
            }
            _ => self.cdf(x),
        }
    }

    /// Density of a continuous law; zero for discrete laws.
    pub fn density(&self, x: f64) -> f64 {
        if self.is_discrete() {
            return 0.0;
        }
        self.base_density(x / self.scale) / self.scale
    }

    fn base_density(&self, t: f64) -> f64 {
        match &self.family {
            Family::Discrete { .. } => 0.0,
            Family::Uniform => {
                if t.abs() <= SQRT3 {
                    0.5 / SQRT3
                } else {
                    0.0
                }
            }
            Family::CenteredExponential => {
                if t >= -1.0 {
                    (-(t + 1.0)).exp()
                } else {
                    0.0
                }
            }
            Family::ParetoTail => {
                let a = t.abs();
                if a >= 1.0 {
                    a.powi(-3)
                } else {
                    0.0
                }
            }
            Family::StudentT { nu, log_norm } => (log_norm - 0.5 * (nu + 1.0) * (t * t / nu).ln_1p()).exp(),
        }
    }

    fn base_support(&self) -> Support {
        let unit = Self {
            scale: 1.0,
            ..self.clone()
        };
        unit.support()
    }

    /// Points where the base density is not smooth.
    fn base_kinks(&self) -> Vec<f64> {
        match &self.family {
            Family::Uniform => vec![-SQRT3, SQRT3],
            Family::CenteredExponential => vec![-1.0],
            Family::ParetoTail => vec![-1.0, 1.0],
            _ => Vec::new(),
        }
    }

    /// `E f(X)`.
    ///
    /// Discrete laws sum over atoms. Continuous laws integrate against the
    /// density with the domain split at `breaks` (in the units of `X`), at the
    /// support ends and at density kinks; unbounded tails are mapped onto a
    /// finite interval. `tol` is the absolute error budget for the whole
    /// expectation.
    pub fn expect<F>(&self, f: F, breaks: &[f64], tol: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let s = self.scale;
        match &self.family {
            Family::Discrete { atoms, probs } => Ok(atoms.iter().zip(probs).map(|(a, p)| p * f(a * s)).sum()),
            _ => {
                let (lo, hi) = match self.base_support() {
                    Support::Interval { lo, hi } => (lo, hi),
                    Support::Atoms(_) => unreachable!("continuous family"),
                };
                let reach = breaks.iter().fold(1.0f64, |m, b| m.max((b / s).abs()));
                let mut cuts: Vec<f64> = breaks
                    .iter()
                    .map(|b| b / s)
                    .chain(self.base_kinks())
                    .chain(geometric_cuts(reach))
                    .filter(|b| b.is_finite() && *b >= lo && *b <= hi)
                    .collect();
                if lo.is_finite() {
                    cuts.push(lo);
                }
                if hi.is_finite() {
                    cuts.push(hi);
                }
                if cuts.is_empty() {
                    cuts.push(0.0);
                }
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                let integrand = |t: f64| {
                    let d = self.base_density(t);
                    if d == 0.0 {
                        0.0
                    } else {
                        f(s * t) * d
                    }
                };
                let tails = usize::from(lo.is_infinite()) + usize::from(hi.is_infinite());
                let pieces = cuts.len() - 1 + tails;
                let share = tol / pieces.max(1) as f64;
                let mut total = integrate_pieces(integrand, &cuts, share * (cuts.len() - 1) as f64)?.value;
                if lo.is_infinite() {
                    total += integrate_lower_tail(integrand, cuts[0], share)?.value;
                }
                if hi.is_infinite() {
                    total += integrate_upper_tail(integrand, cuts[cuts.len() - 1], share)?.value;
                }
                Ok(total)
            }
        }
    }

    /// A prepared sampler for repeated draws.
    pub fn sampler(&self) -> Sampler {
        let kind = match &self.family {
            Family::Discrete { atoms, probs } => {
                let mut acc = 0.0;
                let cumulative = probs
                    .iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect();
                SamplerKind::Discrete {
                    atoms: atoms.clone(),
                    cumulative,
                }
            }
            Family::Uniform => SamplerKind::Uniform,
            Family::CenteredExponential => SamplerKind::Exponential,
            Family::ParetoTail => SamplerKind::Pareto,
            Family::StudentT { nu, .. } => SamplerKind::StudentT(StudentT::new(*nu).expect("nu > 2")),
        };
        Sampler {
            kind,
            scale: self.scale,
        }
    }

    /// `count` independent draws; identical `(seed, count)` give identical
    /// output.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::invalid("count", "need at least one draw"));
        }
        let sampler = self.sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..count).map(|_| sampler.draw(&mut rng)).collect())
    }

    /// Two-sided Kolmogorov-Smirnov distance between a sample and this law,
    /// with ties handled through left limits of the distribution function.
    pub fn ks_statistic(&self, sample: &[f64]) -> f64 {
        let mut xs = sample.to_vec();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let mut d = 0.0f64;
        let mut i = 0;
        while i < xs.len() {
            let v = xs[i];
            let mut j = i;
            while j < xs.len() && xs[j] == v {
                j += 1;
            }
            let below = i as f64 / n;
            let upto = j as f64 / n;
            d = d.max((self.cdf_left(v) - below).abs()).max((self.cdf(v) - upto).abs());
            i = j;
        }
        d
    }
}

/// `±4^k` for `4^k < r`, plus 0: panel edges that keep the bulk of a unit
/// scale density resolved when integrating over a wide interval.
fn geometric_cuts(r: f64) -> Vec<f64> {
    let mut cuts = vec![0.0];
    let mut v = 1.0;
    while v < r {
        cuts.push(v);
        cuts.push(-v);
        v *= 4.0;
    }
    cuts
}

fn student(nu: f64) -> StudentsT {
    StudentsT::new(0.0, 1.0, nu).expect("valid t parameters")
}

/// `∫ t^j e^{−(t+1)} dt` over `[−min(1, r), r]`.
fn exponential_moment(j: u32, r: f64) -> f64 {
    // Antiderivative −e^{−(t+1)} Σ_{k≤j} j!/k! t^k.
    let antiderivative = |t: f64| {
        let mut sum = 0.0;
        let mut coef = 1.0; // j!/k!, walking k down from j
        for k in (0..=j).rev() {
            sum += coef * t.powi(k as i32);
            coef *= k as f64;
        }
        -(-(t + 1.0)).exp() * sum
    };
    let lo = -r.min(1.0);
    antiderivative(r) - antiderivative(lo)
}

fn pareto_moment(j: u32, r: f64) -> f64 {
    if r < 1.0 || j % 2 == 1 {
        return 0.0;
    }
    match j {
        0 => 1.0 - r.powi(-2),
        2 => 2.0 * r.ln(),
        _ => {
            let p = j as i32 - 2;
            2.0 * (r.powi(p) - 1.0) / p as f64
        }
    }
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Discrete { atoms: Vec<f64>, cumulative: Vec<f64> },
    Uniform,
    Exponential,
    Pareto,
    StudentT(StudentT<f64>),
}

/// Draws from a [`DistributionSpec`]. `draw_unit` returns the unscaled base
/// variable; `draw` applies the scale.
#[derive(Debug, Clone)]
pub struct Sampler {
    kind: SamplerKind,
    scale: f64,
}

/// Uniform on the open interval (0, 1) from 53 random bits.
fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

impl Sampler {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.scale * self.draw_unit(rng)
    }

    pub fn draw_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            SamplerKind::Discrete { atoms, cumulative } => {
                let p = open_unit(rng);
                let idx = cumulative.iter().position(|c| p < *c).unwrap_or(atoms.len() - 1);
                atoms[idx]
            }
            SamplerKind::Uniform => SQRT3 * (2.0 * open_unit(rng) - 1.0),
            SamplerKind::Exponential => -open_unit(rng).ln() - 1.0,
            SamplerKind::Pareto => {
                let p = open_unit(rng);
                if p < 0.5 {
                    -(2.0 * p).powf(-0.5)
                } else {
                    (2.0 * (1.0 - p)).powf(-0.5)
                }
            }
            SamplerKind::StudentT(t) => t.sample(rng),
        }
    }
}

/// The fixed set of test laws.
#[derive(Debug, Clone)]
pub struct DistributionCatalog {
    entries: Vec<DistributionSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub kind: Kind,
    pub params: Vec<f64>,
    pub scale: f64,
    pub gamma: Option<f64>,
    pub has_finite_variance: bool,
    pub symmetric: bool,
}

impl Default for DistributionCatalog {
    fn default() -> Self {
        Self::standard()
    }
}

impl DistributionCatalog {
    pub fn standard() -> Self {
        Self {
            entries: vec![
                DistributionSpec::rademacher(),
                DistributionSpec::three_point(),
                DistributionSpec::uniform(),
                DistributionSpec::centered_exponential(),
                DistributionSpec::student_t(3.0).expect("nu = 3"),
                DistributionSpec::student_t(5.0).expect("nu = 5"),
                DistributionSpec::pareto_tail(),
            ],
        }
    }

    pub fn entries(&self) -> &[DistributionSpec] {
        &self.entries
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|d| d.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&DistributionSpec> {
        self.entries.iter().find(|d| d.name() == name)
    }

    /// Looks up `name` and applies `scale`, reporting failures against `field`.
    pub fn resolve(&self, name: &str, scale: Option<f64>, field: &str) -> Result<DistributionSpec> {
        let base = self.get(name).ok_or_else(|| {
            Error::invalid(
                field,
                format!("unknown distribution '{name}' (known: {})", self.names().join(", ")),
            )
        })?;
        match scale {
            None => Ok(base.clone()),
            Some(c) => base
                .scaled(c)
                .map_err(|_| Error::invalid(field, "scale must be positive and finite")),
        }
    }

    /// Name and parameters of every entry.
    pub fn manifest(&self) -> Vec<CatalogEntry> {
        self.entries
            .iter()
            .map(|d| CatalogEntry {
                name: d.name().to_string(),
                kind: d.kind(),
                params: d.params(),
                scale: d.scale(),
                gamma: d.gamma(),
                has_finite_variance: d.has_finite_variance(),
                symmetric: d.is_symmetric(),
            })
            .collect()
    }
}
