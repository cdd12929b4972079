//! The law of Student's t statistic: chunked Monte Carlo and exact
//! enumeration over atom-count compositions for small discrete cases. The
//! same machinery also produces the non-Studentized normalized sums.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::functionals::compute_bn;
use crate::leading_terms::{CurveOnGrid, Grid, TermKind};

/// Replicates per RNG stream; chunk `i` draws from stream `i` of the seed.
pub const CHUNK_SIZE: usize = 4096;
/// Relative threshold below which the denominator counts as zero.
pub const DEGENERACY_EPS: f64 = 1e-12;
/// Largest `n` accepted by [`exact_t_distribution`].
pub const MAX_EXACT_N: u64 = 14;
/// Largest number of atoms accepted by [`exact_t_distribution`].
pub const MAX_EXACT_ATOMS: usize = 4;
/// Cap on compositions for the exact sum distribution.
const MAX_COMPOSITIONS: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `T = ΣX / (ΣX² − n⁻¹(ΣX)²)^{1/2}`
    DivisorN,
    /// `(1 − n⁻¹)^{-1/2} T`
    #[serde(rename = "divisor_n_minus_1")]
    DivisorNMinus1,
}

impl Variant {
    pub fn factor(self, n: u64) -> f64 {
        match self {
            Variant::DivisorN => 1.0,
            Variant::DivisorNMinus1 => (1.0 - 1.0 / n as f64).sqrt().recip(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Variant::DivisorN => "divisor_n",
            Variant::DivisorNMinus1 => "divisor_n_minus_1",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "divisor_n" | "n" => Ok(Variant::DivisorN),
            "divisor_n_minus_1" | "n-1" | "n_minus_1" => Ok(Variant::DivisorNMinus1),
            other => Err(Error::invalid("variant", format!("unknown variant '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    MonteCarlo,
    ExactEnumeration,
}

/// Which statistic an [`EmpiricalDistribution`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// Student's t statistic.
    Studentized,
    /// `S₁ = b_n⁻¹ ΣX`.
    SumOverBn,
    /// `S₂ = ΣX / (n^{1/2} σ_n)`.
    SumOverRootNSigma,
}

/// A sampled or enumerated law of a statistic. Values are finite and sorted;
/// degenerate outcomes are kept as masses at ±∞. For Monte Carlo output the
/// masses are counts and `total` is the replicate count; for enumeration they
/// are probabilities and `total` is one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    pub statistic: Statistic,
    pub n: u64,
    pub replicates: u64,
    pub source: Source,
    pub seed: Option<u64>,
    pub variant: Variant,
    pub sorted_values: Vec<f64>,
    /// Per-value weights; `None` means unit weight per value.
    pub weights: Option<Vec<f64>>,
    pub mass_neg_inf: f64,
    pub mass_pos_inf: f64,
    pub total: f64,
    cumulative: Vec<f64>,
}

impl EmpiricalDistribution {
    #[allow(clippy::too_many_arguments)]
    fn build(
        statistic: Statistic,
        n: u64,
        replicates: u64,
        source: Source,
        seed: Option<u64>,
        variant: Variant,
        sorted_values: Vec<f64>,
        weights: Option<Vec<f64>>,
        mass_neg_inf: f64,
        mass_pos_inf: f64,
        total: f64,
    ) -> Self {
        let cumulative = match &weights {
            Some(w) => {
                let mut acc = 0.0;
                w.iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect()
            }
            None => Vec::new(),
        };
        Self {
            statistic,
            n,
            replicates,
            source,
            seed,
            variant,
            sorted_values,
            weights,
            mass_neg_inf,
            mass_pos_inf,
            total,
            cumulative,
        }
    }

    /// Mass on finite values.
    pub fn finite_mass(&self) -> f64 {
        match &self.weights {
            Some(_) => self.cumulative.last().copied().unwrap_or(0.0),
            None => self.sorted_values.len() as f64,
        }
    }

    /// `P(statistic ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.sorted_values.partition_point(|v| *v <= x);
        let finite = match &self.weights {
            Some(_) => {
                if k == 0 {
                    0.0
                } else {
                    self.cumulative[k - 1]
                }
            }
            None => k as f64,
        };
        let upper = if x == f64::INFINITY { self.mass_pos_inf } else { 0.0 };
        ((self.mass_neg_inf + finite + upper) / self.total).clamp(0.0, 1.0)
    }

    /// DKW half-width `(ln(2/β) / 2N)^{1/2}` for Monte Carlo output, zero for
    /// enumeration.
    pub fn dkw_half_width(&self, beta: f64) -> f64 {
        match self.source {
            Source::MonteCarlo => dkw_half_width(self.replicates, beta),
            Source::ExactEnumeration => 0.0,
        }
    }

    /// Values and their probabilities, degenerate outcomes excluded.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match &self.weights {
            Some(w) => self.sorted_values.iter().copied().zip(w.iter().copied()).collect(),
            None => self.sorted_values.iter().map(|v| (*v, 1.0 / self.total)).collect(),
        }
    }
}

pub fn dkw_half_width(replicates: u64, beta: f64) -> f64 {
    ((2.0 / beta).ln() / (2.0 * replicates as f64)).sqrt()
}

/// Value of a statistic for one sample, before the variant factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TValue {
    Finite(f64),
    PosInf,
    NegInf,
}

/// Student's t statistic from the sums `ΣX` and `ΣX²`.
///
/// A denominator `D² = ΣX² − n⁻¹(ΣX)²` at or below `10⁻¹² ΣX²` is treated as
/// zero: the outcome is `sign(ΣX)·∞`, or `0` when `ΣX = 0`.
pub fn t_from_sums(sum: f64, sum_sq: f64, n: u64) -> TValue {
    let d2 = sum_sq - sum * sum / n as f64;
    if d2 > DEGENERACY_EPS * sum_sq {
        TValue::Finite(sum / d2.sqrt())
    } else if sum > 0.0 {
        TValue::PosInf
    } else if sum < 0.0 {
        TValue::NegInf
    } else {
        TValue::Finite(0.0)
    }
}

/// Student's t statistic of a sample.
pub fn t_statistic(sample: &[f64]) -> TValue {
    let (s, q) = sample.iter().fold((0.0, 0.0), |(s, q), x| (s + x, q + x * x));
    t_from_sums(s, q, sample.len() as u64)
}

fn check_mc(n: u64, replicates: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("n", "need n >= 2"));
    }
    if replicates == 0 {
        return Err(Error::invalid("replicates", "need at least one replicate"));
    }
    Ok(())
}

/// Per-chunk outcomes: finite values and the two degenerate counts.
struct Chunk {
    values: Vec<f64>,
    neg: u64,
    pos: u64,
}

fn run_chunks<F>(replicates: u64, seed: u64, per_replicate: F) -> Chunk
where
    F: Fn(&mut ChaCha8Rng) -> TValue + Sync,
{
    let chunks = (replicates as usize).div_ceil(CHUNK_SIZE);
    let parts: Vec<Chunk> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let start = c * CHUNK_SIZE;
            let len = CHUNK_SIZE.min(replicates as usize - start);
            let mut out = Chunk {
                values: Vec::with_capacity(len),
                neg: 0,
                pos: 0,
            };
            for _ in 0..len {
                match per_replicate(&mut rng) {
                    TValue::Finite(t) => out.values.push(t),
                    TValue::NegInf => out.neg += 1,
                    TValue::PosInf => out.pos += 1,
                }
            }
            out
        })
        .collect();
    let mut all = Chunk {
        values: Vec::with_capacity(replicates as usize),
        neg: 0,
        pos: 0,
    };
    for p in parts {
        all.values.extend(p.values);
        all.neg += p.neg;
        all.pos += p.pos;
    }
    all
}

/// Monte Carlo law of Student's t statistic from `replicates` samples of size
/// `n`.
///
/// Replicates are generated in chunks of [`CHUNK_SIZE`], chunk `i` using
/// stream `i` of a ChaCha8 generator seeded with `seed`, so the output does
/// not depend on the thread count. The statistic is computed from unit-scale
/// draws: it is invariant under `X ↦ cX`, and this keeps that invariance exact
/// in floating point.
pub fn simulate_t(
    dist: &DistributionSpec,
    n: u64,
    replicates: u64,
    seed: u64,
    variant: Variant,
) -> Result<EmpiricalDistribution> {
    check_mc(n, replicates)?;
    let sampler = dist.sampler();
    let factor = variant.factor(n);
    let mut chunk = run_chunks(replicates, seed, |rng| {
        let mut s = 0.0;
        let mut q = 0.0;
        for _ in 0..n {
            let x = sampler.draw_unit(rng);
            s += x;
            q += x * x;
        }
        match t_from_sums(s, q, n) {
            TValue::Finite(t) => TValue::Finite(t * factor),
            other => other,
        }
    });
    chunk.values.sort_by(f64::total_cmp);
    Ok(EmpiricalDistribution::build(
        Statistic::Studentized,
        n,
        replicates,
        Source::MonteCarlo,
        Some(seed),
        variant,
        chunk.values,
        None,
        chunk.neg as f64,
        chunk.pos as f64,
        replicates as f64,
    ))
}

/// Normalizing scale of a non-Studentized sum: `b_n` or `(n σ_n²)^{1/2}`.
pub fn sum_scale(dist: &DistributionSpec, n: u64, statistic: Statistic) -> Result<f64> {
    let b = compute_bn(dist, n)?;
    match statistic {
        Statistic::SumOverBn => Ok(b),
        Statistic::SumOverRootNSigma => Ok((n as f64 * dist.truncated_moment(2, b)?).sqrt()),
        Statistic::Studentized => Err(Error::invalid("statistic", "not a normalized sum")),
    }
}

/// Monte Carlo law of `ΣX / s` with `s` from [`sum_scale`].
pub fn simulate_sum(
    dist: &DistributionSpec,
    n: u64,
    replicates: u64,
    seed: u64,
    statistic: Statistic,
) -> Result<EmpiricalDistribution> {
    check_mc(n, replicates)?;
    let scale = sum_scale(dist, n, statistic)?;
    let sampler = dist.sampler();
    let mut chunk = run_chunks(replicates, seed, |rng| {
        let mut s = 0.0;
        for _ in 0..n {
            s += sampler.draw(rng);
        }
        TValue::Finite(s / scale)
    });
    chunk.values.sort_by(f64::total_cmp);
    Ok(EmpiricalDistribution::build(
        statistic,
        n,
        replicates,
        Source::MonteCarlo,
        Some(seed),
        Variant::DivisorN,
        chunk.values,
        None,
        0.0,
        0.0,
        replicates as f64,
    ))
}

/// All `k`-part compositions of `n`, in lexicographic order.
fn compositions(n: u64, k: usize) -> Vec<Vec<u64>> {
    fn rec(left: u64, parts: usize, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            rec(left - c, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn composition_count(n: u64, k: usize) -> u64 {
    // C(n + k − 1, k − 1), saturating.
    let mut c: u64 = 1;
    for i in 1..k as u64 {
        c = c.saturating_mul(n + i) / i;
    }
    c
}

/// Number of atom-count compositions for a discrete law, `None` if continuous.
pub fn composition_count_for(dist: &DistributionSpec, n: u64) -> Option<u64> {
    dist.atoms().map(|(a, _)| composition_count(n, a.len()))
}

fn ln_multinomial(n: u64, counts: &[u64]) -> f64 {
    ln_gamma(n as f64 + 1.0) - counts.iter().map(|&c| ln_gamma(c as f64 + 1.0)).sum::<f64>()
}

/// Sorts `(value, prob)` pairs and merges bitwise-equal values.
fn aggregate(mut pairs: Vec<(f64, f64)>) -> (Vec<f64>, Vec<f64>) {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut values: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
    for (v, p) in pairs {
        match values.last() {
            Some(last) if *last == v => *probs.last_mut().expect("parallel vectors") += p,
            _ => {
                values.push(v);
                probs.push(p);
            }
        }
    }
    (values, probs)
}

fn discrete_parts(dist: &DistributionSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    dist.atoms().ok_or_else(|| {
        Error::invalid(
            "dist",
            format!("{} is continuous; enumeration needs a discrete law", dist.name()),
        )
    })
}

/// Exact law of Student's t statistic for a discrete law with at most four
/// atoms and `n ≤ 14`, by enumerating atom-count compositions with their
/// multinomial probabilities.
pub fn exact_t_distribution(dist: &DistributionSpec, n: u64, variant: Variant) -> Result<EmpiricalDistribution> {
    let (atoms, probs) = discrete_parts(dist)?;
    if !(2..=MAX_EXACT_N).contains(&n) {
        return Err(Error::invalid(
            "n",
            format!("exact enumeration needs 2 <= n <= {MAX_EXACT_N}, got {n}"),
        ));
    }
    if atoms.len() > MAX_EXACT_ATOMS {
        return Err(Error::invalid(
            "dist",
            format!("exact enumeration supports at most {MAX_EXACT_ATOMS} atoms"),
        ));
    }
    if atoms.len() < 2 {
        return Err(Error::invalid(
            "dist",
            "a single-atom law has a fully degenerate t statistic",
        ));
    }
    let factor = variant.factor(n);
    let fact = |m: u64| (1..=m).product::<u64>();
    let mut pairs = Vec::new();
    let (mut neg, mut pos) = (0.0, 0.0);
    for counts in compositions(n, atoms.len()) {
        let coef = fact(n) / counts.iter().map(|&c| fact(c)).product::<u64>();
        let p = coef as f64
            * counts
                .iter()
                .zip(&probs)
                .map(|(&c, p)| p.powi(c as i32))
                .product::<f64>();
        let s: f64 = counts.iter().zip(&atoms).map(|(&c, a)| c as f64 * a).sum();
        let q: f64 = counts.iter().zip(&atoms).map(|(&c, a)| c as f64 * a * a).sum();
        match t_from_sums(s, q, n) {
            TValue::Finite(t) => pairs.push((t * factor, p)),
            TValue::NegInf => neg += p,
            TValue::PosInf => pos += p,
        }
    }
    let (values, weights) = aggregate(pairs);
    let count = composition_count(n, atoms.len());
    Ok(EmpiricalDistribution::build(
        Statistic::Studentized,
        n,
        count,
        Source::ExactEnumeration,
        None,
        variant,
        values,
        Some(weights),
        neg,
        pos,
        1.0,
    ))
}

/// Exact law of `ΣX / s` for a discrete law, `s` from [`sum_scale`].
pub fn exact_sum_distribution(dist: &DistributionSpec, n: u64, statistic: Statistic) -> Result<EmpiricalDistribution> {
    let (atoms, probs) = discrete_parts(dist)?;
    if n == 0 {
        return Err(Error::invalid("n", "need n >= 1"));
    }
    let count = composition_count(n, atoms.len());
    if count > MAX_COMPOSITIONS {
        return Err(Error::invalid(
            "n",
            format!("{count} compositions exceed the enumeration cap"),
        ));
    }
    let scale = sum_scale(dist, n, statistic)?;
    let log_p: Vec<f64> = probs.iter().map(|p| p.ln()).collect();
    let pairs = compositions(n, atoms.len())
        .into_iter()
        .map(|counts| {
            let lp = ln_multinomial(n, &counts) + counts.iter().zip(&log_p).map(|(&c, l)| c as f64 * l).sum::<f64>();
            let s: f64 = counts.iter().zip(&atoms).map(|(&c, a)| c as f64 * a).sum();
            (s / scale, lp.exp())
        })
        .collect();
    let (values, weights) = aggregate(pairs);
    Ok(EmpiricalDistribution::build(
        statistic,
        n,
        count,
        Source::ExactEnumeration,
        None,
        Variant::DivisorN,
        values,
        Some(weights),
        0.0,
        0.0,
        1.0,
    ))
}

/// `F̂(x) = (mass at −∞ + mass of finite values ≤ x) / total` on the grid.
pub fn empirical_cdf(emp: &EmpiricalDistribution, grid: &Grid) -> CurveOnGrid {
    CurveOnGrid {
        term: TermKind::EmpiricalCdf,
        dist: String::new(),
        n: emp.n,
        alpha: None,
        grid: grid.points().to_vec(),
        values: grid.points().iter().map(|&x| emp.cdf(x)).collect(),
    }
}
