//! Rate diagnostics: sup discrepancies of the t statistic against `Φ` and
//! `Φ + L_n`, the three-point sup, and the same for the non-Studentized sums.

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::functionals::{compute_delta, compute_rho};
use crate::leading_terms::{eval_ln, eval_ln1, eval_ln2, CurveOnGrid, Grid};
use crate::simulation::{
    composition_count_for, exact_sum_distribution, exact_t_distribution, simulate_sum, simulate_t,
    EmpiricalDistribution, Source, Statistic, Variant, MAX_EXACT_ATOMS, MAX_EXACT_N,
};
use crate::special::normal_cdf;

pub const DEFAULT_X0: f64 = 2.0;
pub const DEFAULT_X1: f64 = 0.0;
/// Level of the DKW band attached to Monte Carlo rows.
pub const DKW_BETA: f64 = 1e-3;
/// Largest composition count for which sums are enumerated rather than sampled.
pub const MAX_SUM_COMPOSITIONS: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: u64,
    pub source: Source,
    pub delta_n: f64,
    /// `n P(|X| > α b_n)`
    pub rho_n: f64,
    /// `sup |F̂ − Φ|`
    pub sup_plain: f64,
    /// `sup |F̂ − Φ − L|`
    pub sup_corrected: f64,
    /// `sup |L|`
    pub sup_ln: f64,
    /// `max |L|` over `{−x₀, x₀, x₁}`
    pub three_point_sup: f64,
    /// `(sup_plain + n^{-1/2}) / (δ_n + n^{-1/2})`
    pub ratio_25: f64,
    /// `three_point_sup / sup_ln`
    pub ratio_3pt: f64,
    /// DKW half-width, zero for enumerated rows.
    pub mc_stderr_band: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub dist_name: String,
    pub statistic: Statistic,
    pub variant: Variant,
    pub x0: f64,
    pub x1: f64,
    pub alpha: f64,
    pub rows: Vec<RateRow>,
}

/// Extremes of the row ratios over a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    pub dist_name: String,
    pub min_ratio_25: f64,
    pub max_ratio_25: f64,
    pub min_ratio_3pt: f64,
    pub max_ratio_3pt: f64,
    pub min_sup_ln_over_delta: f64,
    pub max_sup_ln_over_delta: f64,
}

impl RateReport {
    pub fn summary(&self) -> RateSummary {
        let ext = |f: &dyn Fn(&RateRow) -> f64| {
            self.rows
                .iter()
                .map(f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        let r25 = ext(&|r| r.ratio_25);
        let r3 = ext(&|r| r.ratio_3pt);
        let mag = ext(&|r| r.sup_ln / r.delta_n);
        RateSummary {
            dist_name: self.dist_name.clone(),
            min_ratio_25: r25.0,
            max_ratio_25: r25.1,
            min_ratio_3pt: r3.0,
            max_ratio_3pt: r3.1,
            min_sup_ln_over_delta: mag.0,
            max_sup_ln_over_delta: mag.1,
        }
    }

    pub const CSV_HEADER: &'static str =
        "n,source,delta_n,rho_n,sup_plain,sup_corrected,sup_Ln,three_point_sup,ratio_25,ratio_3pt,mc_stderr_band";

    /// Rows as CSV, header included; floats in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let source = match r.source {
                Source::MonteCarlo => "monte_carlo",
                Source::ExactEnumeration => "exact_enumeration",
            };
            out.push_str(&format!(
                "{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                r.n,
                source,
                r.delta_n,
                r.rho_n,
                r.sup_plain,
                r.sup_corrected,
                r.sup_ln,
                r.three_point_sup,
                r.ratio_25,
                r.ratio_3pt,
                r.mc_stderr_band
            ));
        }
        out
    }
}

/// Checks `x₀ > √3` and `x₁ ∉ {−x₀, x₀}`.
pub fn check_points(x0: f64, x1: f64) -> Result<()> {
    if !(x0.is_finite() && x0 > 3f64.sqrt()) {
        return Err(Error::invalid("x0", format!("x0 must exceed sqrt(3), got {x0}")));
    }
    if !x1.is_finite() || x1 == x0 || x1 == -x0 {
        return Err(Error::invalid(
            "x1",
            format!("x1 must be finite and differ from +-x0, got {x1}"),
        ));
    }
    Ok(())
}

fn sorted_n_list(n_list: &[u64], min: u64) -> Result<Vec<u64>> {
    if n_list.is_empty() {
        return Err(Error::invalid("n_list", "empty"));
    }
    if let Some(n) = n_list.iter().find(|&&n| n < min) {
        return Err(Error::invalid(
            "n_list",
            format!("each n must be at least {min}, got {n}"),
        ));
    }
    let mut v = n_list.to_vec();
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// `sup |F̂ − Φ|` and `sup |F̂ − Φ − L|` over the curve's grid.
pub fn sup_discrepancies(emp: &EmpiricalDistribution, correction: &CurveOnGrid) -> (f64, f64) {
    correction
        .grid
        .iter()
        .zip(&correction.values)
        .fold((0.0f64, 0.0f64), |(p, c), (&x, &l)| {
            let d = emp.cdf(x) - normal_cdf(x);
            (p.max(d.abs()), c.max((d - l).abs()))
        })
}

/// `max |L|` over `{−x₀, x₀, x₁}`; every point must lie on the curve's grid.
pub fn three_point_sup(curve: &CurveOnGrid, x0: f64, x1: f64) -> Result<f64> {
    [-x0, x0, x1].iter().try_fold(0.0f64, |m, &x| {
        curve
            .at(x)
            .map(|v| m.max(v.abs()))
            .ok_or_else(|| Error::invalid("grid", format!("{x} is not a grid point")))
    })
}

fn ratio_3pt(three: f64, sup: f64) -> f64 {
    // L ≡ 0 makes both sups zero; the two sups then agree.
    if sup == 0.0 {
        1.0
    } else {
        three / sup
    }
}

fn row(
    n: u64,
    emp: &EmpiricalDistribution,
    correction: &CurveOnGrid,
    (delta_n, rho_n): (f64, f64),
    x0: f64,
    x1: f64,
) -> Result<RateRow> {
    let (sup_plain, sup_corrected) = sup_discrepancies(emp, correction);
    let sup_ln = correction.sup_abs();
    let three = three_point_sup(correction, x0, x1)?;
    let root = (n as f64).sqrt().recip();
    Ok(RateRow {
        n,
        source: emp.source,
        delta_n,
        rho_n,
        sup_plain,
        sup_corrected,
        sup_ln,
        three_point_sup: three,
        ratio_25: (sup_plain + root) / (delta_n + root),
        ratio_3pt: ratio_3pt(three, sup_ln),
        mc_stderr_band: emp.dkw_half_width(DKW_BETA),
    })
}

fn delta_rho(dist: &DistributionSpec, n: u64, alpha: f64) -> Result<(f64, f64)> {
    Ok((compute_delta(dist, n)?.1.total(), compute_rho(dist, n, alpha)?))
}

fn enumerable_t(dist: &DistributionSpec, n: u64) -> bool {
    dist.atoms()
        .is_some_and(|(a, _)| (2..=MAX_EXACT_ATOMS).contains(&a.len()))
        && n <= MAX_EXACT_N
}

/// Law of T for one row: exact when the law is discrete with at most four
/// atoms and `n ≤ 14`, Monte Carlo otherwise.
pub fn t_law(
    dist: &DistributionSpec,
    n: u64,
    replicates: u64,
    seed: u64,
    variant: Variant,
) -> Result<EmpiricalDistribution> {
    if enumerable_t(dist, n) {
        exact_t_distribution(dist, n, variant)
    } else {
        simulate_t(dist, n, replicates, seed, variant)
    }
}

/// One row per `n` comparing the law of T with `Φ` and `Φ + L_n` on the
/// default grid extended by `±x₀, x₁`.
#[allow(clippy::too_many_arguments)]
pub fn build_rate_report(
    dist: &DistributionSpec,
    n_list: &[u64],
    replicates: u64,
    seed: u64,
    x0: f64,
    x1: f64,
    alpha: f64,
    variant: Variant,
) -> Result<RateReport> {
    check_points(x0, x1)?;
    let ns = sorted_n_list(n_list, 2)?;
    let grid = Grid::default_with(x0, x1);
    let mut rows = Vec::with_capacity(ns.len());
    for n in ns {
        let ln = eval_ln(dist, n, &grid)?;
        let emp = t_law(dist, n, replicates, seed, variant)?;
        rows.push(row(n, &emp, &ln, delta_rho(dist, n, alpha)?, x0, x1)?);
    }
    Ok(RateReport {
        dist_name: dist.name().to_string(),
        statistic: Statistic::Studentized,
        variant,
        x0,
        x1,
        alpha,
        rows,
    })
}

/// `three_point_sup / sup_Ln` per `n`, in ascending `n`.
pub fn three_point_equivalence(dist: &DistributionSpec, n_list: &[u64], x0: f64, x1: f64) -> Result<Vec<f64>> {
    check_points(x0, x1)?;
    let grid = Grid::default_with(x0, x1);
    sorted_n_list(n_list, 1)?
        .into_iter()
        .map(|n| {
            let ln = eval_ln(dist, n, &grid)?;
            Ok(ratio_3pt(three_point_sup(&ln, x0, x1)?, ln.sup_abs()))
        })
        .collect()
}

/// Law of a normalized sum: enumerated for discrete laws with a manageable
/// composition count, sampled otherwise.
pub fn sum_law(
    dist: &DistributionSpec,
    n: u64,
    replicates: u64,
    seed: u64,
    statistic: Statistic,
) -> Result<EmpiricalDistribution> {
    match composition_count_for(dist, n) {
        Some(c) if c <= MAX_SUM_COMPOSITIONS => exact_sum_distribution(dist, n, statistic),
        _ => simulate_sum(dist, n, replicates, seed, statistic),
    }
}

/// The report for `S₁ = b_n⁻¹ΣX` against `L_{n1}`, or for
/// `S₂ = ΣX/(n^{1/2}σ_n)` against `L_{n2}`, with three-point points
/// `x₀ = 2, x₁ = 0`.
pub fn nonstudentized_report(
    dist: &DistributionSpec,
    n_list: &[u64],
    replicates: u64,
    seed: u64,
    statistic: Statistic,
) -> Result<RateReport> {
    let (x0, x1) = (DEFAULT_X0, DEFAULT_X1);
    let alpha = crate::functionals::DEFAULT_ALPHA;
    let ns = sorted_n_list(n_list, 2)?;
    let grid = Grid::default_with(x0, x1);
    let mut rows = Vec::with_capacity(ns.len());
    for n in ns {
        let correction = match statistic {
            Statistic::SumOverBn => eval_ln1(dist, n, &grid)?,
            Statistic::SumOverRootNSigma => eval_ln2(dist, n, &grid)?,
            Statistic::Studentized => {
                return Err(Error::invalid("statistic", "use build_rate_report for the t statistic"))
            }
        };
        let emp = sum_law(dist, n, replicates, seed, statistic)?;
        rows.push(row(n, &emp, &correction, delta_rho(dist, n, alpha)?, x0, x1)?);
    }
    Ok(RateReport {
        dist_name: dist.name().to_string(),
        statistic,
        variant: Variant::DivisorN,
        x0,
        x1,
        alpha,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_validation() {
        assert!(check_points(2.0, 0.0).is_ok());
        assert!(check_points(1.7, 0.0).is_err());
        assert!(check_points(2.0, 2.0).is_err());
        assert!(check_points(2.0, -2.0).is_err());
        let d = DistributionSpec::rademacher();
        assert!(build_rate_report(&d, &[8], 10, 1, 1.5, 0.0, 0.25, Variant::DivisorN).is_err());
        assert!(build_rate_report(&d, &[1], 10, 1, 2.0, 0.0, 0.25, Variant::DivisorN).is_err());
    }

    #[test]
    fn rademacher_exact_row() {
        let r = build_rate_report(
            &DistributionSpec::rademacher(),
            &[8],
            1,
            0,
            2.0,
            0.0,
            1.0,
            Variant::DivisorN,
        )
        .unwrap();
        let row = &r.rows[0];
        assert_eq!(row.source, Source::ExactEnumeration);
        assert_eq!(row.mc_stderr_band, 0.0);
        assert!(row.sup_corrected <= row.sup_plain + row.sup_ln);
        assert!((0.0..=1.0).contains(&row.ratio_3pt));
    }

    #[test]
    fn rademacher_sums_coincide() {
        let d = DistributionSpec::rademacher();
        let a = nonstudentized_report(&d, &[100], 1, 0, Statistic::SumOverBn).unwrap();
        let b = nonstudentized_report(&d, &[100], 1, 0, Statistic::SumOverRootNSigma).unwrap();
        assert_eq!(a.rows[0].sup_plain, b.rows[0].sup_plain);
        assert_eq!(a.rows[0].sup_corrected, b.rows[0].sup_corrected);
    }

    #[test]
    fn csv_has_one_line_per_row() {
        let r = build_rate_report(
            &DistributionSpec::three_point(),
            &[10, 6, 8, 8],
            1,
            0,
            2.0,
            0.0,
            1.0,
            Variant::DivisorN,
        )
        .unwrap();
        assert_eq!(r.rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![6, 8, 10]);
        assert_eq!(r.to_csv().lines().count(), 4);
    }
}
