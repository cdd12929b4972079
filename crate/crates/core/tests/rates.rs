use tstat_core::leading_terms::{eval_ln, Grid};
use tstat_core::rates::{
    build_rate_report, nonstudentized_report, sum_law, three_point_equivalence, three_point_sup, RateReport,
};
use tstat_core::simulation::{Source, Statistic, Variant};
use tstat_core::special::normal_cdf;
use tstat_core::DistributionSpec;

fn exact_report(d: &DistributionSpec, n: u64) -> RateReport {
    build_rate_report(d, &[n], 1, 0, 2.0, 0.0, 0.25, Variant::DivisorN).unwrap()
}

#[test]
fn rademacher_n8_row_is_exact() {
    let r = exact_report(&DistributionSpec::rademacher(), 8);
    let row = &r.rows[0];
    assert_eq!((row.source, row.mc_stderr_band), (Source::ExactEnumeration, 0.0));
    // P(T = 0) = C(8,4)/2⁸ and the jump at 0 sets the plain sup.
    assert_eq!(row.sup_plain, 70.0 / 256.0 / 2.0);
    assert!(row.sup_corrected <= row.sup_plain);
    assert!(row.sup_corrected <= row.sup_plain + row.sup_ln);
}

#[test]
#[ignore = "lattice law: the atom of T at 0 carries both sups and L_n(0) = 0, so they tie exactly"]
fn rademacher_n8_correction_is_strict() {
    let row = &exact_report(&DistributionSpec::rademacher(), 8).rows[0];
    assert!(
        row.sup_corrected < row.sup_plain,
        "{} vs {}",
        row.sup_corrected,
        row.sup_plain
    );
}

#[test]
fn three_point_correction_is_strict() {
    let r = build_rate_report(
        &DistributionSpec::three_point(),
        &[6, 8, 10, 12, 14],
        1,
        0,
        2.0,
        0.0,
        0.25,
        Variant::DivisorN,
    )
    .unwrap();
    for row in &r.rows {
        assert_eq!(row.source, Source::ExactEnumeration);
        assert!(row.sup_corrected < row.sup_plain, "n={}", row.n);
    }
}

#[test]
fn symmetric_three_point_sup_covers_each_point() {
    let g = Grid::default_with(2.0, 0.0);
    for d in [
        DistributionSpec::uniform(),
        DistributionSpec::student_t(3.0).unwrap(),
        DistributionSpec::rademacher(),
    ] {
        for n in [100u64, 1000] {
            let l = eval_ln(&d, n, &g).unwrap();
            let s = three_point_sup(&l, 2.0, 0.0).unwrap();
            let (a, b) = (l.at(-2.0).unwrap(), l.at(2.0).unwrap());
            assert!((a.abs() - b.abs()).abs() <= 1e-12 * l.sup_abs(), "{} n={n}", d.name());
            assert!(s >= l.at(0.0).unwrap().abs() && s >= a.abs());
        }
    }
}

#[test]
fn three_point_set_through_the_argmax_recovers_the_sup() {
    let d = DistributionSpec::centered_exponential();
    let g = Grid::default();
    let l = eval_ln(&d, 500, &g).unwrap();
    let (i, _) = l
        .values
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |m, (i, v)| if v.abs() > m.1 { (i, v.abs()) } else { m });
    let xm = g.points()[i];
    let l2 = eval_ln(&d, 500, &Grid::default_with(2.0, xm)).unwrap();
    assert_eq!(three_point_sup(&l2, 2.0, xm).unwrap(), l2.sup_abs());
}

#[test]
fn rademacher_large_n_ratio_is_a_fraction() {
    let r = three_point_equivalence(&DistributionSpec::rademacher(), &[10_000], 2.0, 0.0).unwrap();
    assert!(r[0] > 0.0 && r[0] <= 1.0, "{r:?}");
    assert!(three_point_equivalence(&DistributionSpec::rademacher(), &[100], 1.7, 0.0).is_err());
    assert!(three_point_equivalence(&DistributionSpec::rademacher(), &[100], 2.0, -2.0).is_err());
}

#[test]
fn exponential_rate_ratio_band() {
    let r = build_rate_report(
        &DistributionSpec::centered_exponential(),
        &[50, 200, 800],
        1_000_000,
        42,
        2.0,
        0.0,
        0.25,
        Variant::DivisorN,
    )
    .unwrap();
    // Recorded on the first run (0.311, 0.353, 0.389) and frozen.
    for row in &r.rows {
        assert_eq!(row.source, Source::MonteCarlo);
        assert!(
            row.ratio_25.is_finite() && (0.28..=0.42).contains(&row.ratio_25),
            "n={}: {}",
            row.n,
            row.ratio_25
        );
        assert!(row.sup_corrected < row.sup_plain);
        assert!(row.sup_corrected <= row.sup_plain + row.sup_ln);
        assert!((0.0..=1.0).contains(&row.ratio_3pt));
    }
}

/// `P(K ≤ k)` for `K ~ Bin(n, ½)`, from the pmf recursion `p_k = p_{k−1}(n−k+1)/k`.
fn binomial_half_cdf(n: u64) -> Vec<f64> {
    let mut p = 0.5f64.powi(n as i32);
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        if k > 0 {
            p *= (n - k + 1) as f64 / k as f64;
        }
        acc += p;
        out.push(acc);
    }
    out
}

#[test]
fn rademacher_sum_against_binomial() {
    let g = Grid::default_with(2.0, 0.0);
    for n in [100u64, 1000] {
        // S₁ = (2K − n)/√n, so S₁ ≤ x iff K ≤ (n + x√n)/2.
        let cdf = binomial_half_cdf(n);
        let oracle = |x: f64| {
            let k = ((n as f64 + x * (n as f64).sqrt()) / 2.0 + 1e-9).floor();
            if k < 0.0 {
                0.0
            } else {
                cdf[(k as usize).min(n as usize)]
            }
        };
        let emp = sum_law(&DistributionSpec::rademacher(), n, 1, 0, Statistic::SumOverBn).unwrap();
        assert_eq!(emp.source, Source::ExactEnumeration);
        let mut sup_plain = 0.0f64;
        for &x in g.points() {
            assert!((emp.cdf(x) - oracle(x)).abs() < 1e-12, "n={n} x={x}");
            sup_plain = sup_plain.max((oracle(x) - normal_cdf(x)).abs());
        }
        let r1 = nonstudentized_report(&DistributionSpec::rademacher(), &[n], 1, 0, Statistic::SumOverBn).unwrap();
        let r2 = nonstudentized_report(
            &DistributionSpec::rademacher(),
            &[n],
            1,
            0,
            Statistic::SumOverRootNSigma,
        )
        .unwrap();
        assert!((r1.rows[0].sup_plain - sup_plain).abs() < 1e-12);
        assert_eq!(r1.rows[0].sup_plain, r2.rows[0].sup_plain);
        assert_eq!(r1.rows[0].sup_corrected, r2.rows[0].sup_corrected);
    }
}

#[test]
fn exponential_sum_correction_helps() {
    let d = DistributionSpec::centered_exponential();
    for s in [Statistic::SumOverBn, Statistic::SumOverRootNSigma] {
        let r = nonstudentized_report(&d, &[100], 1_000_000, 42, s).unwrap();
        let row = &r.rows[0];
        // Recorded: 0.0022 against 0.0128.
        assert!(row.sup_corrected < row.sup_plain, "{s:?}");
        assert!(row.sup_corrected < 0.5 * row.sup_plain);
    }
}

#[test]
fn studentized_statistic_is_not_a_sum() {
    let e = nonstudentized_report(&DistributionSpec::rademacher(), &[10], 1, 0, Statistic::Studentized).unwrap_err();
    assert!(e.is_validation());
}
