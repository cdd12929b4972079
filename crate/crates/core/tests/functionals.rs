use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use tstat_core::functionals::{compute_bn, compute_delta, compute_functionals};
use tstat_core::{DistributionCatalog, DistributionSpec, Error};

/// Largest root of `b² = 2n ln b` by plain bisection.
fn pareto_bn(n: f64) -> f64 {
    let g = |b: f64| 2.0 * n * b.ln() - b * b;
    let (mut lo, mut hi) = (n.sqrt().max(1.5), 10.0 * n.sqrt() + 10.0);
    assert!(g(lo) > 0.0 && g(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `E X² I(|X| ≤ c)` for `X = E − 1`, `c ≥ 1`: `∫₀^{1+c} (y−1)² e^{−y} dy`.
fn exp_second_moment(c: f64) -> f64 {
    1.0 - (-(1.0 + c)).exp() * ((1.0 + c).powi(2) + 1.0)
}

#[test]
fn pareto_radius_matches_root_finder() {
    let b = compute_bn(&DistributionSpec::pareto_tail(), 10).unwrap();
    let oracle = pareto_bn(10.0);
    assert!((b - oracle).abs() < 1e-10 * oracle, "{b} vs {oracle}");
    assert!((b - 5.98092974708556).abs() < 1e-9);
    for n in [100u64, 10_000, 1_000_000] {
        let b = compute_bn(&DistributionSpec::pareto_tail(), n).unwrap();
        let o = pareto_bn(n as f64);
        assert!((b - o).abs() < 1e-10 * o, "n = {n}");
    }
}

#[test]
fn exponential_radius_brackets_the_crossing() {
    let n = 1e4;
    let v = compute_bn(&DistributionSpec::centered_exponential(), 10_000).unwrap();
    let h = |x: f64| n * exp_second_moment(x) / (x * x);
    assert!(h(v * (1.0 + 1e-6)) < 1.0);
    assert!(h(v * (1.0 - 1e-6)) >= 1.0);
}

#[test]
fn rademacher_examples() {
    let d = DistributionSpec::rademacher();
    assert!((compute_bn(&d, 100).unwrap() - 10.0).abs() < 1e-12);
    let f = compute_functionals(&d, 100, 1.0).unwrap();
    assert_eq!(f.delta_components.as_array()[..3], [0.0, 0.0, 0.0]);
    assert!((f.delta_n - 0.01).abs() < 1e-15);
}

#[test]
fn uniform_odd_components_vanish() {
    for n in [10u64, 1000] {
        let f = compute_functionals(&DistributionSpec::uniform(), n, 1.0).unwrap();
        assert_eq!((f.delta_components.d2, f.delta_components.d3), (0.0, 0.0));
    }
}

/// Mean and standard error of `g(X)` over the draws.
fn mean_se(xs: &[f64], g: impl Fn(f64) -> f64) -> (f64, f64) {
    let n = xs.len() as f64;
    let (s, q) = xs.iter().fold((0.0, 0.0), |(s, q), &x| {
        let v = g(x);
        (s + v, q + v * v)
    });
    let m = s / n;
    (m, ((q / n - m * m) / n).sqrt())
}

/// Frequency of `|X| > c`, with the binomial standard error at the exact `p`
/// (the empirical one is zero when no draw lands in a far tail).
fn tail_freq(xs: &[f64], c: f64, p: f64) -> (f64, f64) {
    let n = xs.len() as f64;
    let k = xs.iter().filter(|x| x.abs() > c).count() as f64;
    (k / n, (p * (1.0 - p) / n).sqrt())
}

#[test]
fn exponential_functionals_match_monte_carlo() {
    let (n, alpha) = (1000u64, 0.25);
    let f = compute_functionals(&DistributionSpec::centered_exponential(), n, alpha).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let xs: Vec<f64> = (0..10_000_000)
        .map(|_| {
            let e: f64 = Exp1.sample(&mut rng);
            e - 1.0
        })
        .collect();
    let (b, a) = (f.b_n, alpha * f.b_n);
    let nf = n as f64;
    let within = |c: f64, j: i32| move |x: f64| if x.abs() <= c { x.powi(j) } else { 0.0 };
    let checks: Vec<(&str, f64, (f64, f64))> = vec![
        ("nu", f.nu, mean_se(&xs, within(a, 1))),
        ("tau2", f.tau2, mean_se(&xs, within(a, 2))),
        ("sigma_n2", f.sigma_n2, mean_se(&xs, within(b, 2))),
        ("rho_n / n", f.rho_n / nf, tail_freq(&xs, a, f.rho_n / nf)),
        (
            "d1 / n",
            f.delta_components.d1 / nf,
            tail_freq(&xs, b, f.delta_components.d1 / nf),
        ),
        ("d3 b^3 / n", f.delta_components.d3 * b.powi(3) / nf, {
            let (m, s) = mean_se(&xs, within(b, 3));
            (m.abs(), s)
        }),
        (
            "d4 b^4 / n",
            f.delta_components.d4 * b.powi(4) / nf,
            mean_se(&xs, within(b, 4)),
        ),
        (
            "u3 B^3 / n",
            f.u[2] * f.big_b_n().powi(3) / nf,
            mean_se(&xs, within(a, 3)),
        ),
        (
            "u4 B^4 / n",
            f.u[3] * f.big_b_n().powi(4) / nf,
            mean_se(&xs, within(a, 4)),
        ),
    ];
    for (name, exact, (m, se)) in checks {
        assert!((exact - m).abs() <= 4.0 * se, "{name}: {exact} vs {m} ± {se}");
    }
}

#[test]
fn scaling_moves_only_the_radius() {
    let cat = DistributionCatalog::standard();
    for d in cat.entries() {
        for n in [100u64, 10_000] {
            let base = compute_functionals(d, n, 0.25).unwrap();
            for c in [0.5, 2.0, 7.0] {
                let s = compute_functionals(&d.scaled(c).unwrap(), n, 0.25).unwrap();
                let rel = |a: f64, b: f64| {
                    if a == b {
                        0.0
                    } else {
                        (a - b).abs() / a.abs().max(b.abs())
                    }
                };
                assert!(rel(s.b_n, c * base.b_n) < 1e-9, "{} n={n} c={c}", d.name());
                assert!(rel(s.delta_n, base.delta_n) < 1e-9, "{} n={n} c={c}", d.name());
                assert!(rel(s.rho_n, base.rho_n) < 1e-9, "{} n={n} c={c}", d.name());
                for j in 0..4 {
                    assert!(
                        (s.u[j] - base.u[j]).abs() <= 1e-9 * base.u[j].abs().max(1e-300),
                        "{} n={n} c={c} u{}",
                        d.name(),
                        j + 1
                    );
                }
            }
        }
    }
}

#[test]
fn delta_decreases_over_decades() {
    let cat = DistributionCatalog::standard();
    for d in cat.entries() {
        let deltas: Vec<f64> = [100u64, 1000, 10_000, 100_000]
            .iter()
            .map(|&n| compute_delta(d, n).unwrap().1.total())
            .collect();
        assert!(deltas.windows(2).all(|w| w[1] < w[0]), "{}: {deltas:?}", d.name());
    }
}

#[test]
fn radius_matches_truncated_variance() {
    // h(b_n) = 1 whenever h is continuous at b_n, so b_n² = n σ_n² up to the
    // root tolerance for every catalog law.
    let cat = DistributionCatalog::standard();
    for d in cat.entries() {
        for n in [100u64, 1000, 10_000, 100_000] {
            let f = compute_functionals(d, n, 0.25).unwrap();
            let gap = (f.b_n * f.b_n / (n as f64 * f.sigma_n2) - 1.0).abs();
            assert!(gap <= 1e-9, "{} n={n}: {gap}", d.name());
        }
    }
}

#[test]
fn degenerate_and_invalid_inputs() {
    let point = DistributionSpec::discrete("zero", vec![0.0], vec![1.0]).unwrap();
    assert!(matches!(compute_bn(&point, 5), Err(Error::Degenerate(_))));
    let d = DistributionSpec::centered_exponential();
    assert!(compute_functionals(&d, 100, 0.0).unwrap_err().is_validation());
    assert!(compute_functionals(&d, 100, 1.01).unwrap_err().is_validation());
    assert!(compute_bn(&d, 0).unwrap_err().is_validation());
}
