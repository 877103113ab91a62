use std::sync::OnceLock;

use ekdev_core::measures::LimitMeasure;
use ekdev_core::simulate::{
    chernoff_tail_bounds, exact_y_distribution, exact_z_distribution, joint_moment_gap, BernoulliSystem,
};
use ekdev_core::{
    closed_form_rate, empirical_rho, lambert_w, legendre_rate, mu_sigma, AdditiveFunctionSpec, ClosedFormFamily,
    PrimeTable, Primes,
};
use num_rational::Ratio;
use proptest::prelude::*;

fn table() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| PrimeTable::new(1_000_000).unwrap())
}

fn primes() -> &'static Primes {
    table().primes()
}

fn lattice_spec() -> impl Strategy<Value = AdditiveFunctionSpec> {
    let v = (-4i32..=4).prop_map(|k| k as f64 * 0.5);
    prop_oneof![
        v.clone().prop_map(|a| AdditiveFunctionSpec::constant(a).unwrap()),
        (v.clone(), v.clone()).prop_map(|(a, b)| AdditiveFunctionSpec::two_value_by_index(a, b).unwrap()),
        (v.clone(), v, prop::collection::btree_set(2u64..200, 0..4)).prop_map(|(a, b, bps)| {
            AdditiveFunctionSpec::interval_oscillating(a, b, bps.into_iter().collect()).unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorization_reconstructs(m in 1u64..2_000_000_000) {
        let f = table().factorize(m).unwrap();
        let mut prod = 1u64;
        let mut last = 0;
        for &(p, e) in &f {
            prop_assert!(p > last);
            prop_assert!(primes().is_prime(p) || ekdev_core::primes::is_prime_trial(p));
            prod *= p.pow(e);
            last = p;
        }
        prop_assert_eq!(prod, m);
    }

    #[test]
    fn spf_divides_and_is_least(m in 2u64..1_000_000) {
        let s = table().spf(m).unwrap();
        prop_assert_eq!(m % s, 0);
        prop_assert!(primes().is_prime(s));
        prop_assert!(primes().as_slice().iter().take_while(|&&p| p < s).all(|&p| m % p != 0));
    }

    #[test]
    fn mertens_monotone(a in 2u64..500_000, b in 2u64..500_000) {
        let (lo, hi) = (a.min(b), a.max(b));
        let sl = primes().mertens_sums(lo).unwrap();
        let sh = primes().mertens_sums(hi).unwrap();
        prop_assert!(sl.total <= sh.total);
        prop_assert_eq!(sh.total, sh.odd_index + sh.even_index);
    }

    #[test]
    fn mu_sigma_scales(c in -3.0f64..3.0, n in 10u64..100_000) {
        prop_assume!(c.abs() > 1e-3);
        let spec = AdditiveFunctionSpec::two_value_by_index(1.0, 2.0).unwrap();
        let base = mu_sigma(&spec, primes(), n, Some(1.0)).unwrap();
        let scaled = mu_sigma(&spec.scaled(c).unwrap(), primes(), n, Some(1.0)).unwrap();
        prop_assert!((scaled.mu_n - c * base.mu_n).abs() <= 1e-12 * base.mu_n.abs().max(1.0) * c.abs());
        prop_assert!((scaled.sigma2_n - c * c * base.sigma2_n).abs() <= 1e-12 * base.sigma2_n * c * c);
    }

    #[test]
    fn empirical_weights_sum_to_one(spec in lattice_spec(), n in 2u64..100_000) {
        match empirical_rho(&spec, primes(), n) {
            Ok(rho) => prop_assert!((rho.total_weight() - 1.0).abs() <= 1e-12),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn dp_law_is_a_distribution(spec in lattice_spec(), q in 2u64..20_000, c in 0.0f64..3.0) {
        let d = exact_y_distribution(primes(), q, &spec, c).unwrap();
        prop_assert!((d.total_mass() - 1.0).abs() <= 1e-12);
        prop_assert!(d.probs.iter().all(|&p| p >= 0.0));
        let ps = primes().up_to(q).unwrap();
        let mean: f64 = ps.iter().enumerate()
            .map(|(i, &p)| (spec.value_at(i, p), p))
            .filter(|&(g, _)| g.abs() <= c)
            .map(|(g, p)| g / p as f64)
            .sum();
        prop_assert!((d.mean() - mean).abs() <= 1e-10, "{} vs {mean}", d.mean());
    }

    #[test]
    fn joint_gap_in_unit_window(n in 1u64..10_000_000, picks in prop::collection::btree_set(0usize..60, 1..6)) {
        let ps: Vec<u64> = picks.into_iter().map(|i| primes().as_slice()[i]).collect();
        let g = joint_moment_gap(n, &ps).unwrap();
        prop_assert!(g.gap >= Ratio::new(0, 1));
        prop_assert!(g.gap <= Ratio::new(1, n as u128));
        prop_assert_eq!(g.y_moment - g.z_moment, g.gap);
    }

    #[test]
    fn exact_tail_below_chernoff(q in 2u64..5_000, seed_grid in prop::collection::vec(0.01f64..4.0, 1..20)) {
        let spec = AdditiveFunctionSpec::two_value_by_index(1.0, 2.0).unwrap();
        let d = exact_y_distribution(primes(), q, &spec, 2.0).unwrap();
        let sys = BernoulliSystem::new(primes(), q, &spec, 2.0).unwrap();
        let ts: Vec<f64> = (0..d.len()).map(|i| d.value(i)).collect();
        let bounds = chernoff_tail_bounds(|t| sys.log_mgf(t), &ts, &seed_grid);
        for (t, b) in ts.iter().zip(bounds) {
            // grid points all positive: valid for every upper tail
            prop_assert!(d.tail_ge(*t) <= b, "t = {t}");
        }
    }

    #[test]
    fn legendre_matches_closed_forms(x in 0.01f64..8.0, lambda in 0.2f64..4.0) {
        for f in [ClosedFormFamily::Constant { lambda }, ClosedFormFamily::Poisson { lambda }] {
            let c = closed_form_rate(f, x).unwrap();
            let n = legendre_rate(&f.measure().unwrap(), x, f64::INFINITY).unwrap();
            prop_assert!((c.value - n.value).abs() <= 1e-8 * c.value.max(1.0));
        }
    }

    #[test]
    fn rate_is_nonnegative_and_convex(x in -4.0f64..4.0, h in 0.01f64..0.5) {
        let rho = LimitMeasure::atoms(vec![(-1.0, 0.25), (0.5, 0.25), (1.5, 0.5)]).unwrap();
        let r = |x: f64| legendre_rate(&rho, x, f64::INFINITY).unwrap().value;
        let (a, b, c) = (r(x - h), r(x), r(x + h));
        prop_assert!(b >= 0.0);
        prop_assert!(a + c - 2.0 * b >= -1e-9);
    }

    #[test]
    fn lambert_round_trip(z in -0.367f64..1e6) {
        let w = lambert_w(z).unwrap();
        prop_assert!((w * w.exp() - z).abs() <= 1e-12 * z.abs().max(1.0));
    }
}

#[test]
fn z_and_y_moments_agree_within_bound() {
    let spec = AdditiveFunctionSpec::constant(1.0).unwrap();
    let two = AdditiveFunctionSpec::two_value_by_index(1.0, 2.0).unwrap();
    for (spec, c) in [(spec, 1.0), (two, 2.0)] {
        for n in [100u64, 1_000, 10_000] {
            let z = exact_z_distribution(n, &spec).unwrap();
            let y = exact_y_distribution(primes(), n, &spec, c).unwrap();
            for r in 1..=4 {
                let gap = (z.moment(r) - y.moment(r)).abs();
                let bound = (c * n as f64).powi(r) / n as f64;
                assert!(gap <= bound, "n = {n}, r = {r}: {gap} > {bound}");
            }
        }
    }
}

#[test]
fn monte_carlo_matches_exact_law() {
    let spec = AdditiveFunctionSpec::constant(1.0).unwrap();
    let q = 10_000;
    let exact = exact_y_distribution(primes(), q, &spec, 1.0).unwrap();
    let batch = ekdev_core::sample_y(primes(), q, &spec, 1_000_000, 11).unwrap();
    let mut counts = vec![0u64; 32];
    for &v in &batch.values {
        counts[v as usize] += 1;
    }
    let empirical = ekdev_core::DiscreteDistribution::from_counts(0, 1.0, &counts).unwrap();
    let tv = exact.total_variation(&empirical).unwrap();
    assert!(tv <= 0.01, "tv = {tv}");
    let mean = primes().mertens_sums(q).unwrap().total;
    let se = (batch.variance() / batch.values.len() as f64).sqrt();
    assert!((batch.mean() - mean).abs() <= 3.0 * se);
}

#[test]
fn z_sample_mean_matches_exact_identity() {
    let spec = AdditiveFunctionSpec::constant(1.0).unwrap();
    let n = 1_000_000u64;
    let batch = ekdev_core::sample_z(table(), n, &spec, 100_000, 5).unwrap();
    let exact: f64 = primes().up_to(n).unwrap().iter().map(|&p| (n / p) as f64 / n as f64).sum();
    let se = (batch.variance() / batch.values.len() as f64).sqrt();
    assert!((batch.mean() - exact).abs() <= 3.0 * se, "{} vs {exact}", batch.mean());
}
