//! The normal quantile and the expected-minimum approximation, checked
//! against independent oracles.

use nested_dichotomies::analysis::{expected_min_normal, inverse_normal_cdf, normal_cdf, OrderStatQuery};
use nested_dichotomies::seed;
use proptest::prelude::*;
use rand_distr::{Distribution, StandardNormal};

/// Maclaurin series of erf, fine for |x| < 3.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term.abs() > 1e-18 * sum.abs() {
        n += 1.0;
        term *= -x * x / n;
        sum += term / (2.0 * n + 1.0);
    }
    2.0 / std::f64::consts::PI.sqrt() * sum
}

fn bisect_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-6.0, 6.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 0.5 * (1.0 + erf_series(mid / std::f64::consts::SQRT_2)) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn monte_carlo_min(lambda: usize, samples: usize, key: u64) -> f64 {
    let mut rng = seed::stream(key);
    let mut total = 0.0;
    for _ in 0..samples {
        let mut m = f64::INFINITY;
        for _ in 0..lambda {
            let z: f64 = StandardNormal.sample(&mut rng);
            m = m.min(z);
        }
        total += m;
    }
    total / samples as f64
}

#[test]
fn quantile_matches_bisection_oracle() {
    let oracle = bisect_quantile(0.975);
    assert!((oracle - 1.959964).abs() < 1e-5);
    assert!((inverse_normal_cdf(0.975).unwrap() - oracle).abs() < 1e-9);
    for p in [0.02, 0.1, 0.3, 0.5, 0.77, 0.9, 0.99] {
        assert!(
            (inverse_normal_cdf(p).unwrap() - bisect_quantile(p)).abs() < 1e-9,
            "p = {p}"
        );
    }
    assert_eq!(inverse_normal_cdf(0.5).unwrap(), 0.0);
}

#[test]
fn quantile_round_trip_on_grid() {
    for i in 1..=999 {
        let p = i as f64 / 1000.0;
        let z = inverse_normal_cdf(p).unwrap();
        assert!((normal_cdf(z) - p).abs() <= 1e-9, "p = {p}");
    }
}

#[test]
fn quantile_rejects_out_of_range() {
    for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
        assert!(inverse_normal_cdf(p).is_err(), "p = {p}");
    }
}

#[test]
fn cdf_agrees_with_series_oracle() {
    for i in -40..=40 {
        let z = i as f64 * 0.1;
        let oracle = 0.5 * (1.0 + erf_series(z / std::f64::consts::SQRT_2));
        assert!((normal_cdf(z) - oracle).abs() < 1e-13, "z = {z}");
    }
}

#[test]
fn expected_minimum_tracks_monte_carlo() {
    for lambda in 2..=10 {
        let approx = expected_min_normal(&OrderStatQuery::new(0.0_f64, 1.0, lambda)).unwrap();
        let mc = monte_carlo_min(lambda, 1_000_000, lambda as u64);
        assert!((approx - mc).abs() <= 0.05, "lambda {lambda}: {approx} vs {mc}");
    }
}

#[test]
fn expected_minimum_of_two_draws() {
    let v = expected_min_normal(&OrderStatQuery::new(0.0_f64, 1.0, 2)).unwrap();
    assert!((v + 0.5894).abs() < 1e-4);
    let mc = monte_carlo_min(2, 1_000_000, 2024);
    assert!((mc + 1.0 / std::f64::consts::PI.sqrt()).abs() < 0.005);
}

#[test]
fn works_in_single_precision() {
    let v = expected_min_normal(&OrderStatQuery::new(0.0f32, 1.0, 2)).unwrap();
    assert!((v + 0.5894).abs() < 1e-3);
}

proptest! {
    #[test]
    fn exact_mu_at_one_draw_or_zero_spread(mu in -5.0f64..5.0, sigma in 0.0f64..3.0, alpha in 0.0f64..=0.5, lambda in 1usize..50) {
        let one = OrderStatQuery::new(mu, sigma, 1).with_alpha(alpha);
        prop_assert_eq!(expected_min_normal(&one).unwrap(), mu);
        let flat = OrderStatQuery::new(mu, 0.0, lambda).with_alpha(alpha);
        prop_assert_eq!(expected_min_normal(&flat).unwrap(), mu);
    }

    #[test]
    fn non_increasing_in_lambda(mu in -5.0f64..5.0, sigma in 0.0f64..3.0, alpha in 0.0f64..=0.5, lambda in 1usize..100) {
        let a = expected_min_normal(&OrderStatQuery::new(mu, sigma, lambda).with_alpha(alpha)).unwrap();
        let b = expected_min_normal(&OrderStatQuery::new(mu, sigma, lambda + 1).with_alpha(alpha)).unwrap();
        prop_assert!(b <= a);
    }
}
