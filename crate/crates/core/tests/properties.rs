use proptest::prelude::*;
use vgamma::cli::format_number;
use vgamma::diagnostics::{empirical_char, ks_one_sample, ks_two_sample};
use vgamma::model::{factor_params, vg_char, vg_density, GammaParams, VgParams};
use vgamma::sampling::{invert_jump_survival, sample_vg_difference, RngHandle};
use vgamma::special_fn::{bessel_k, exp_integral_e1};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn driftless_density_is_even(a in 0.2f64..4.0, b in 0.2f64..5.0, t in 0.3f64..3.0, x in 0.01f64..20.0) {
        let p = VgParams::driftless(a, b).unwrap();
        prop_assert_eq!(vg_density(&p, t, x).unwrap(), vg_density(&p, t, -x).unwrap());
    }

    #[test]
    fn factor_rates_multiply_to_b(a in 0.1f64..5.0, b in 0.01f64..50.0, theta in -20.0f64..20.0) {
        let p = VgParams::new(a, b, theta).unwrap();
        let f = factor_params(&p);
        prop_assert!((f.gain.b() * f.loss.b() - b).abs() <= 4.0 * f64::EPSILON * b);
        prop_assert!((f.loss.b() - f.gain.b() - theta).abs() <= 1e-12 * (1.0 + theta.abs() + b.sqrt()));
        prop_assert!(f.gain.b() > 0.0 && f.loss.b() > 0.0);
    }

    #[test]
    fn char_function_is_a_char_function(a in 0.1f64..4.0, b in 0.1f64..5.0, theta in -3.0f64..3.0,
                                         t in 0.0f64..4.0, xi in -30.0f64..30.0) {
        let p = VgParams::new(a, b, theta).unwrap();
        let c = vg_char(&p, t, xi);
        prop_assert!(c.norm() <= 1.0 + 1e-15);
        prop_assert!((vg_char(&p, t, -xi) - c.conj()).norm() <= 1e-15);
        prop_assert_eq!(vg_char(&p, t, 0.0).re, 1.0);
    }

    #[test]
    fn e1_decreases(x in 1e-6f64..600.0, dx in 1e-3f64..5.0) {
        prop_assert!(exp_integral_e1(x).unwrap() > exp_integral_e1(x + dx).unwrap());
    }

    #[test]
    fn bessel_three_term_recurrence(nu in 2.0f64..30.0, x in 0.05f64..60.0) {
        let k = |n: f64| bessel_k(n, x).unwrap();
        let built = k(nu - 2.0) + 2.0 * (nu - 1.0) / x * k(nu - 1.0);
        prop_assert!((k(nu) - built).abs() <= 1e-9 * k(nu));
    }

    #[test]
    fn format_number_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
        let s = format_number(x);
        prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ks_statistics_are_well_formed(a in prop::collection::vec(-5.0f64..5.0, 1..60),
                                     b in prop::collection::vec(-5.0f64..5.0, 1..60)) {
        let cdf = |x: f64| 1.0 / (1.0 + (-x).exp());
        let one = ks_one_sample(&a, cdf).unwrap();
        prop_assert!((0.0..=1.0).contains(&one.statistic));
        prop_assert_eq!(one.pass, one.statistic <= one.threshold);
        let ab = ks_two_sample(&a, &b).unwrap();
        let ba = ks_two_sample(&b, &a).unwrap();
        prop_assert_eq!(ab.statistic, ba.statistic);
        prop_assert_eq!(ab.pass, ab.statistic <= ab.threshold);
        prop_assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
        // Probability-integral transform: the statistic only sees ranks.
        let moved: Vec<f64> = a.iter().map(|x| x.powi(3) + x).collect();
        let inverse = |y: f64| {
            // Solve x³ + x = y by Newton; the map is strictly increasing.
            let mut x = y.cbrt();
            for _ in 0..60 {
                x -= (x * x * x + x - y) / (3.0 * x * x + 1.0);
            }
            x
        };
        let transported = ks_one_sample(&moved, |y| cdf(inverse(y))).unwrap();
        prop_assert!((transported.statistic - one.statistic).abs() < 1e-12);
    }

    #[test]
    fn empirical_char_is_bounded(v in prop::collection::vec(-50.0f64..50.0, 1..100), xi in -10.0f64..10.0) {
        prop_assert!(empirical_char(&v, xi).unwrap().norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn jump_inversion_is_monotone(c in 0.1f64..5.0, gamma in 1e-4f64..2.0, u in 1e-9f64..1.0, shrink in 0.01f64..0.99) {
        let jumps = GammaParams::new(1.0, c).unwrap();
        let y = invert_jump_survival(&jumps, gamma, u).unwrap();
        let y2 = invert_jump_survival(&jumps, gamma, u * shrink).unwrap();
        prop_assert!(y >= gamma);
        prop_assert!(y2 >= y);
    }

    #[test]
    fn sampling_is_a_function_of_seed_and_stream(seed in any::<u64>(), stream in 0u64..1000, theta in -1.0f64..1.0) {
        let p = VgParams::new(1.1, 0.9, theta).unwrap();
        let a = sample_vg_difference(&p, 0.8, 64, RngHandle::new(seed, stream)).unwrap();
        let b = sample_vg_difference(&p, 0.8, 64, RngHandle::new(seed, stream)).unwrap();
        prop_assert_eq!(a, b);
    }
}
