//! Property-based invariants across the numerical layers.

use approx::assert_relative_eq;
use index_transform::cli::GridTable;
use index_transform::gamma::{gamma, gamma_bracket, gamma_ratio_real, log_gamma, GammaRatioSpec};
use index_transform::hyper::{phi, phi_real, KernelParams};
use index_transform::poly::{jacobi_poly, wilson_poly};
use index_transform::quad::{integrate_halfline, Decay, QuadratureConfig};
use index_transform::xform::{forward, TransformParams, WeightedFunction};
use index_transform::Complex64;
use proptest::prelude::*;

fn away_from_poles() -> impl Strategy<Value = Complex64> {
    (-10.0f64..10.0, -20.0f64..20.0)
        .prop_map(|(re, im)| Complex64::new(re, im))
        .prop_filter("too close to a pole", |z| z.re > 0.0 || (z - Complex64::new(z.re.round(), 0.0)).norm() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn log_gamma_recurrence(z in away_from_poles()) {
        let ratio = (log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap()).exp();
        prop_assert!((ratio - z).norm() <= 1e-12 * z.norm());
    }

    #[test]
    fn log_gamma_conjugate_symmetry(z in away_from_poles()) {
        let a = log_gamma(z.conj()).unwrap();
        let b = log_gamma(z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-13 * b.norm().max(1.0));
    }

    #[test]
    fn bracket_matches_explicit_product(a in 0.1f64..4.0, b in 0.1f64..4.0, c in 0.1f64..4.0, t in -2.0f64..2.0) {
        let spec = GammaRatioSpec::new().num(a, 1.0).num(b, -1.0).den(c, 1.0);
        let at = Complex64::new(0.0, t);
        let want = gamma(Complex64::new(a, t)).unwrap() * gamma(Complex64::new(b, -t)).unwrap() / gamma(Complex64::new(c, t)).unwrap();
        let got = gamma_bracket(&spec, at).unwrap();
        prop_assert!((got - want).norm() <= 1e-12 * want.norm());
    }

    #[test]
    fn kernel_is_even_in_s(b in 0.1f64..1.5, c in 0.1f64..1.5, x in 0.0f64..50.0, s in 0.0f64..8.0) {
        let p = KernelParams::new(b, c).unwrap();
        prop_assert_eq!(phi_real(p, x, s).unwrap(), phi_real(p, x, -s).unwrap());
        prop_assert_eq!(phi(p, x, Complex64::new(s, 0.0)).unwrap().im, 0.0);
    }

    #[test]
    fn wilson_polynomials_are_symmetric(a in 0.2f64..1.5, b in 0.2f64..1.5, c in 0.2f64..1.5, d in 0.2f64..1.5, n in 0usize..6, s in 0.0f64..3.0) {
        let base = wilson_poly(a, b, c, d, n, s).unwrap();
        for q in [(b, a, c, d), (c, b, a, d), (d, b, c, a), (a, c, b, d), (b, c, d, a)] {
            let v = wilson_poly(q.0, q.1, q.2, q.3, n, s).unwrap();
            prop_assert!((v - base).abs() <= 1e-9 * base.abs().max(1.0));
        }
    }

    #[test]
    fn jacobi_endpoint_value(alpha in 0.0f64..3.0, beta in 0.0f64..3.0, n in 0usize..8) {
        // The shifted Jacobi polynomial equals (α+1)_n/n! at x = 1.
        let p = jacobi_poly(alpha, beta, n).unwrap();
        let want = gamma_ratio_real(&[alpha + 1.0 + n as f64], &[alpha + 1.0, n as f64 + 1.0]).unwrap();
        prop_assert!((p.eval(1.0) - want).abs() <= 1e-10 * want.abs().max(1.0));
    }

    #[test]
    fn csv_tables_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 0..20)) {
        let t = GridTable { columns: vec!["a".into(), "b".into(), "c".into()], rows };
        let text = t.to_csv().unwrap();
        let back = GridTable::from_csv(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.to_csv().unwrap(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forward_is_real_even_and_linear(b in 0.2f64..1.2, c in 0.2f64..1.2, s in 0.1f64..4.0, k in -3.0f64..3.0) {
        let p = TransformParams::new(b, c).unwrap();
        let cfg = QuadratureConfig::default();
        let f = WeightedFunction::new(|x: f64| (-x).exp(), 0.0, Decay::Superpolynomial);
        let g = WeightedFunction::new(move |x: f64| k * (-x).exp(), 0.0, Decay::Superpolynomial);
        let a = forward(&p, &f, Complex64::new(s, 0.0), &cfg).unwrap();
        let m = forward(&p, &f, Complex64::new(-s, 0.0), &cfg).unwrap();
        let scaled = forward(&p, &g, Complex64::new(s, 0.0), &cfg).unwrap();
        prop_assert_eq!(a.im, 0.0);
        prop_assert_eq!(a, m);
        prop_assert!((scaled - a * k).norm() <= 1e-10 * a.norm() * k.abs().max(1e-3));
    }
}

/// Beta family ∫₀^∞ x^{p−1}(1+x)^{−p−q} dx = B(p, q).
fn beta_case(p: f64, q: f64, cfg: &QuadratureConfig) -> (f64, f64) {
    let r = integrate_halfline(&|x: f64| x.powf(p - 1.0) * (1.0 + x).powf(-p - q), p - 1.0, Decay::Algebraic(q + 1.0), cfg);
    let exact = gamma_ratio_real(&[p, q], &[p + q]).unwrap();
    ((r.value - exact).abs(), r.error_estimate)
}

#[test]
fn quadrature_error_estimates_are_honest() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let cfg = QuadratureConfig { tol_rel: 1e-9, ..QuadratureConfig::default() };
    let mut honest = 0;
    for _ in 0..500 {
        let (p, q) = (rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0));
        let (err, est) = beta_case(p, q, &cfg);
        // Estimates at the rounding floor are compared against a few ulps of the value.
        if err <= 10.0 * est.max(1e-15) {
            honest += 1;
        }
    }
    assert!(honest >= 495, "{honest} of 500 estimates bound the true error");
}

#[test]
fn tighter_tolerance_does_not_hurt() {
    for &(p, q) in &[(0.3, 0.5), (1.2, 2.7), (2.5, 0.25), (0.9, 0.9)] {
        let mut last = f64::INFINITY;
        for tol in [1e-4, 5e-5, 2.5e-5, 1e-6, 1e-8, 1e-10] {
            let cfg = QuadratureConfig { tol_rel: tol, ..QuadratureConfig::default() };
            let (err, _) = beta_case(p, q, &cfg);
            let exact = gamma_ratio_real(&[p, q], &[p + q]).unwrap();
            assert!(err <= last.max(4.0 * f64::EPSILON * exact), "p={p} q={q} tol={tol}: {err} > {last}");
            last = err;
        }
    }
}

#[test]
fn beta_oracle_values() {
    let cfg = QuadratureConfig::default();
    let r = integrate_halfline(&|x: f64| (1.0 + x).powi(-2), 0.0, Decay::Algebraic(2.0), &cfg);
    assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
    let r = integrate_halfline(&|x: f64| x.powf(-0.5) / (1.0 + x), -0.5, Decay::Algebraic(1.5), &cfg);
    assert_relative_eq!(r.value, std::f64::consts::PI, max_relative = 1e-11);
}
