use proptest::prelude::*;

use stable_cone::cli::csv::Cell;
use stable_cone::cli::RunConfig;
use stable_cone::funcat::CatalogFunction;
use stable_cone::liouville::{critical_exponents, envelope_exponent, kelvin_alpha, wholespace_envelope_exponent};
use stable_cone::operator::apply_l;
use stable_cone::quad::{c_alpha, radial_integral, QuadratureConfig};
use stable_cone::spectral::{Cone, SpectralDensity};

fn unit_vector() -> impl Strategy<Value = Vec<f64>> {
    (0.0..std::f64::consts::TAU).prop_map(|phi| vec![phi.cos(), phi.sin()])
}

fn cone_density(phi: f64, tau: f64) -> SpectralDensity {
    SpectralDensity::cone_plateau(Cone::centered(vec![phi.cos(), phi.sin()], tau).unwrap(), 1.0, 0.3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn c_alpha_sign_follows_alpha_minus_s(s in 0.05..0.95f64, frac in 0.02..0.98f64) {
        let alpha = frac * 2.0 * s;
        let r = c_alpha(alpha, s, &QuadratureConfig::default()).unwrap();
        if (alpha - s).abs() > 1e-3 {
            prop_assert_eq!(r.value > 0.0, alpha > s, "α={} s={} c={}", alpha, s, r.value);
        }
    }

    #[test]
    fn c_alpha_increases_in_alpha(s in 0.05..0.6f64, f1 in 0.1..0.9f64, f2 in 0.1..0.9f64) {
        prop_assume!((f1 - f2).abs() > 1e-3);
        let cfg = QuadratureConfig::default();
        let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
        let a = c_alpha(lo * 2.0 * s, s, &cfg).unwrap();
        let b = c_alpha(hi * 2.0 * s, s, &cfg).unwrap();
        prop_assert!(a.value < b.value + 2.0 * (a.abs_error_estimate + b.abs_error_estimate));
    }

    #[test]
    fn densities_are_even(phi in 0.0..std::f64::consts::TAU, tau in 0.05..0.95f64, theta in unit_vector()) {
        let a = cone_density(phi, tau);
        let minus: Vec<f64> = theta.iter().map(|v| -v).collect();
        prop_assert_eq!(a.eval(&theta).unwrap(), a.eval(&minus).unwrap());
    }

    #[test]
    fn exponent_algebra(n in 1usize..6, s in 0.05..0.95f64) {
        let crit = critical_exponents(n, s).unwrap();
        prop_assert!((kelvin_alpha(n, s, crit.halfspace) - s).abs() < 1e-12);
        prop_assert!(envelope_exponent(n, s, crit.halfspace).abs() < 1e-12);
        if let Some(w) = crit.wholespace {
            prop_assert!(w > crit.halfspace);
            prop_assert!(wholespace_envelope_exponent(n, s, w).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_floats_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let back: f64 = Cell::Float(v).render().parse().unwrap();
        prop_assert_eq!(back.to_bits(), v.to_bits());
    }

    #[test]
    fn config_render_round_trips(s in 0.01..0.99f64, seed in any::<u32>(), p in 1.01..3.0f64) {
        let mut cfg = RunConfig::default();
        cfg.set("problem.s", &s.to_string()).unwrap();
        cfg.set("quad.mc_seed", &seed.to_string()).unwrap();
        cfg.set("p", &p.to_string()).unwrap();
        let mut back = RunConfig::default();
        back.merge_text(&cfg.render()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn c_alpha_is_not_monotone_for_large_s() {
    // c_α first decreases in α when s is close to 1; the increasing range is s ≲ 0.63.
    let cfg = QuadratureConfig::default();
    let s = 0.9;
    let a = c_alpha(0.2 * s, s, &cfg).unwrap().value;
    let b = c_alpha(0.4 * s, s, &cfg).unwrap().value;
    assert!(b < a, "{a} {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn operator_scales_with_dilations(
        r in 0.3..4.0f64,
        s in 0.2..0.8f64,
        x0 in -1.5..1.5f64,
        x1 in 0.2..2.5f64,
        phi in 0.0..std::f64::consts::TAU,
    ) {
        let cfg = QuadratureConfig::default();
        let a = cone_density(phi, 0.4);
        let f = CatalogFunction::bump(vec![0.2, 1.0], 0.3, 0.8).unwrap();
        let x = [x0, x1];
        let base = apply_l(&a, s, &f, &x, &cfg).unwrap();
        let scaled = apply_l(&a, s, &CatalogFunction::rescale(f, r).unwrap(), &[r * x0, r * x1], &cfg).unwrap();
        let k = r.powf(-2.0 * s);
        let budget = scaled.abs_error_estimate + k * base.abs_error_estimate;
        prop_assert!(
            (scaled.value - k * base.value).abs() <= 2.0 * budget + 1e-9 * base.value.abs(),
            "{} vs {}", scaled.value, k * base.value
        );
    }

    #[test]
    fn operator_is_linear(eps in 0.01..100.0f64, x0 in -1.0..1.0f64, x1 in 0.1..2.0f64) {
        let cfg = QuadratureConfig::default();
        let a = cone_density(1.2, 0.5);
        let f = CatalogFunction::bump(vec![0.0, 1.0], 0.25, 0.75).unwrap();
        let base = apply_l(&a, 0.5, &f, &[x0, x1], &cfg).unwrap();
        let scaled = apply_l(&a, 0.5, &CatalogFunction::scalar(eps, f), &[x0, x1], &cfg).unwrap();
        let budget = scaled.abs_error_estimate + eps * base.abs_error_estimate;
        prop_assert!((scaled.value - eps * base.value).abs() <= 2.0 * budget + 1e-12 * eps * base.value.abs());
    }

    #[test]
    fn rays_are_even(theta in unit_vector(), x0 in -1.0..1.0f64, x1 in 0.1..2.0f64, s in 0.1..0.9f64) {
        let cfg = QuadratureConfig::default();
        let f = CatalogFunction::bump(vec![0.0, 1.0], 0.25, 0.75).unwrap();
        let minus: Vec<f64> = theta.iter().map(|v| -v).collect();
        let p = radial_integral(&f, &[x0, x1], &theta, s, &cfg).unwrap();
        let m = radial_integral(&f, &[x0, x1], &minus, s, &cfg).unwrap();
        prop_assert!((p.value - m.value).abs() <= p.abs_error_estimate + m.abs_error_estimate + 1e-12 * p.value.abs());
    }
}
