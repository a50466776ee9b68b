use super::gk::{integrate_pieces, Piece};
use super::{IntegralResult, QuadratureConfig};
use crate::error::{domain, Result};

/// `(1+t)^α + (1-t)^α - 2 - α(α-1)t²` for `0 ≤ t ≤ 1/2`, free of cancellation.
fn subtracted_second_difference(alpha: f64, t: f64) -> f64 {
    if t >= 0.25 {
        return (1.0 + t).powf(alpha) + (1.0 - t).powf(alpha) - 2.0 - alpha * (alpha - 1.0) * t * t;
    }
    // 2 Σ_{k≥2} C(α, 2k) t^{2k}
    let t2 = t * t;
    let mut binom = alpha * (alpha - 1.0) / 2.0; // C(α, 2)
    let mut power = t2;
    let mut sum = 0.0;
    let mut n = 2.0;
    for _ in 0..60 {
        binom *= (alpha - n) / (n + 1.0);
        binom *= (alpha - n - 1.0) / (n + 2.0);
        n += 2.0;
        power *= t2;
        let term = binom * power;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    2.0 * sum
}

/// The constant `c_α = ∫₀^∞ [(1+t)₊^α + (1−t)₊^α − 2] t^{−1−2s} dt`.
///
/// The range is split into `[0, 1/2]` (quadratic Taylor term subtracted and
/// integrated exactly), `[1/2, 1]` and `[1, 2]` (the `(1−t)₊^α` kink sits on
/// the split), and `[2, ∞)` mapped by `t = 1/u` after removing the
/// `t^{α−1−2s}` and `−2 t^{−1−2s}` tails analytically.
pub fn c_alpha(alpha: f64, s: f64, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("order s = {s} must lie in (0, 1)"));
    }
    if !(alpha > 0.0 && alpha < 2.0 * s) {
        return domain(format!("exponent alpha = {alpha} must lie in (0, 2s) = (0, {})", 2.0 * s));
    }
    let two_s = 2.0 * s;

    let inner = move |t: f64| {
        if t <= 0.0 {
            0.0
        } else {
            subtracted_second_difference(alpha, t) / t.powf(1.0 + two_s)
        }
    };
    let middle = move |t: f64| ((1.0 + t).powf(alpha) + (1.0 - t).max(0.0).powf(alpha) - 2.0) / t.powf(1.0 + two_s);
    let tail = move |u: f64| {
        if u <= 0.0 {
            0.0
        } else {
            (alpha * u.ln_1p()).exp_m1() * u.powf(two_s - 1.0 - alpha)
        }
    };

    let analytic = alpha * (alpha - 1.0) * 0.5f64.powf(2.0 - two_s) / (2.0 - two_s)
        + 2.0f64.powf(alpha - two_s) / (two_s - alpha)
        - 2.0 * 2.0f64.powf(-two_s) / two_s;

    let pieces = [
        Piece::new(&inner, 0.0, 0.5),
        Piece::new(&middle, 0.5, 1.0),
        Piece::new(&middle, 1.0, 2.0),
        Piece::new(&tail, 0.0, 0.5),
    ];
    let mut r = integrate_pieces(&pieces, cfg.tolerance());
    r.value += analytic;
    if !r.converged {
        r.converged = r.abs_error_estimate <= cfg.tolerance().target(r.value);
    }
    r.require_converged()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_matches_direct_formula() {
        for &a in &[0.1, 0.5, 0.9, 1.4] {
            let t = 0.2499;
            let direct = (1.0f64 + t).powf(a) + (1.0f64 - t).powf(a) - 2.0 - a * (a - 1.0) * t * t;
            let series = subtracted_second_difference(a, t);
            assert!((direct - series).abs() < 1e-15, "{a}: {direct} vs {series}");
        }
    }

    #[test]
    fn rejects_out_of_range_exponents() {
        let cfg = QuadratureConfig::default();
        assert!(c_alpha(1.0, 0.5, &cfg).is_err());
        assert!(c_alpha(0.0, 0.5, &cfg).is_err());
        assert!(c_alpha(0.3, 1.0, &cfg).is_err());
    }

    #[test]
    fn known_values_at_half() {
        // c_{1/4} = −π/4 and c_{3/4} = 3π/4 when s = 1/2.
        let cfg = QuadratureConfig::default();
        let lo = c_alpha(0.25, 0.5, &cfg).unwrap();
        let hi = c_alpha(0.75, 0.5, &cfg).unwrap();
        assert!((lo.value + std::f64::consts::FRAC_PI_4).abs() < 1e-9, "{lo:?}");
        assert!((hi.value - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-9, "{hi:?}");
        assert!(c_alpha(0.5, 0.5, &cfg).unwrap().value.abs() < 1e-9);
    }
}
