//! Radial smooth step `S(u)`: 1 for `u ≤ 0`, 0 for `u ≥ 1`, C^∞ in between.
//!
//! `S(u) = ψ(1−u) / (ψ(u) + ψ(1−u))` with `ψ(u) = exp(−1/u)` for `u > 0`.

fn psi(u: f64) -> (f64, f64, f64) {
    if u <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let p = (-1.0 / u).exp();
    let u2 = u * u;
    (p, p / u2, p * (1.0 / (u2 * u2) - 2.0 / (u2 * u)))
}

/// Value and first two derivatives of the step at `u`.
pub(crate) fn step(u: f64) -> (f64, f64, f64) {
    if u <= 0.0 {
        return (1.0, 0.0, 0.0);
    }
    if u >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let (a, a1, a2) = psi(u);
    let (b, b1m, b2) = psi(1.0 - u);
    let b1 = -b1m;
    let d = a + b;
    let d1 = a1 + b1;
    let num = b1 * a - b * a1;
    let num1 = b2 * a - b * a2;
    let v = b / d;
    let v1 = num / (d * d);
    let v2 = num1 / (d * d) - 2.0 * num * d1 / (d * d * d);
    (v, v1, v2)
}

#[cfg(test)]
mod tests {
    use super::step;

    #[test]
    fn plateau_and_support() {
        assert_eq!(step(-0.5).0, 1.0);
        assert_eq!(step(0.0).0, 1.0);
        assert_eq!(step(1.0).0, 0.0);
        assert!((step(0.5).0 - 0.5).abs() < 1e-15);
        for k in 1..100 {
            let v = step(k as f64 / 100.0).0;
            assert!(v > 0.0 && v <= 1.0);
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let h = 1e-6;
        for &u in &[0.1, 0.3, 0.5, 0.77, 0.95] {
            let (_, d1, d2) = step(u);
            let fd1 = (step(u + h).0 - step(u - h).0) / (2.0 * h);
            let fd2 = (step(u + h).1 - step(u - h).1) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-7, "{u}");
            assert!((d2 - fd2).abs() < 1e-6 * (1.0 + d2.abs()), "{u}");
        }
    }
}
