//! Liouville-type experiments for `−Lu ≥ u^p`: critical exponents, explicit
//! supersolutions above them, pointwise certification, the cone-geometry
//! and Step-1 bounds behind nonexistence, and the sharpness scan.

mod certify;
mod gamma;
mod rescaled;
mod scan;
mod stepone;

pub use certify::{certify, CertificationReport, CertifyTolerance, PointMargin, Sampler};
pub use gamma::{gamma_search, GammaProbe, GammaSearchConfig, GammaSearchResult};
pub use rescaled::{rescaled_inequality_experiment, RescaledConfig, RescaledRow};
pub use scan::{liouville_scan, ScanConfig, ScanMode, ScanRow};
pub use stepone::{step_one_m, AuditPoint, RegionSup, StepOneConfig, StepOneReport, StepOneRegion};

use crate::error::{domain, Error, Result};
use crate::funcat::CatalogFunction;
use crate::quad::{c_alpha, QuadratureConfig};
use crate::spectral::{weighted_sphere_moment, SpectralDensity};

/// Thresholds at and below which nonnegative supersolutions must vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalExponents {
    pub halfspace: f64,
    /// `None` when every `p ≥ 1` is subcritical (`N ≤ 2s`).
    pub wholespace: Option<f64>,
}

fn check_ns(n: usize, s: f64) -> Result<()> {
    if n == 0 {
        return domain("dimension must be at least 1");
    }
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("order s = {s} must lie in (0, 1)"));
    }
    Ok(())
}

pub fn critical_exponents(n: usize, s: f64) -> Result<CriticalExponents> {
    check_ns(n, s)?;
    let nf = n as f64;
    let wholespace = if nf > 2.0 * s { Some(nf / (nf - 2.0 * s)) } else { None };
    Ok(CriticalExponents { halfspace: (nf + s) / (nf - s), wholespace })
}

/// `α = (N − (N−2s)p)/(p−1)`, the Kelvin exponent balancing `−Lu` against `u^p`.
pub fn kelvin_alpha(n: usize, s: f64, p: f64) -> f64 {
    let nf = n as f64;
    (nf - (nf - 2.0 * s) * p) / (p - 1.0)
}

/// `N + s − 2sp/(p−1)`, the growth rate of the rescaled test integral.
pub fn envelope_exponent(n: usize, s: f64, p: f64) -> f64 {
    n as f64 + s - 2.0 * s * p / (p - 1.0)
}

/// `N − 2sp/(p−1)`, the whole-space counterpart of [`envelope_exponent`].
pub fn wholespace_envelope_exponent(n: usize, s: f64, p: f64) -> f64 {
    n as f64 - 2.0 * s * p / (p - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Kelvin,
    TranslateTruncate,
    OneDLowS,
    OneDHighS,
    Degenerate,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Kelvin => "kelvin",
            Regime::TranslateTruncate => "translate_truncate",
            Regime::OneDLowS => "oneD_low_s",
            Regime::OneDHighS => "oneD_high_s",
            Regime::Degenerate => "degenerate",
        }
    }
}

/// An explicit positive supersolution `ε·w̄_α` (possibly translated and
/// truncated) with the constants that make it work.
#[derive(Debug, Clone)]
pub struct LiouvilleConstruction {
    pub n: usize,
    pub s: f64,
    pub p: f64,
    pub regime: Regime,
    pub alpha: f64,
    pub c_alpha: f64,
    pub c_alpha_err: f64,
    pub eps_max: f64,
    pub eps_max_err: f64,
    pub eps: f64,
    pub function: CatalogFunction,
}

fn regime_and_alpha(n: usize, s: f64, p: f64) -> Result<(Regime, f64)> {
    let crit = critical_exponents(n, s)?;
    if !(p.is_finite() && p > crit.halfspace * (1.0 + 1e-12)) {
        return Err(Error::DegenerateConstruction(format!(
            "p = {p} is not above the half-space threshold {}; α = s gives C_α = 0 and ε_max = 0",
            crit.halfspace
        )));
    }
    let kelvin_range = crit.wholespace.is_none_or(|w| p < w);
    let regime = match (n, kelvin_range) {
        (1, _) if s >= 0.5 => Regime::OneDHighS,
        (1, true) => Regime::OneDLowS,
        (_, true) => Regime::Kelvin,
        (_, false) => Regime::TranslateTruncate,
    };
    let alpha = match regime {
        Regime::TranslateTruncate => 0.5 * s,
        _ => kelvin_alpha(n, s, p),
    };
    if !(alpha > 0.0 && alpha < s) {
        return Err(Error::DegenerateConstruction(format!("α = {alpha} falls outside (0, {s})")));
    }
    Ok((regime, alpha))
}

/// `C_α = c_α · ∫|θ_N|^{2s} a dθ` with its propagated error.
pub(crate) fn big_c_alpha(a: &SpectralDensity, s: f64, alpha: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let c = c_alpha(alpha, s, cfg)?;
    let m = weighted_sphere_moment(a, s, cfg)?;
    Ok((c.value * m.value, c.value.abs() * m.abs_error_estimate + m.value.abs() * c.abs_error_estimate))
}

/// Builds the supersolution for `(−Δ)^s`-type `L` (density `a ≡ 1`).
///
/// `eps` defaults to `ε_max/2`; an explicit value must lie in `(0, ε_max]`.
pub fn construct_supersolution(n: usize, s: f64, p: f64, eps: Option<f64>, cfg: &QuadratureConfig) -> Result<LiouvilleConstruction> {
    check_ns(n, s)?;
    let a = SpectralDensity::constant(n, 1.0)?;
    construct_for_density(&a, s, p, eps, cfg)
}

/// As [`construct_supersolution`] for a constant density of any level.
pub(crate) fn construct_for_density(
    a: &SpectralDensity,
    s: f64,
    p: f64,
    eps: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<LiouvilleConstruction> {
    if !a.is_constant() {
        return domain("explicit supersolutions are only built for constant densities");
    }
    a.require_nondegenerate()?;
    let n = a.dim();
    let (regime, alpha) = regime_and_alpha(n, s, p)?;
    let (c, c_err) = big_c_alpha(a, s, alpha, cfg)?;
    if !(c < 0.0) || c_err >= -c {
        return Err(Error::DegenerateConstruction(format!("C_α = {c:e} ± {c_err:e} is not certifiably negative")));
    }
    let eps_max = (-c).powf(1.0 / (p - 1.0));
    let eps_max_err = eps_max / (p - 1.0) * c_err / -c;
    let eps = match eps {
        None => 0.5 * eps_max,
        Some(e) if e > 0.0 && e <= eps_max => e,
        Some(e) => return domain(format!("ε = {e} must lie in (0, ε_max = {eps_max}]")),
    };
    let base = CatalogFunction::scalar(eps, CatalogFunction::kelvin(alpha, n, s)?);
    let function = match regime {
        Regime::TranslateTruncate => CatalogFunction::translate_truncate(base),
        _ => base,
    };
    Ok(LiouvilleConstruction { n, s, p, regime, alpha, c_alpha: c, c_alpha_err: c_err, eps_max, eps_max_err, eps, function })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        let c = critical_exponents(2, 0.5).unwrap();
        assert!((c.halfspace - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.wholespace, Some(2.0));
        let c = critical_exponents(1, 0.25).unwrap();
        assert!((c.halfspace - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.wholespace, Some(2.0));
        assert_eq!(critical_exponents(1, 0.75).unwrap().wholespace, None);
        assert!(critical_exponents(0, 0.5).is_err());
    }

    #[test]
    fn regimes() {
        let cfg = QuadratureConfig::default();
        let c = construct_supersolution(2, 0.5, 1.8, None, &cfg).unwrap();
        assert_eq!(c.regime, Regime::Kelvin);
        assert!((c.alpha - 0.25).abs() < 1e-14);
        assert!((c.eps - 0.5 * c.eps_max).abs() < 1e-15);
        let c = construct_supersolution(2, 0.5, 2.3, None, &cfg).unwrap();
        assert_eq!(c.regime, Regime::TranslateTruncate);
        assert_eq!(c.alpha, 0.25);
        let c = construct_supersolution(1, 0.75, 8.0, None, &cfg).unwrap();
        assert_eq!(c.regime, Regime::OneDHighS);
        assert!((c.alpha - 5.0 / 7.0).abs() < 1e-14);
        let c = construct_supersolution(1, 0.25, 1.8, None, &cfg).unwrap();
        assert_eq!(c.regime, Regime::OneDLowS);
        let c = construct_supersolution(1, 0.25, 3.0, None, &cfg).unwrap();
        assert_eq!(c.regime, Regime::TranslateTruncate);
    }

    #[test]
    fn threshold_is_degenerate() {
        let cfg = QuadratureConfig::default();
        let r = construct_supersolution(2, 0.5, 5.0 / 3.0, None, &cfg);
        assert!(matches!(r, Err(Error::DegenerateConstruction(_))));
        assert!(construct_supersolution(2, 0.5, 1.5, None, &cfg).is_err());
    }

    #[test]
    fn eps_bounds() {
        let cfg = QuadratureConfig::default();
        let c = construct_supersolution(2, 0.5, 1.8, None, &cfg).unwrap();
        // a ≡ 1 in the plane: C_{1/4} = −π, ε_max = π^{1.25}.
        assert!((c.c_alpha + std::f64::consts::PI).abs() < 1e-8);
        assert!((c.eps_max - std::f64::consts::PI.powf(1.25)).abs() < 1e-7);
        assert!(construct_supersolution(2, 0.5, 1.8, Some(2.0 * c.eps_max), &cfg).is_err());
        assert!(construct_supersolution(2, 0.5, 1.8, Some(c.eps_max), &cfg).is_ok());
    }
}
