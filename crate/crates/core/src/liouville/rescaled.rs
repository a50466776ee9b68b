use std::f64::consts::PI;

use super::envelope_exponent;
use crate::error::{domain, Result};
use crate::funcat::CatalogFunction;
use crate::quad::gauss::{graded_toward_lo, merge_breaks, CompositeRule};

#[derive(Debug, Clone, PartialEq)]
pub struct RescaledConfig {
    /// Gauss points per panel; the error estimate compares against a rule
    /// of roughly half this order.
    pub order: usize,
    /// Panels in `|x|`, halving toward the origin.
    pub radial_panels: usize,
    /// Panels in the polar angle next to each end of `(0, π)`.
    pub angular_end_panels: usize,
    pub angular_mid_panels: usize,
}

impl Default for RescaledConfig {
    fn default() -> Self {
        Self { order: 8, radial_panels: 60, angular_end_panels: 16, angular_mid_panels: 24 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RescaledRow {
    pub r: f64,
    /// `∫ u^p φ_{s,R}`.
    pub lhs: f64,
    pub lhs_err: f64,
    /// `M R^{−2s} ∫ u φ_{s,R}`.
    pub rhs: f64,
    pub rhs_err: f64,
    pub envelope_exponent: f64,
}

impl RescaledRow {
    /// `lhs ≤ rhs` up to the quadrature errors.
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + self.lhs_err + self.rhs_err
    }
}

/// Tensor rule in polar coordinates `(ρ, ω)` about the origin over the
/// upper half-disc of radius `rho_max`; `ρ` is graded toward 0 and `ω`
/// toward both ends, so `x_N^β |x|^{−κ}`-type behaviour is integrated
/// accurately.
fn polar_pairs(rho_max: f64, rc: &RescaledConfig, order: usize) -> Vec<(f64, f64, f64)> {
    let rho = CompositeRule::from_breaks(&graded_toward_lo(0.0, rho_max, 2.0, rc.radial_panels), order);
    let mut b = graded_toward_lo(0.0, 0.25 * PI, 2.0, rc.angular_end_panels);
    b.extend(graded_toward_lo(0.0, 0.25 * PI, 2.0, rc.angular_end_panels).into_iter().map(|w| PI - w));
    b.extend((0..=rc.angular_mid_panels).map(|k| 0.25 * PI + 0.5 * PI * k as f64 / rc.angular_mid_panels as f64));
    let omega = CompositeRule::from_breaks(&merge_breaks(b), order);
    let mut out = Vec::with_capacity(rho.nodes.len() * omega.nodes.len());
    for (r, wr) in rho.nodes.iter().zip(&rho.weights) {
        for (w, ww) in omega.nodes.iter().zip(&omega.weights) {
            out.push((*r, *w, wr * ww * r));
        }
    }
    out
}

fn integrate(n: usize, rho_max: f64, rc: &RescaledConfig, order: usize, f: &dyn Fn(&[f64]) -> (f64, f64)) -> (f64, f64) {
    match n {
        1 => {
            let rule = CompositeRule::from_breaks(&graded_toward_lo(0.0, rho_max, 2.0, rc.radial_panels), order);
            rule.nodes.iter().zip(&rule.weights).fold((0.0, 0.0), |(a, b), (x, w)| {
                let (p, q) = f(&[*x]);
                (a + w * p, b + w * q)
            })
        }
        _ => polar_pairs(rho_max, rc, order).iter().fold((0.0, 0.0), |(a, b), &(r, om, w)| {
            let (p, q) = f(&[r * om.cos(), r * om.sin()]);
            (a + w * p, b + w * q)
        }),
    }
}

/// Tests `∫ u^p φ_{s,R} ≤ M R^{−2s} ∫ u φ_{s,R}` for each `R`, where
/// `φ_{s,R}(x) = φ_s(x/R)` and `φ_s = (x_N)₊^s Bump((1−γ₀)e_N, 1−γ₀/2, 1)`.
/// Supported for `N ∈ {1, 2}`.
#[allow(clippy::too_many_arguments)]
pub fn rescaled_inequality_experiment(
    n: usize,
    s: f64,
    p: f64,
    u: &CatalogFunction,
    m: f64,
    gamma0: f64,
    radii: &[f64],
    rc: &RescaledConfig,
) -> Result<Vec<RescaledRow>> {
    if !(n == 1 || n == 2) {
        return domain("the rescaled experiment is implemented for N = 1 and N = 2");
    }
    if !(s > 0.0 && s < 1.0) || !(p > 1.0) || !m.is_finite() {
        return domain("need 0 < s < 1, p > 1 and a finite M");
    }
    if !(gamma0 > 0.0 && gamma0 < 1.0) {
        return domain(format!("γ₀ = {gamma0} must lie in (0, 1)"));
    }
    if !u.vanishes_below() {
        return domain("u must vanish on the closed lower half-space");
    }
    if rc.order < 4 || rc.radial_panels == 0 {
        return domain("rescaled quadrature needs order ≥ 4 and at least one radial panel");
    }
    let mut center = vec![0.0; n];
    center[n - 1] = 1.0 - gamma0;
    let phi_s = CatalogFunction::product(
        CatalogFunction::half_space_power(s)?,
        CatalogFunction::bump(center, 1.0 - 0.5 * gamma0, 1.0)?,
    );
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0 && r.is_finite()) {
            return domain(format!("radius R = {r} must be positive"));
        }
        let integrand = |x: &[f64]| {
            let y: Vec<f64> = x.iter().map(|v| v / r).collect();
            let w = phi_s.eval(&y);
            if w == 0.0 {
                return (0.0, 0.0);
            }
            let ux = u.eval(x);
            (ux.max(0.0).powf(p) * w, ux * w)
        };
        let rho_max = (2.0 - gamma0) * r;
        let (a, b) = integrate(n, rho_max, rc, rc.order, &integrand);
        let (a2, b2) = integrate(n, rho_max, rc, rc.order / 2 + 1, &integrand);
        let scale = m * r.powf(-2.0 * s);
        rows.push(RescaledRow {
            r,
            lhs: a,
            lhs_err: (a - a2).abs(),
            rhs: scale * b,
            rhs_err: (scale * (b - b2)).abs(),
            envelope_exponent: envelope_exponent(n, s, p),
        });
    }
    Ok(rows)
}
