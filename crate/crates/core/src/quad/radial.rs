use super::gk::{integrate_pieces, Piece};
use super::{IntegralResult, QuadratureConfig};
use crate::error::{domain, Error, Result};
use crate::funcat::CatalogFunction;

/// How the correction integrand is treated near `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialMode {
    /// Smooth point: the `O(t²)` leading term is subtracted and integrated exactly.
    Interior,
    /// Point on a kink: the integrand is integrated from 0 as is.
    BoundaryLimit,
}

/// Behaviour of the symmetrized numerator beyond the last break.
#[derive(Debug, Clone, Copy)]
enum Tail {
    /// Constant `value` for `t ≥ from`; integrated analytically.
    Constant { from: f64, value: f64 },
    /// Decays like `t^{2s − delta}`; integrated after `t = L u^{−2/δ}`.
    Mapped { delta: f64 },
}

/// Innermost cut, relative to the Taylor radius.
const INNER_CUT: f64 = 1e-3;

#[allow(clippy::too_many_arguments)]
fn integrate_ray(
    numerator: &dyn Fn(f64) -> f64,
    quad_coeff: Option<f64>,
    rho: f64,
    breaks: Vec<f64>,
    tail: Tail,
    s: f64,
    cfg: &QuadratureConfig,
) -> IntegralResult {
    let two_s = 2.0 * s;
    let t1 = if quad_coeff.is_some() { cfg.t0 * rho } else { 0.0 };
    let mut pts: Vec<f64> = breaks.into_iter().filter(|t| t.is_finite() && *t > t1).collect();
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * *b);
    let last = pts.last().copied().unwrap_or(t1).max(t1);

    let end = match tail {
        Tail::Constant { from, .. } => last.max(from),
        Tail::Mapped { .. } => 2.0 * last.max(1.0),
    };
    let mut grid = vec![t1];
    grid.extend(pts.iter().copied().filter(|t| *t < end));
    grid.push(end);

    let plain = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        numerator(t) * t.powf(-1.0 - two_s)
    };
    let q = quad_coeff.unwrap_or(0.0);
    let subtracted = |t: f64| (numerator(t) - q * t * t) * t.powf(-1.0 - two_s);
    let m = match tail {
        Tail::Mapped { delta } => 2.0 / delta.clamp(1e-3, 2.0),
        Tail::Constant { .. } => 1.0,
    };
    let mapped = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let t = end * u.powf(-m);
        if !t.is_finite() {
            return 0.0;
        }
        let v = m * numerator(t) * t.powf(-two_s) / u;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };

    let mut pieces: Vec<Piece> = Vec::new();
    let mut analytic = 0.0;
    let mut dropped_err = 0.0;
    if quad_coeff.is_some() {
        let cut = INNER_CUT * t1;
        pieces.push(Piece::new(&subtracted, cut, t1));
        analytic += q * t1.powf(2.0 - two_s) / (2.0 - two_s);
        // [0, cut] behaves like c·t^{3−2s}; c is read off at two radii where
        // the O(t⁴) remainder still dominates rounding.
        let quartic = |t: f64| (numerator(t) - q * t * t) / t.powi(4);
        let (c1, c2) = (quartic(10.0 * cut), quartic(20.0 * cut));
        if c1.is_finite() && c2.is_finite() {
            let w = cut.powf(4.0 - two_s) / (4.0 - two_s);
            analytic += c1 * w;
            dropped_err = (c1 - c2).abs() * w + 1e-2 * (c1 * w).abs();
        }
    }
    for w in grid.windows(2) {
        pieces.push(Piece::new(&plain, w[0], w[1]));
    }
    match tail {
        Tail::Constant { value, .. } => analytic += value * end.powf(-two_s) / two_s,
        Tail::Mapped { .. } => pieces.push(Piece::new(&mapped, 0.0, 1.0)),
    }
    let mut r = integrate_pieces(&pieces, cfg.tolerance());
    r.value += analytic;
    r.abs_error_estimate += dropped_err;
    r
}

fn check_inputs(x: &[f64], theta: &[f64], s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("order s = {s} must lie in (0, 1)"));
    }
    if x.len() != theta.len() || x.is_empty() {
        return domain("point and direction dimensions differ");
    }
    let l: f64 = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (l - 1.0).abs() > 1e-9 {
        return domain(format!("direction must be a unit vector, |θ| = {l}"));
    }
    Ok(())
}

fn feature_times(f: &CatalogFunction, x: &[f64], theta: &[f64], s: f64) -> Result<(Vec<f64>, Tail, f64)> {
    let mut breaks = f.kink_times(x, theta);
    breaks.extend(f.singular_times(x, theta));
    let norm_x = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let growth = f.growth(s)?;
    let tail = match f.support_ball() {
        Some((c, r)) => {
            let d: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            Tail::Constant { from: d + r, value: -2.0 * f.eval(x) }
        }
        None => {
            if growth.valid_from > 0.0 {
                breaks.push(norm_x + growth.valid_from);
            }
            Tail::Mapped { delta: growth.delta }
        }
    };
    Ok((breaks, tail, norm_x))
}

/// Ray-based evaluation without the convergence check; used by the operator,
/// which folds the error estimate into its own budget.
pub(crate) fn second_difference_ray(
    f: &CatalogFunction,
    x: &[f64],
    theta: &[f64],
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    second_difference_ray_excised(f, x, theta, s, &[], cfg)
}

/// Positive `t` at which `x ± tθ` crosses the sphere `|y − c| = r`.
fn ball_crossings(x: &[f64], theta: &[f64], c: &[f64], r: f64, out: &mut Vec<f64>) {
    let d: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
    let b: f64 = theta.iter().zip(&d).map(|(t, v)| t * v).sum();
    let cc: f64 = d.iter().map(|v| v * v).sum::<f64>() - r * r;
    let disc = b * b - cc;
    if disc <= 0.0 {
        return;
    }
    let q = disc.sqrt();
    for b in [b, -b] {
        out.extend([-b - q, -b + q].into_iter().filter(|t| *t > 0.0));
    }
}

/// As [`second_difference_ray`] with `f` set to zero inside each ball
/// `(center, radius)`. The balls must not contain `x`.
pub(crate) fn second_difference_ray_excised(
    f: &CatalogFunction,
    x: &[f64],
    theta: &[f64],
    s: f64,
    balls: &[(Vec<f64>, f64)],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    if f.is_constant() {
        return Ok(IntegralResult::exact(0.0));
    }
    if f.is_nonsmooth_at(x) {
        return Err(Error::NonsmoothPoint(format!("{x:?}")));
    }
    let jet = f.jet(x)?;
    let fx = jet.value;
    let th = nalgebra::DVector::from_column_slice(theta);
    let q = (th.transpose() * &jet.hess * &th)[(0, 0)];
    let rho = f.local_scale(x);
    let (mut breaks, tail, _) = feature_times(f, x, theta, s)?;
    for (c, r) in balls {
        ball_crossings(x, theta, c, *r, &mut breaks);
    }
    let n = x.len();
    let outside = |y: &[f64]| balls.iter().all(|(c, r)| y.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() >= r * r);
    let eval = |y: &[f64]| if outside(y) { f.eval(y) } else { 0.0 };
    let numerator = |t: f64| {
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        for i in 0..n {
            a[i] = x[i] + t * theta[i];
            b[i] = x[i] - t * theta[i];
        }
        eval(&a) + eval(&b) - 2.0 * fx
    };
    Ok(integrate_ray(&numerator, Some(q), rho, breaks, tail, s, cfg))
}

/// `∫₀^∞ [f(x+tθ) + f(x−tθ) − 2f(x)] t^{−1−2s} dt`.
///
/// Near the origin, on `[0, t0·ρ]` with `ρ` the distance to the nearest hard
/// kink or singular point (capped at 1), the quadratic Taylor term is
/// subtracted and integrated exactly. The rest is split at kink crossings,
/// singular-point approaches and support exits. Compactly supported
/// functions get an exact constant tail; others are integrated to infinity
/// through the substitution `t = L u^{−2/δ}` dictated by their growth class.
pub fn radial_integral(
    f: &CatalogFunction,
    x: &[f64],
    theta: &[f64],
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    check_inputs(x, theta, s)?;
    second_difference_ray(f, x, theta, s, cfg)?.require_converged()
}

pub(crate) fn correction_ray(
    g: &CatalogFunction,
    h: &CatalogFunction,
    x: &[f64],
    theta: &[f64],
    s: f64,
    mode: RadialMode,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    if g.is_constant() || h.is_constant() {
        return Ok(IntegralResult::exact(0.0));
    }
    let n = x.len();
    let (gx, hx) = (g.eval(x), h.eval(x));
    let quad_coeff = match mode {
        RadialMode::Interior => {
            let (jg, jh) = (g.jet(x)?, h.jet(x)?);
            let dg: f64 = jg.grad.iter().zip(theta).map(|(a, b)| a * b).sum();
            let dh: f64 = jh.grad.iter().zip(theta).map(|(a, b)| a * b).sum();
            Some(2.0 * dg * dh)
        }
        RadialMode::BoundaryLimit => None,
    };
    let rho = g.local_scale(x).min(h.local_scale(x));
    let (mut breaks, tail_g, _) = feature_times(g, x, theta, s)?;
    let (breaks_h, tail_h, _) = feature_times(h, x, theta, s)?;
    breaks.extend(breaks_h);
    let tail = match (tail_g, tail_h) {
        (Tail::Constant { from: a, .. }, Tail::Constant { from: b, .. }) => {
            Tail::Constant { from: a.max(b), value: 2.0 * gx * hx }
        }
        (Tail::Constant { from, .. }, Tail::Mapped { delta }) | (Tail::Mapped { delta }, Tail::Constant { from, .. }) => {
            breaks.push(from);
            Tail::Mapped { delta }
        }
        (Tail::Mapped { delta: a }, Tail::Mapped { delta: b }) => {
            let delta = a + b - 2.0 * s;
            if delta <= 0.0 {
                return domain("correction integrand does not decay");
            }
            Tail::Mapped { delta }
        }
    };
    let numerator = |t: f64| {
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        for i in 0..n {
            a[i] = x[i] + t * theta[i];
            b[i] = x[i] - t * theta[i];
        }
        (g.eval(&a) - gx) * (h.eval(&a) - hx) + (g.eval(&b) - gx) * (h.eval(&b) - hx)
    };
    Ok(integrate_ray(&numerator, quad_coeff, rho, breaks, tail, s, cfg))
}

/// `∫₀^∞ Σ_± [g(x±tθ) − g(x)][h(x±tθ) − h(x)] t^{−1−2s} dt`.
///
/// In [`RadialMode::Interior`] the `2t²(∇g·θ)(∇h·θ)` leading term is
/// subtracted on the inner segment; in [`RadialMode::BoundaryLimit`] the
/// point may sit on a kink of either factor and no derivatives are taken.
pub fn radial_correction(
    g: &CatalogFunction,
    h: &CatalogFunction,
    x: &[f64],
    theta: &[f64],
    s: f64,
    mode: RadialMode,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    check_inputs(x, theta, s)?;
    correction_ray(g, h, x, theta, s, mode, cfg)?.require_converged()
}
