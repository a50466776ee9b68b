//! Evaluation of `Lu(x) = ∫_{S^{N−1}} a(θ) ∫₀^∞ [u(x+tθ) + u(x−tθ) − 2u(x)] t^{−1−2s} dt dθ`.


use crate::error::{domain, Error, Result};
use crate::funcat::{CatalogFunction, KinkSurface};
use crate::quad::gauss::{geometric_outward, graded_toward_lo, merge_breaks, CompositeRule};
use crate::quad::gk::{integrate_pieces_aux, AuxPiece};
use crate::quad::radial::{correction_ray, second_difference_ray_excised};
use crate::quad::{c_alpha, sphere_area, IntegralResult, sphere_quadrature_with_errors, QuadratureConfig, RadialMode, SphereBreaks};
use crate::spectral::{weighted_sphere_moment, SpectralDensity};

/// Generic evaluation is refused closer than this to `{x_N = 0}` (relative to `|x|` for
/// homogeneous functions) when the function kinks there.
pub const BOUNDARY_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluationPath {
    ClosedForm,
    Numeric,
}

impl EvaluationPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvaluationPath::ClosedForm => "closed_form",
            EvaluationPath::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorEvaluation {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub path: EvaluationPath,
    pub x: Vec<f64>,
}

fn check_order(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("order s = {s} must lie in (0, 1)"));
    }
    Ok(())
}

fn check_point(a: &SpectralDensity, x: &[f64]) -> Result<()> {
    if x.len() != a.dim() {
        return domain(format!("point has dimension {}, density has {}", x.len(), a.dim()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return domain("point has non-finite coordinates");
    }
    Ok(())
}

/// Closed form `c_α · I_a · x_N^{α−2s}` for `(x_N)₊^α`.
pub fn apply_l_halfspace_power(
    a: &SpectralDensity,
    s: f64,
    alpha: f64,
    x: &[f64],
    cfg: &QuadratureConfig,
) -> Result<OperatorEvaluation> {
    check_order(s)?;
    check_point(a, x)?;
    let xn = x[x.len() - 1];
    if !(xn > 0.0) {
        return domain(format!("closed form needs x_N > 0, got {xn}"));
    }
    let c = c_alpha(alpha, s, &cfg.tightened(0.1))?;
    let m = weighted_sphere_moment(a, s, &cfg.tightened(0.1))?;
    let scale = xn.powf(alpha - 2.0 * s);
    Ok(OperatorEvaluation {
        value: c.value * m.value * scale,
        abs_error_estimate: (c.value.abs() * m.abs_error_estimate + m.value.abs() * c.abs_error_estimate) * scale,
        path: EvaluationPath::ClosedForm,
        x: x.to_vec(),
    })
}

/// `Lf(x)`, through the closed form when `f` is a (multiple of a) half-space power.
pub fn apply_l(
    a: &SpectralDensity,
    s: f64,
    f: &CatalogFunction,
    x: &[f64],
    cfg: &QuadratureConfig,
) -> Result<OperatorEvaluation> {
    check_order(s)?;
    check_point(a, x)?;
    a.require_nondegenerate()?;
    f.growth(s)?;
    match f {
        CatalogFunction::HalfSpacePower { alpha } if x[x.len() - 1] > 0.0 => {
            apply_l_halfspace_power(a, s, *alpha, x, cfg)
        }
        CatalogFunction::ScalarMultiple(eps, inner) if matches!(inner.as_ref(), CatalogFunction::HalfSpacePower { .. }) => {
            let mut r = apply_l(a, s, inner, x, cfg)?;
            r.value *= eps;
            r.abs_error_estimate *= eps.abs();
            Ok(r)
        }
        _ => apply_l_numeric(a, s, f, x, cfg),
    }
}

fn tangent_breaks(mut b: SphereBreaks, f: &CatalogFunction, x: &[f64]) -> SphereBreaks {
    if x.len() != 2 {
        return b;
    }
    for k in f.kink_surfaces() {
        match k {
            KinkSurface::Plane { .. } => b = b.perpendicular_to(&[0.0, 1.0]),
            KinkSurface::Sphere { center, radius, .. } => {
                let d = [center[0] - x[0], center[1] - x[1]];
                let dist = (d[0] * d[0] + d[1] * d[1]).sqrt();
                if dist > radius {
                    let phi = d[1].atan2(d[0]);
                    let half = (radius / dist).asin();
                    b = b.angle(phi + half).angle(phi - half);
                }
            }
        }
    }
    for p in f.singular_points(2) {
        b = b.singular_along(&[p[0] - x[0], p[1] - x[1]]);
    }
    b
}

/// Balls around the singular points of `f`, excised from the ray integrals
/// in two or more dimensions. Each starts beyond the Taylor radius at `x`.
fn excision_balls(f: &CatalogFunction, x: &[f64], cfg: &QuadratureConfig) -> Vec<(Vec<f64>, f64)> {
    if x.len() < 2 {
        return Vec::new();
    }
    let pts = f.singular_points(x.len());
    pts.iter()
        .enumerate()
        .map(|(i, p)| {
            let mut d = dist(x, p);
            for (j, q) in pts.iter().enumerate() {
                if j != i {
                    d = d.min(dist(p, q));
                }
            }
            (p.clone(), d * (0.5 * (1.0 - cfg.t0)).clamp(0.1, 0.5))
        })
        .collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

fn ball_tangents(b: SphereBreaks, x: &[f64], c: &[f64], r: f64) -> SphereBreaks {
    if x.len() != 2 {
        return b;
    }
    let d = [c[0] - x[0], c[1] - x[1]];
    let phi = d[1].atan2(d[0]);
    let half = (r / (d[0] * d[0] + d[1] * d[1]).sqrt()).asin();
    b.angle(phi + half).angle(phi - half)
}

/// `2∫_{B_ρ(p)} f(y) a(ŷ−x) |y − x|^{−N−2s} dy` for `x` outside the ball, in
/// polar coordinates about `p`. For `f` homogeneous about `p = 0` the radius
/// is substituted so that `r^{d+N−1} dr` becomes a constant.
fn near_field(
    a: &SpectralDensity,
    s: f64,
    f: &CatalogFunction,
    x: &[f64],
    p: &[f64],
    rho: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    let n = x.len();
    let nf = n as f64;
    let unit = SpectralDensity::constant(n, 1.0)?;
    let power = match f.homogeneity_degree() {
        Some(d) if p.iter().all(|c| *c == 0.0) && d + nf > 0.0 => 1.0 / (d + nf),
        _ => 4.0,
    };
    let mut breaks = SphereBreaks::default();
    for k in f.kink_surfaces() {
        if let KinkSurface::Plane { level, .. } = k {
            if level == p[n - 1] {
                let mut e = vec![0.0; n];
                e[n - 1] = 1.0;
                breaks = breaks.perpendicular_to(&e);
            }
        }
    }
    let kernel = |y: &[f64]| {
        let d: Vec<f64> = y.iter().zip(x).map(|(u, v)| u - v).collect();
        let r = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dir: Vec<f64> = d.iter().map(|v| v / r).collect();
        2.0 * a.eval_unchecked(&dir) * r.powf(-nf - 2.0 * s)
    };
    let failure = std::cell::RefCell::new(None);
    let shell = |v: f64| -> (f64, f64) {
        if v <= 0.0 {
            return (0.0, 0.0);
        }
        let r = rho * v.powf(power);
        let jac = rho * power * v.powf(power - 1.0) * r.powi(n as i32 - 1);
        let h = |w: &[f64]| -> Result<(f64, f64)> {
            let y1: Vec<f64> = p.iter().zip(w).map(|(c, u)| c + r * u).collect();
            let y2: Vec<f64> = p.iter().zip(w).map(|(c, u)| c - r * u).collect();
            Ok((0.5 * (f.eval(&y1) * kernel(&y1) + f.eval(&y2) * kernel(&y2)), 0.0))
        };
        match sphere_quadrature_with_errors(&h, &unit, &breaks, cfg) {
            Ok(q) => (q.value * jac, q.abs_error_estimate * jac.abs()),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                (f64::NAN, 0.0)
            }
        }
    };
    let (mut r, inner) = integrate_pieces_aux(&[AuxPiece { f: &shell, a: 0.0, b: 1.0 }], cfg.tolerance());
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    r.abs_error_estimate += inner;
    r.require_converged()
}

/// Reduces a homogeneous evaluation to the unit sphere: returns the point to
/// evaluate at and the factor to multiply the result by.
fn homogeneous_reduction(f: &CatalogFunction, s: f64, x: &[f64]) -> (Vec<f64>, f64) {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    match f.homogeneity_degree() {
        Some(d) if r > 0.0 && r.is_finite() && (r - 1.0).abs() > 1e-15 => {
            (x.iter().map(|v| v / r).collect(), r.powf(d - 2.0 * s))
        }
        _ => (x.to_vec(), 1.0),
    }
}

fn refuse_near_boundary(f: &CatalogFunction, x: &[f64]) -> Result<()> {
    if f.has_boundary_kink() && x[x.len() - 1].abs() < BOUNDARY_GUARD {
        return Err(Error::NonsmoothPoint(format!(
            "{x:?} is within {BOUNDARY_GUARD:e} of the boundary kink; use the closed form"
        )));
    }
    if f.is_nonsmooth_at(x) {
        return Err(Error::NonsmoothPoint(format!("{x:?}")));
    }
    Ok(())
}

/// `Lf(x)` by polar quadrature, whatever the function kind.
pub fn apply_l_numeric(
    a: &SpectralDensity,
    s: f64,
    f: &CatalogFunction,
    x: &[f64],
    cfg: &QuadratureConfig,
) -> Result<OperatorEvaluation> {
    check_order(s)?;
    check_point(a, x)?;
    a.require_nondegenerate()?;
    f.growth(s)?;
    if f.is_constant() {
        return Ok(OperatorEvaluation { value: 0.0, abs_error_estimate: 0.0, path: EvaluationPath::Numeric, x: x.to_vec() });
    }
    let (y, factor) = homogeneous_reduction(f, s, x);
    refuse_near_boundary(f, &y)?;
    let radial_cfg = cfg.tightened(0.1);
    let balls = excision_balls(f, &y, cfg);
    let g = |theta: &[f64]| {
        let r = second_difference_ray_excised(f, &y, theta, s, &balls, &radial_cfg)?;
        Ok((r.value, r.abs_error_estimate))
    };
    let mut breaks = tangent_breaks(SphereBreaks::default(), f, &y);
    if !balls.is_empty() {
        breaks.singular.clear();
    }
    for (c, r) in &balls {
        breaks = ball_tangents(breaks, &y, c, *r);
    }
    let mut r = sphere_quadrature_with_errors(&g, a, &breaks, cfg)?;
    for (c, rho) in &balls {
        let nf = near_field(a, s, f, &y, c, *rho, cfg)?;
        r.value += nf.value;
        r.abs_error_estimate += nf.abs_error_estimate;
    }
    Ok(OperatorEvaluation {
        value: factor * r.value,
        abs_error_estimate: factor.abs() * r.abs_error_estimate,
        path: EvaluationPath::Numeric,
        x: x.to_vec(),
    })
}

fn correction_impl(
    a: &SpectralDensity,
    s: f64,
    g: &CatalogFunction,
    h: &CatalogFunction,
    x: &[f64],
    mode: RadialMode,
    cfg: &QuadratureConfig,
) -> Result<OperatorEvaluation> {
    check_order(s)?;
    check_point(a, x)?;
    a.require_nondegenerate()?;
    g.growth(s)?;
    h.growth(s)?;
    if g.is_constant() || h.is_constant() {
        return Ok(OperatorEvaluation { value: 0.0, abs_error_estimate: 0.0, path: EvaluationPath::Numeric, x: x.to_vec() });
    }
    // The product of two differences is O(t²) at the origin, so close to a
    // kink the plain integral is used instead of refusing.
    let near_kink = [g, h].iter().any(|f| f.has_boundary_kink() && x[x.len() - 1].abs() < BOUNDARY_GUARD);
    let mode = if near_kink { RadialMode::BoundaryLimit } else { mode };
    if mode == RadialMode::Interior {
        refuse_near_boundary(g, x)?;
        refuse_near_boundary(h, x)?;
    }
    let radial_cfg = cfg.tightened(0.1);
    let integrand = |theta: &[f64]| {
        let r = correction_ray(g, h, x, theta, s, mode, &radial_cfg)?;
        Ok((r.value, r.abs_error_estimate))
    };
    let breaks = tangent_breaks(tangent_breaks(SphereBreaks::default(), g, x), h, x);
    let r = sphere_quadrature_with_errors(&integrand, a, &breaks, cfg)?;
    Ok(OperatorEvaluation {
        value: r.value,
        abs_error_estimate: r.abs_error_estimate,
        path: EvaluationPath::Numeric,
        x: x.to_vec(),
    })
}

/// The bilinear remainder `l[g,h](x)` in `L(gh) = g·Lh + h·Lg + l[g,h]`.
pub fn correction_l(
    a: &SpectralDensity,
    s: f64,
    g: &CatalogFunction,
    h: &CatalogFunction,
    x: &[f64],
    cfg: &QuadratureConfig,
) -> Result<OperatorEvaluation> {
    correction_impl(a, s, g, h, x, RadialMode::Interior, cfg)
}

/// `l[g,h]` at a point where `g` or `h` kinks, by the same integral without
/// Taylor subtraction. Finite when the kink is mild enough (for example
/// `g = (x_N)₊^α` with `α > 2s − 1`).
pub fn correction_l_boundary(
    a: &SpectralDensity,
    s: f64,
    g: &CatalogFunction,
    h: &CatalogFunction,
    x: &[f64],
    cfg: &QuadratureConfig,
) -> Result<OperatorEvaluation> {
    correction_impl(a, s, g, h, x, RadialMode::BoundaryLimit, cfg)
}

/// Quadrature layout and truncation budget for [`pairing`].
#[derive(Debug, Clone, PartialEq)]
pub struct PairingConfig {
    /// Gauss points per panel and direction.
    pub order: usize,
    /// Geometric ratio of the panels graded toward `{x_N = 0}`.
    pub grading_ratio: f64,
    pub min_graded_panels: usize,
    /// Panels across the support box of `v`, per direction.
    pub support_panels: usize,
    /// Absolute bound on the discarded far-field part of `∫u·Lv`.
    pub truncation_tol: f64,
    /// Largest admissible box half-width.
    pub max_box: f64,
}

impl Default for PairingConfig {
    fn default() -> Self {
        Self {
            order: 6,
            grading_ratio: 1.5,
            min_graded_panels: 12,
            support_panels: 8,
            truncation_tol: 1e-5,
            max_box: 1e8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingResult {
    /// `∫ u·Lv`.
    pub i_uv: f64,
    /// `∫ v·Lu`.
    pub i_vu: f64,
    pub residual: f64,
    /// Half-width of the box used for `∫ u·Lv`.
    pub box_half_width: f64,
    /// Bound on the discarded far field.
    pub truncation_bound: f64,
    /// Summed operator error estimates weighted by the quadrature.
    pub quadrature_error: f64,
}

fn exponent_of_power_factor(f: &CatalogFunction) -> Option<f64> {
    match f {
        CatalogFunction::HalfSpacePower { alpha } => Some(*alpha),
        CatalogFunction::Product(p, q) => exponent_of_power_factor(p).or_else(|| exponent_of_power_factor(q)),
        CatalogFunction::ScalarMultiple(_, p) => exponent_of_power_factor(p),
        _ => None,
    }
}

fn is_even_in_first_coordinate(f: &CatalogFunction) -> bool {
    match f {
        CatalogFunction::Bump { center, .. } => center[0] == 0.0,
        CatalogFunction::Product(p, q) => is_even_in_first_coordinate(p) && is_even_in_first_coordinate(q),
        CatalogFunction::Rescale(p, _) | CatalogFunction::TranslateTruncate(p) | CatalogFunction::ScalarMultiple(_, p) => {
            is_even_in_first_coordinate(p)
        }
        _ => true,
    }
}

/// Tensor rule over a box, with the last direction graded toward `x_N = 0`
/// when the box touches it.
fn tensor_sum(rules: &[CompositeRule], f: &mut dyn FnMut(&[f64]) -> Result<f64>) -> Result<f64> {
    let n = rules.len();
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for d in 0..n {
            x[d] = rules[d].nodes[idx[d]];
            w *= rules[d].weights[idx[d]];
        }
        total += w * f(&x)?;
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < rules[d].nodes.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == n {
                return Ok(total);
            }
        }
    }
}

fn support_rule(lo: f64, hi: f64, pc: &PairingConfig, grade_low: bool) -> CompositeRule {
    let breaks = if grade_low {
        let mut b = graded_toward_lo(lo, lo + 0.5 * (hi - lo), pc.grading_ratio, pc.min_graded_panels);
        b.extend((1..=pc.support_panels / 2).map(|k| lo + 0.5 * (hi - lo) * (1.0 + k as f64 / (pc.support_panels / 2) as f64)));
        merge_breaks(b)
    } else {
        (0..=pc.support_panels).map(|k| lo + (hi - lo) * k as f64 / pc.support_panels as f64).collect()
    };
    CompositeRule::from_breaks(&breaks, pc.order)
}

/// Checks `∫ u·Lv = ∫ v·Lu` on a truncated box.
///
/// `v` must be compactly supported and contain a factor `(x_N)₊^α` with
/// `(2s−1)₊ < α < 2s`; `u` must vanish on `{x_N ≤ 0}` and either be compactly
/// supported or carry a power-law decay bound, from which the box size is
/// chosen so the discarded far field stays below `truncation_tol`.
pub fn pairing(
    a: &SpectralDensity,
    s: f64,
    u: &CatalogFunction,
    v: &CatalogFunction,
    pc: &PairingConfig,
    cfg: &QuadratureConfig,
) -> Result<PairingResult> {
    check_order(s)?;
    a.require_nondegenerate()?;
    let n = a.dim();
    u.growth(s)?;
    v.growth(s)?;
    let (vc, vr) = v.support_ball().ok_or_else(|| Error::InputDomain("v must be compactly supported".into()))?;
    if let Some(alpha) = exponent_of_power_factor(v) {
        if !(alpha > (2.0 * s - 1.0).max(0.0) && alpha < 2.0 * s) {
            return domain(format!("v's boundary exponent {alpha} must lie in ((2s−1)₊, 2s)"));
        }
    }
    if !u.vanishes_below() {
        return domain("u must vanish on the closed lower half-space");
    }
    let symmetric = n == 2 && is_even_in_first_coordinate(u) && is_even_in_first_coordinate(v) && vc[0] == 0.0;

    // ∫ v·Lu over the support box of v.
    let v_rules: Vec<CompositeRule> = (0..n)
        .map(|d| {
            let lo = if d == n - 1 { (vc[d] - vr).max(0.0) } else if symmetric { 0.0 } else { vc[d] - vr };
            let hi = vc[d] + vr;
            support_rule(lo, hi, pc, d == n - 1 && lo == 0.0)
        })
        .collect();
    let sym_factor = if symmetric { 2.0 } else { 1.0 };
    let mut err_vu = 0.0;
    let i_vu = sym_factor
        * tensor_sum(&v_rules, &mut |x| {
            let vx = v.eval(x);
            if vx == 0.0 {
                return Ok(0.0);
            }
            let r = apply_l(a, s, u, x, cfg)?;
            err_vu += vx.abs() * r.abs_error_estimate;
            Ok(vx * r.value)
        })?;
    let v_l1 = sym_factor * tensor_sum(&v_rules, &mut |x| Ok(v.eval(x).abs()))?;

    // ∫ u·Lv over the support of u, or a box sized by the decay bound.
    let reach_v = vc.iter().map(|c| c * c).sum::<f64>().sqrt() + vr;
    let (lo, hi, truncation_bound): (Vec<f64>, Vec<f64>, f64) = match u.support_ball() {
        Some((uc, ur)) => (
            uc.iter().enumerate().map(|(d, c)| if d == n - 1 { (c - ur).max(0.0) } else { c - ur }).collect(),
            uc.iter().map(|c| c + ur).collect(),
            0.0,
        ),
        None => {
            let decay = u.decay().ok_or_else(|| {
                Error::TruncationUnattainable("u is neither compactly supported nor known to decay".into())
            })?;
            let kernel_bound = 2.0 * a.upper_bound() * v_l1;
            let exp = decay.exponent + 2.0 * s;
            let c = decay.coefficient * kernel_bound * 2f64.powf(n as f64 + 2.0 * s) * 0.5 * sphere_area(n) / exp;
            let lb = (c / pc.truncation_tol).powf(1.0 / exp).max(2.0 * reach_v).max(1.0);
            if !lb.is_finite() || lb > pc.max_box {
                return Err(Error::TruncationUnattainable(format!("box half-width {lb:e} exceeds {:e}", pc.max_box)));
            }
            let bound = c * lb.powf(-exp);
            let mut lo = vec![-lb; n];
            lo[n - 1] = 0.0;
            (lo, vec![lb; n], bound)
        }
    };
    let u_rules: Vec<CompositeRule> = (0..n)
        .map(|d| {
            let (l, h) = (lo[d], hi[d]);
            let (sl, sh) = (vc[d] - vr, vc[d] + vr);
            let mut b = vec![l, h];
            if d == n - 1 && l == 0.0 {
                b.extend(graded_toward_lo(0.0, (0.5 * (h - l)).min(sl.max(0.5)), pc.grading_ratio, pc.min_graded_panels));
            }
            let (il, ih) = (sl.max(l), sh.min(h));
            if ih > il {
                b.extend((0..=pc.support_panels).map(|k| il + (ih - il) * k as f64 / pc.support_panels as f64));
                let h0 = (ih - il) / pc.support_panels as f64;
                if h > ih {
                    b.extend(geometric_outward(ih, h, h0, 1.6));
                }
                if il > l {
                    b.extend(geometric_outward(-il, -l, h0, 1.6).into_iter().map(|p| -p));
                }
            }
            let mut b = merge_breaks(b.into_iter().filter(|p| *p >= l && *p <= h).collect());
            if symmetric && d == 0 {
                b.retain(|p| *p >= 0.0);
                if b.first() != Some(&0.0) {
                    b.insert(0, 0.0);
                }
            }
            CompositeRule::from_breaks(&b, pc.order)
        })
        .collect();
    let mut err_uv = 0.0;
    let i_uv = sym_factor
        * tensor_sum(&u_rules, &mut |x| {
            let ux = u.eval(x);
            if ux == 0.0 {
                return Ok(0.0);
            }
            let r = apply_l(a, s, v, x, cfg)?;
            err_uv += ux.abs() * r.abs_error_estimate;
            Ok(ux * r.value)
        })?;
    Ok(PairingResult {
        i_uv,
        i_vu,
        residual: (i_uv - i_vu).abs(),
        box_half_width: hi.iter().chain(lo.iter()).fold(0.0f64, |m, v| m.max(v.abs())),
        truncation_bound,
        quadrature_error: err_uv + err_vu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> SpectralDensity {
        SpectralDensity::constant(n, 1.0).unwrap()
    }

    #[test]
    fn constant_function() {
        let cfg = QuadratureConfig::default();
        let r = apply_l(&unit(2), 0.5, &CatalogFunction::Constant(5.0), &[0.3, 0.2], &cfg).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn closed_form_vanishes_at_alpha_equal_s() {
        let cfg = QuadratureConfig::default();
        let r = apply_l(&unit(2), 0.5, &CatalogFunction::half_space_power(0.5).unwrap(), &[0.0, 1.3], &cfg).unwrap();
        assert_eq!(r.path, EvaluationPath::ClosedForm);
        assert!(r.value.abs() < 1e-8);
    }

    #[test]
    fn closed_form_power_law() {
        let cfg = QuadratureConfig::default();
        let a = unit(2);
        let v1 = apply_l_halfspace_power(&a, 0.5, 0.25, &[0.0, 1.0], &cfg).unwrap();
        let v2 = apply_l_halfspace_power(&a, 0.5, 0.25, &[0.0, 2.0], &cfg).unwrap();
        assert!((v2.value / v1.value - 2f64.powf(-0.75)).abs() < 1e-14);
        assert!((v1.value + std::f64::consts::PI).abs() < 1e-8);
    }

    #[test]
    fn numeric_path_matches_closed_form() {
        let cfg = QuadratureConfig::default();
        let a = unit(2);
        let f = CatalogFunction::half_space_power(0.25).unwrap();
        let x = [0.4, 0.7];
        let c = apply_l(&a, 0.5, &f, &x, &cfg).unwrap();
        let n = apply_l_numeric(&a, 0.5, &f, &x, &cfg).unwrap();
        assert!((c.value - n.value).abs() < 1e-6 * c.value.abs(), "{c:?} {n:?}");
    }

    #[test]
    fn refuses_near_boundary() {
        let cfg = QuadratureConfig::default();
        let f = CatalogFunction::half_space_power(0.25).unwrap();
        assert!(apply_l_numeric(&unit(2), 0.5, &f, &[1.0, 1e-9], &cfg).is_err());
        assert!(apply_l_numeric(&unit(2), 0.5, &f, &[0.0, 1e-9], &cfg).is_ok());
    }

    #[test]
    fn zero_density_is_rejected() {
        let cfg = QuadratureConfig::default();
        let z = SpectralDensity::constant(2, 0.0).unwrap();
        let r = apply_l(&z, 0.5, &CatalogFunction::wholespace_bump(2), &[0.0, 0.0], &cfg);
        assert!(matches!(r, Err(Error::DegenerateDensity(_))));
    }

    #[test]
    fn correction_with_constant_factor_vanishes() {
        let cfg = QuadratureConfig::default();
        let r = correction_l(&unit(2), 0.5, &CatalogFunction::Constant(2.0), &CatalogFunction::wholespace_bump(2), &[0.1, 0.1], &cfg)
            .unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn correction_of_a_square_is_nonnegative() {
        let cfg = QuadratureConfig::default();
        let b = CatalogFunction::wholespace_bump(2);
        let r = correction_l(&unit(2), 0.5, &b, &b, &[0.0, 0.0], &cfg).unwrap();
        assert!(r.value >= -r.abs_error_estimate);
    }
}
