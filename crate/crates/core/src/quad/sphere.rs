use std::cell::RefCell;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::gauss::gauss_legendre;
use super::gk::{integrate_pieces_aux, AuxPiece};
use super::{IntegralResult, QuadratureConfig};
use crate::error::{Error, Result};
use crate::spectral::SpectralDensity;

/// Surface area of `S^{N−1}`.
pub fn sphere_area(n: usize) -> f64 {
    assert!(n >= 1);
    let mut area = if n % 2 == 1 { 2.0 } else { 2.0 * PI };
    let mut k = if n % 2 == 1 { 1 } else { 2 };
    while k < n {
        area *= 2.0 * PI / k as f64;
        k += 2;
    }
    area
}

/// Angles (taken modulo π, planar case only) at which an integrand on the
/// circle is not smooth.
#[derive(Debug, Clone, Default)]
pub struct SphereBreaks {
    pub angles: Vec<f64>,
    /// Subset of break angles where the integrand has an integrable
    /// algebraic blow-up; adjacent pieces are integrated in a graded variable.
    pub singular: Vec<f64>,
}

impl SphereBreaks {
    /// Break where `θ` is parallel to `dir`.
    pub fn along(mut self, dir: &[f64]) -> Self {
        if dir.len() == 2 && (dir[0] != 0.0 || dir[1] != 0.0) {
            self.angles.push(dir[1].atan2(dir[0]));
        }
        self
    }

    /// Break where `θ` is orthogonal to `normal`.
    pub fn perpendicular_to(mut self, normal: &[f64]) -> Self {
        if normal.len() == 2 && (normal[0] != 0.0 || normal[1] != 0.0) {
            self.angles.push(normal[1].atan2(normal[0]) + 0.5 * PI);
        }
        self
    }

    /// Singular break where `θ` is parallel to `dir`.
    pub fn singular_along(mut self, dir: &[f64]) -> Self {
        if dir.len() == 2 && (dir[0] != 0.0 || dir[1] != 0.0) {
            let phi = dir[1].atan2(dir[0]);
            self.angles.push(phi);
            self.singular.push(phi.rem_euclid(PI));
        }
        self
    }

    fn is_singular(&self, phi: f64) -> bool {
        self.singular.iter().any(|s| {
            let d = (s - phi).abs();
            d < 1e-13 || (PI - d).abs() < 1e-13
        })
    }

    pub fn angle(mut self, phi: f64) -> Self {
        self.angles.push(phi);
        self
    }

    fn sorted_in_half_turn(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.angles.iter().map(|a| a.rem_euclid(PI)).collect();
        v.push(0.0);
        v.push(PI);
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        v
    }
}

/// `∫_{S^{N−1}} g(θ) a(θ) dθ` for an even integrand `g`.
///
/// Nodes are placed on a half-sphere and weights doubled, so antipodal
/// symmetry holds exactly. In the plane the half-circle is integrated
/// adaptively with splits at the density's cap boundaries and at `breaks`;
/// in three dimensions a Gauss × trapezoid product rule aligned with the
/// density axis is used, with the error taken from a coarser rule;
/// beyond that, seeded Monte Carlo with a three-sigma error.
pub fn sphere_quadrature(
    g: &dyn Fn(&[f64]) -> Result<f64>,
    a: &SpectralDensity,
    breaks: &SphereBreaks,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    sphere_quadrature_with_errors(&|t| g(t).map(|v| (v, 0.0)), a, breaks, cfg)
}

/// As [`sphere_quadrature`] for an integrand that returns `(value, error)`.
/// The reported error adds `∫ error·a dθ` over the same nodes to the
/// angular quadrature error.
pub fn sphere_quadrature_with_errors(
    g: &dyn Fn(&[f64]) -> Result<(f64, f64)>,
    a: &SpectralDensity,
    breaks: &SphereBreaks,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    let n = a.dim();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let weighted = |theta: &[f64]| -> (f64, f64) {
        let w = a.eval_unchecked(theta);
        if w == 0.0 {
            return (0.0, 0.0);
        }
        match g(theta) {
            Ok((v, e)) => (v * w, e.abs() * w),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                (f64::NAN, 0.0)
            }
        }
    };
    let (mut result, inner) = match n {
        1 => {
            let (v, e) = weighted(&[1.0]);
            (IntegralResult { value: 2.0 * v, abs_error_estimate: 0.0, n_evals: 1, converged: v.is_finite() }, 2.0 * e)
        }
        2 => planar(&weighted, a, breaks, cfg),
        3 => product_rule(&weighted, a, cfg),
        _ => monte_carlo(&weighted, n, cfg),
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    result.abs_error_estimate += inner;
    result.require_converged()
}

fn planar(
    weighted: &dyn Fn(&[f64]) -> (f64, f64),
    a: &SpectralDensity,
    breaks: &SphereBreaks,
    cfg: &QuadratureConfig,
) -> (IntegralResult, f64) {
    let mut all = breaks.clone();
    if let Some((axis, cosines)) = a.discontinuities() {
        let phi_axis = axis[1].atan2(axis[0]);
        for c in cosines {
            let half = c.clamp(-1.0, 1.0).acos();
            all = all.angle(phi_axis + half).angle(phi_axis - half);
        }
    }
    let pts = all.sorted_in_half_turn();
    let f = |phi: f64| {
        let (v, e) = weighted(&[phi.cos(), phi.sin()]);
        (2.0 * v, 2.0 * e)
    };
    // (start, signed length) of each piece; graded pieces start at the
    // singular end and use φ = start + len·u⁴.
    let mut plain = Vec::new();
    let mut graded = Vec::new();
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        match (all.is_singular(lo), all.is_singular(hi)) {
            (false, false) => plain.push((lo, hi)),
            (true, false) => graded.push((lo, hi - lo)),
            (false, true) => graded.push((hi, lo - hi)),
            (true, true) => {
                let mid = 0.5 * (lo + hi);
                graded.push((lo, mid - lo));
                graded.push((hi, mid - hi));
            }
        }
    }
    let mapped: Vec<Box<dyn Fn(f64) -> (f64, f64) + '_>> = graded
        .iter()
        .map(|&(start, len)| {
            let f = &f;
            Box::new(move |u: f64| {
                let u3 = u * u * u;
                let jac = 4.0 * u3 * len.abs();
                let (v, e) = f(start + len * u3 * u);
                (v * jac, e * jac)
            }) as Box<dyn Fn(f64) -> (f64, f64)>
        })
        .collect();
    let mut pieces: Vec<AuxPiece> = plain.iter().map(|&(lo, hi)| AuxPiece { f: &f, a: lo, b: hi }).collect();
    pieces.extend(mapped.iter().map(|g| AuxPiece { f: g.as_ref(), a: 0.0, b: 1.0 }));
    integrate_pieces_aux(&pieces, cfg.tolerance())
}

/// Orthonormal frame whose last vector is `axis`.
fn frame(axis: &[f64]) -> [[f64; 3]; 3] {
    let z = [axis[0], axis[1], axis[2]];
    let helper = if z[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = helper[0] * z[0] + helper[1] * z[1] + helper[2] * z[2];
    let mut x = [helper[0] - d * z[0], helper[1] - d * z[1], helper[2] - d * z[2]];
    let l = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    x.iter_mut().for_each(|c| *c /= l);
    let y = [z[1] * x[2] - z[2] * x[1], z[2] * x[0] - z[0] * x[2], z[0] * x[1] - z[1] * x[0]];
    [x, y, z]
}

fn product_rule(weighted: &dyn Fn(&[f64]) -> (f64, f64), a: &SpectralDensity, cfg: &QuadratureConfig) -> (IntegralResult, f64) {
    let axis = a.polar_axis();
    let [ex, ey, ez] = frame(&axis);
    let mut splits = vec![0.0, 1.0];
    if let Some((_, cosines)) = a.discontinuities() {
        splits.extend(cosines.into_iter().filter(|c| *c > 0.0 && *c < 1.0));
    }
    splits.sort_by(|p, q| p.total_cmp(q));
    splits.dedup();

    let rule = |order: usize, n_az: usize| -> (f64, f64, usize) {
        let (xg, wg) = gauss_legendre(order);
        let mut total = 0.0;
        let mut total_err = 0.0;
        let mut evals = 0;
        for w in splits.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            // u = lo + (hi − lo)·g(v) with g' ∝ v³(1 − v)³ flattens endpoint cusps such as |θ_N|^{2s}.
            for (xi, wi) in xg.iter().zip(&wg) {
                let v = 0.5 * (1.0 + xi);
                let g = v.powi(4) * (35.0 - 84.0 * v + 70.0 * v * v - 20.0 * v.powi(3));
                let dg = 140.0 * (v * (1.0 - v)).powi(3);
                let u = lo + (hi - lo) * g;
                let h = 0.5 * (hi - lo) * dg;
                let r = (1.0 - u * u).max(0.0).sqrt();
                let mut ring = 0.0;
                let mut ring_err = 0.0;
                for k in 0..n_az {
                    let phi = 2.0 * PI * (k as f64 + 0.5) / n_az as f64;
                    let (sp, cp) = phi.sin_cos();
                    let theta: Vec<f64> =
                        (0..3).map(|i| r * cp * ex[i] + r * sp * ey[i] + u * ez[i]).collect();
                    let (v, e) = weighted(&theta);
                    ring += v;
                    ring_err += e;
                    evals += 1;
                }
                total += h * wi * ring * 2.0 * PI / n_az as f64;
                total_err += h * wi * ring_err * 2.0 * PI / n_az as f64;
            }
        }
        (2.0 * total, 2.0 * total_err, evals)
    };
    let m = cfg.sphere_nodes.max(4);
    let (fine, inner, e1) = rule(m / 2, 2 * m);
    let (coarse, _, e2) = rule((m / 2).saturating_sub(4).max(2), m);
    let err = (fine - coarse).abs();
    let r = IntegralResult {
        value: fine,
        abs_error_estimate: err,
        n_evals: e1 + e2,
        converged: err <= cfg.tolerance().target(fine) && fine.is_finite(),
    };
    (r, inner)
}

fn monte_carlo(weighted: &dyn Fn(&[f64]) -> (f64, f64), n: usize, cfg: &QuadratureConfig) -> (IntegralResult, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.mc_seed);
    let samples = cfg.mc_samples;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut sum_err = 0.0;
    let mut theta = vec![0.0; n];
    for _ in 0..samples {
        let mut l2: f64 = 0.0;
        for t in theta.iter_mut() {
            *t = StandardNormal.sample(&mut rng);
            l2 += *t * *t;
        }
        let l = l2.sqrt();
        theta.iter_mut().for_each(|t| *t /= l);
        let (v, e) = weighted(&theta);
        sum += v;
        sum_err += e;
        sum_sq += v * v;
    }
    let area = sphere_area(n);
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    let value = area * mean;
    let err = 3.0 * area * (var / samples as f64).sqrt();
    let r = IntegralResult { value, abs_error_estimate: err, n_evals: samples, converged: err <= cfg.tolerance().target(value) };
    (r, area * sum_err / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Cone;

    #[test]
    fn areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-14);
    }

    #[test]
    fn circle_integrals() {
        let cfg = QuadratureConfig::default();
        let one = SpectralDensity::constant(2, 1.0).unwrap();
        let r = sphere_quadrature(&|_| Ok(1.0), &one, &SphereBreaks::default(), &cfg).unwrap();
        assert!((r.value - 2.0 * PI).abs() < 1e-10);
        let b = SphereBreaks::default().perpendicular_to(&[0.0, 1.0]);
        let r = sphere_quadrature(&|t| Ok(t[1].abs()), &one, &b, &cfg).unwrap();
        assert!((r.value - 4.0).abs() < 1e-8);
        let cap = SpectralDensity::cone_plateau(Cone::centered(vec![0.0, 1.0], 0.5).unwrap(), 1.0, 0.0).unwrap();
        let r = sphere_quadrature(&|_| Ok(1.0), &cap, &SphereBreaks::default(), &cfg).unwrap();
        assert!((r.value - 4.0 * PI / 3.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn three_dimensional_cap() {
        let cfg = QuadratureConfig::default();
        let one = SpectralDensity::constant(3, 1.0).unwrap();
        let r = sphere_quadrature(&|_| Ok(1.0), &one, &SphereBreaks::default(), &cfg).unwrap();
        assert!((r.value - 4.0 * PI).abs() < 1e-12);
        // Two caps of height τ each: area 2·2π·τ.
        let cap = SpectralDensity::cone_plateau(Cone::centered(vec![0.0, 0.0, 1.0], 0.3).unwrap(), 1.0, 0.0).unwrap();
        let r = sphere_quadrature(&|_| Ok(1.0), &cap, &SphereBreaks::default(), &cfg).unwrap();
        assert!((r.value - 4.0 * PI * 0.3).abs() < 1e-12);
    }

    #[test]
    fn errors_from_the_integrand_propagate() {
        let cfg = QuadratureConfig::default();
        let one = SpectralDensity::constant(2, 1.0).unwrap();
        let r = sphere_quadrature(&|_| Err(Error::NonsmoothPoint("x".into())), &one, &SphereBreaks::default(), &cfg);
        assert!(matches!(r, Err(Error::NonsmoothPoint(_))));
    }
}
