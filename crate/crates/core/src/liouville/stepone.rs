use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::funcat::CatalogFunction;
use crate::operator::apply_l;
use crate::quad::QuadratureConfig;
use crate::spectral::SpectralDensity;

#[derive(Debug, Clone, PartialEq)]
pub struct StepOneConfig {
    /// Radii per zone (plateau and transition) at the base resolution.
    pub radial: usize,
    pub angular: usize,
    /// Layers `x_N = 10^{−1−k/2}` approaching the flat boundary.
    pub flat_layers: usize,
    /// Normal distance below which a point counts as near the flat boundary.
    pub flat_band: f64,
    pub refine: bool,
    pub audit_radii: Vec<f64>,
    pub audit_angles: usize,
}

impl Default for StepOneConfig {
    fn default() -> Self {
        Self {
            radial: 6,
            angular: 16,
            flat_layers: 6,
            flat_band: 0.1,
            refine: true,
            audit_radii: vec![1.0 + 1e-6, 1.01, 1.1, 1.5, 3.0],
            audit_angles: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepOneRegion {
    Interior,
    SphericalBoundary,
    FlatBoundary,
    Corner,
}

impl StepOneRegion {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepOneRegion::Interior => "interior",
            StepOneRegion::SphericalBoundary => "spherical_boundary",
            StepOneRegion::FlatBoundary => "flat_boundary",
            StepOneRegion::Corner => "corner",
        }
    }

    pub const ALL: [StepOneRegion; 4] =
        [StepOneRegion::Interior, StepOneRegion::SphericalBoundary, StepOneRegion::FlatBoundary, StepOneRegion::Corner];
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionSup {
    pub region: StepOneRegion,
    /// `−∞` when the region holds no sample.
    pub m_est: f64,
    pub sup_x: Vec<f64>,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditPoint {
    pub x: Vec<f64>,
    pub numerator: f64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOneReport {
    pub m_est: f64,
    pub sup_x: Vec<f64>,
    /// Operator error at the supremum divided by `φ_s` there.
    pub m_err: f64,
    pub n_samples: usize,
    /// `|M(2n) − M(n)|/|M(2n)|`.
    pub stability: f64,
    pub m_coarse: f64,
    pub regions: Vec<RegionSup>,
    pub audit: Vec<AuditPoint>,
    pub audit_max: f64,
}

struct Setup<'a> {
    a: &'a SpectralDensity,
    s: f64,
    n: usize,
    center: Vec<f64>,
    r_in: f64,
    phi_a0: CatalogFunction,
    phi_s: CatalogFunction,
    cfg: &'a QuadratureConfig,
}

impl Setup<'_> {
    fn point(&self, r: f64, omega: f64) -> Vec<f64> {
        let mut x = self.center.clone();
        x[0] += r * omega.cos();
        x[self.n - 1] += r * omega.sin();
        x
    }

    fn dist(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// `(−Lφ_{α₀} − Lφ_s)(x)` and its error.
    fn numerator(&self, x: &[f64]) -> Result<(f64, f64)> {
        let l1 = apply_l(self.a, self.s, &self.phi_a0, x, self.cfg)?;
        let l2 = apply_l(self.a, self.s, &self.phi_s, x, self.cfg)?;
        Ok((-l1.value - l2.value, l1.abs_error_estimate + l2.abs_error_estimate))
    }

    /// Ratio at an admissible point, `None` where `φ_s` vanishes.
    fn ratio(&self, x: &[f64]) -> Result<Option<(f64, f64)>> {
        let w = self.phi_s.eval(x);
        if !(w > 0.0) || x[self.n - 1] < 1e-5 {
            return Ok(None);
        }
        let (num, err) = self.numerator(x)?;
        Ok(Some((num / w, err / w)))
    }

    fn region(&self, x: &[f64], band: f64) -> StepOneRegion {
        match (x[self.n - 1] < band, self.dist(x) > self.r_in) {
            (false, false) => StepOneRegion::Interior,
            (false, true) => StepOneRegion::SphericalBoundary,
            (true, false) => StepOneRegion::FlatBoundary,
            (true, true) => StepOneRegion::Corner,
        }
    }

    fn samples(&self, sc: &StepOneConfig, level: usize) -> Vec<Vec<f64>> {
        let nr = sc.radial * level;
        let nw = sc.angular * level;
        let mut radii: Vec<f64> = (0..=nr).map(|i| self.r_in * i as f64 / (nr + 1) as f64).collect();
        radii.extend((0..nr).map(|j| 1.0 - (1.0 - self.r_in) * 0.5f64.powf(j as f64 / level as f64)));
        let mut out = Vec::new();
        for &r in &radii {
            let count = if r == 0.0 { 1 } else { nw };
            for k in 0..count {
                out.push(self.point(r, 2.0 * PI * (k as f64 + 0.5) / nw as f64));
            }
        }
        let h = self.center[self.n - 1];
        for j in 0..sc.flat_layers * level {
            let xn = 10f64.powf(-1.0 - 0.5 * j as f64 / level as f64);
            let half_chord = (1.0 - (h - xn) * (h - xn)).max(0.0).sqrt();
            for k in 0..nw / 2 {
                let mut x = vec![0.0; self.n];
                x[0] = -half_chord + 2.0 * half_chord * (k as f64 + 0.5) / (nw / 2) as f64;
                x[self.n - 1] = xn;
                out.push(x);
            }
        }
        out.retain(|x| x[self.n - 1] > 0.0 && self.dist(x) < 1.0);
        out
    }

    /// Compass search for a larger ratio, starting from `x`.
    fn refine(&self, mut x: Vec<f64>, mut best: (f64, f64)) -> Result<(Vec<f64>, (f64, f64))> {
        let mut h = 0.05;
        while h > 1e-3 {
            let mut moved = false;
            for d in [0, self.n - 1] {
                for sign in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[d] += sign * h;
                    if self.dist(&y) >= 1.0 {
                        continue;
                    }
                    if let Some(v) = self.ratio(&y)? {
                        if v.0 > best.0 {
                            best = v;
                            x = y;
                            moved = true;
                        }
                    }
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        Ok((x, best))
    }

    fn run(&self, sc: &StepOneConfig, level: usize) -> Result<(f64, Vec<f64>, f64, usize, Vec<RegionSup>)> {
        let pts = self.samples(sc, level);
        let mut regions: Vec<RegionSup> = StepOneRegion::ALL
            .iter()
            .map(|&region| RegionSup { region, m_est: f64::NEG_INFINITY, sup_x: vec![], n_points: 0 })
            .collect();
        let mut best: Option<(Vec<f64>, (f64, f64))> = None;
        let mut n_used = 0;
        for x in pts {
            let Some(v) = self.ratio(&x)? else { continue };
            n_used += 1;
            let reg = &mut regions[self.region(&x, sc.flat_band) as usize];
            reg.n_points += 1;
            if v.0 > reg.m_est {
                reg.m_est = v.0;
                reg.sup_x = x.clone();
            }
            if best.as_ref().is_none_or(|b| v.0 > b.1 .0) {
                best = Some((x, v));
            }
        }
        let (mut x, mut v) = best.ok_or_else(|| crate::error::Error::SearchFailure("no admissible sample".into()))?;
        if sc.refine {
            (x, v) = self.refine(x, v)?;
            let reg = &mut regions[self.region(&x, sc.flat_band) as usize];
            if v.0 > reg.m_est {
                reg.m_est = v.0;
                reg.sup_x = x.clone();
            }
        }
        Ok((v.0, x, v.1, n_used, regions))
    }
}

/// Empirical `M` with `−Lφ_{α₀} − Lφ_s ≤ M φ_s` on the support of
/// `φ = Bump((1−γ₀)e_N, 1−γ₀/2, 1)`, where `φ_β = (x_N)₊^β φ`.
///
/// Samples sit in the `(e_1, e_N)` plane, graded toward the sphere and the
/// flat boundary, at the configured and at doubled resolution; the report
/// carries the doubled estimate, its change from the coarse one, per-region
/// suprema and the exterior audit of the numerator.
pub fn step_one_m(
    a: &SpectralDensity,
    s: f64,
    alpha0: f64,
    gamma0: f64,
    sc: &StepOneConfig,
    cfg: &QuadratureConfig,
) -> Result<StepOneReport> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("order s = {s} must lie in (0, 1)"));
    }
    if !(alpha0 > s && alpha0 < (2.0 * s).min(1.0)) {
        return domain(format!("α₀ = {alpha0} must lie in (s, min(1, 2s))"));
    }
    if !(gamma0 > 0.0 && gamma0 < 1.0) {
        return domain(format!("γ₀ = {gamma0} must lie in (0, 1)"));
    }
    if sc.radial == 0 || sc.angular < 2 {
        return domain("step-one sampler needs at least one radius and two angles");
    }
    a.require_nondegenerate()?;
    let n = a.dim();
    if n < 2 {
        return domain("the step-one bound is sampled for N ≥ 2");
    }
    let mut center = vec![0.0; n];
    center[n - 1] = 1.0 - gamma0;
    let r_in = 1.0 - 0.5 * gamma0;
    let bump = CatalogFunction::bump(center.clone(), r_in, 1.0)?;
    let setup = Setup {
        a,
        s,
        n,
        center,
        r_in,
        phi_a0: CatalogFunction::product(CatalogFunction::half_space_power(alpha0)?, bump.clone()),
        phi_s: CatalogFunction::product(CatalogFunction::half_space_power(s)?, bump),
        cfg,
    };
    let (m_coarse, ..) = setup.run(sc, 1)?;
    let (m_est, sup_x, m_err, n_samples, regions) = setup.run(sc, 2)?;
    let stability = (m_est - m_coarse).abs() / m_est.abs();

    let mut audit = Vec::new();
    for &r in &sc.audit_radii {
        for k in 0..sc.audit_angles {
            let x = setup.point(r, 2.0 * PI * (k as f64 + 0.5) / sc.audit_angles as f64);
            if x[n - 1].abs() < 1e-5 {
                continue;
            }
            let (numerator, err) = setup.numerator(&x)?;
            audit.push(AuditPoint { x, numerator, err });
        }
    }
    let audit_max = audit.iter().map(|p| p.numerator).fold(f64::NEG_INFINITY, f64::max);
    Ok(StepOneReport { m_est, sup_x, m_err, n_samples, stability, m_coarse, regions, audit, audit_max })
}
