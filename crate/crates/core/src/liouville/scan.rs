use std::collections::HashMap;

use super::certify::{assess, certify, evaluate_l, CertificationReport, CertifyTolerance, Sampler};
use super::{big_c_alpha, construct_for_density, critical_exponents};
use crate::error::{domain, Result};
use crate::funcat::CatalogFunction;
use crate::quad::QuadratureConfig;
use crate::spectral::SpectralDensity;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    Halfspace,
    Wholespace,
}

impl ScanMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScanMode::Halfspace => "halfspace",
            ScanMode::Wholespace => "wholespace",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub sampler: Sampler,
    pub tolerance: CertifyTolerance,
    /// Candidate exponents for the subcritical search, as fractions of `s`.
    pub alpha_fractions: Vec<f64>,
    pub eps_grid: Vec<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            sampler: Sampler::default(),
            tolerance: CertifyTolerance::default(),
            alpha_fractions: (1..=9).map(|k| k as f64 / 10.0).collect(),
            eps_grid: vec![1e-3, 1e-2, 0.1, 1.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub p: f64,
    /// `None` when every exponent is subcritical.
    pub threshold: Option<f64>,
    /// Construction regime, or `subcritical`, `not_constructed`, `error`.
    pub regime: String,
    pub alpha: Option<f64>,
    pub c_alpha: Option<f64>,
    pub eps_max: Option<f64>,
    pub eps: Option<f64>,
    pub min_margin: Option<f64>,
    /// `None` when nothing was attempted.
    pub certified: Option<bool>,
    pub n_points: usize,
    pub note: String,
}

impl ScanRow {
    fn bare(p: f64, threshold: Option<f64>, regime: &str, note: String) -> Self {
        Self {
            p,
            threshold,
            regime: regime.into(),
            alpha: None,
            c_alpha: None,
            eps_max: None,
            eps: None,
            min_margin: None,
            certified: None,
            n_points: 0,
            note,
        }
    }
}

struct Refuter<'a> {
    a: &'a SpectralDensity,
    s: f64,
    mode: ScanMode,
    sc: &'a ScanConfig,
    cfg: &'a QuadratureConfig,
    points: Vec<Vec<f64>>,
    cache: HashMap<u64, (CatalogFunction, Vec<(f64, f64)>, f64)>,
}

impl Refuter<'_> {
    fn family_member(&mut self, alpha: f64) -> Result<&(CatalogFunction, Vec<(f64, f64)>, f64)> {
        let key = alpha.to_bits();
        if !self.cache.contains_key(&key) {
            let kelvin = CatalogFunction::kelvin(alpha, self.a.dim(), self.s)?;
            let f = match self.mode {
                ScanMode::Halfspace => kelvin,
                ScanMode::Wholespace => CatalogFunction::translate_truncate(kelvin),
            };
            let lf = evaluate_l(self.a, self.s, &f, &self.points, self.cfg)?;
            let (c, _) = big_c_alpha(self.a, self.s, alpha, self.cfg)?;
            self.cache.insert(key, (f, lf, c));
        }
        Ok(&self.cache[&key])
    }

    /// Tries every candidate; returns the one closest to certification.
    fn refute(&mut self, p: f64, threshold: Option<f64>) -> Result<ScanRow> {
        let mut best: Option<(f64, f64, f64, CertificationReport)> = None;
        let mut any_certified = false;
        let alphas: Vec<f64> = self.sc.alpha_fractions.iter().map(|f| f * self.s).collect();
        for alpha in alphas {
            let (f, lf, c) = self.family_member(alpha)?.clone();
            for &eps in &self.sc.eps_grid {
                let rep = assess(p, eps, &f, &self.points, &lf, self.sc.tolerance)?;
                any_certified |= rep.certified;
                let worst = rep.worst.first().map_or(f64::INFINITY, |w| w.slack);
                if best.as_ref().is_none_or(|b| worst > b.3.worst.first().map_or(f64::INFINITY, |w| w.slack)) {
                    best = Some((alpha, c, eps, rep));
                }
            }
        }
        let Some((alpha, c, eps, rep)) = best else {
            return domain("the subcritical candidate family is empty");
        };
        let note = if any_certified {
            "a candidate passed on the samples; refine the sampler".to_string()
        } else {
            "no candidate in the family certified (consistency, not proof)".to_string()
        };
        Ok(ScanRow {
            p,
            threshold,
            regime: "subcritical".into(),
            alpha: Some(alpha),
            c_alpha: Some(c),
            eps_max: (c < 0.0 && p > 1.0).then(|| (-c).powf(1.0 / (p - 1.0))),
            eps: Some(eps),
            min_margin: Some(rep.min_margin),
            certified: Some(any_certified),
            n_points: rep.n_points,
            note,
        })
    }
}

fn supercritical_row(
    a: &SpectralDensity,
    s: f64,
    p: f64,
    threshold: Option<f64>,
    mode: ScanMode,
    sc: &ScanConfig,
    cfg: &QuadratureConfig,
) -> Result<ScanRow> {
    if !a.is_constant() {
        return Ok(ScanRow::bare(
            p,
            threshold,
            "not_constructed",
            "no explicit construction for non-constant densities".into(),
        ));
    }
    let c = construct_for_density(a, s, p, None, cfg)?;
    // Whole-space candidates vanish on the lower half-space, so they are
    // checked on the region where the construction is meant to hold.
    let sampler = Sampler { mirror: false, ..sc.sampler.clone() };
    let rep = certify(a, s, p, &c.function, &sampler, sc.tolerance, cfg)?;
    let note = match mode {
        ScanMode::Halfspace => "constructed and sampled on the half-space".into(),
        ScanMode::Wholespace => "constructed; sampled on the upper half-space validity region".into(),
    };
    Ok(ScanRow {
        p,
        threshold,
        regime: c.regime.as_str().into(),
        alpha: Some(c.alpha),
        c_alpha: Some(c.c_alpha),
        eps_max: Some(c.eps_max),
        eps: Some(c.eps),
        min_margin: Some(rep.min_margin),
        certified: Some(rep.certified),
        n_points: rep.n_points,
        note,
    })
}

/// Scans `p`: above the threshold an explicit supersolution is built and
/// certified; at or below it a fixed candidate family is tried and every
/// failure is recorded. Row-level failures become `error` rows.
pub fn liouville_scan(
    a: &SpectralDensity,
    s: f64,
    p_grid: &[f64],
    mode: ScanMode,
    sc: &ScanConfig,
    cfg: &QuadratureConfig,
) -> Result<Vec<ScanRow>> {
    a.require_nondegenerate()?;
    if let Some(p) = p_grid.iter().find(|p| !(**p >= 1.0 && p.is_finite())) {
        return domain(format!("exponent p = {p} must be finite and at least 1"));
    }
    sc.sampler.validate()?;
    let n = a.dim();
    let crit = critical_exponents(n, s)?;
    let threshold = match mode {
        ScanMode::Halfspace => Some(crit.halfspace),
        ScanMode::Wholespace => crit.wholespace,
    };
    let sampler = Sampler { mirror: mode == ScanMode::Wholespace, ..sc.sampler.clone() };
    let mut refuter = Refuter { a, s, mode, sc, cfg, points: sampler.points(n), cache: HashMap::new() };
    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let supercritical = threshold.is_some_and(|t| p > t);
        let row = if supercritical {
            supercritical_row(a, s, p, threshold, mode, sc, cfg)
        } else {
            refuter.refute(p, threshold)
        };
        rows.push(row.unwrap_or_else(|e| ScanRow::bare(p, threshold, "error", e.to_string())));
    }
    Ok(rows)
}
