use std::collections::HashMap;

use crate::error::{domain, Result};
use crate::funcat::CatalogFunction;
use crate::operator::apply_l;
use crate::quad::QuadratureConfig;
use crate::spectral::SpectralDensity;

/// Structured sample set for certification.
///
/// Normal coordinates are log-spaced in `[normal_min, normal_max]`; each is
/// combined with tangential offsets `0` and `±` log-spaced values along
/// `e_1`. `far_axis_decades` adds axis points `x_N = 10^k`, `k = 1..=K`,
/// where subcritical failures of decaying candidates show up. `mirror`
/// reflects every point through `{x_N = 0}` for whole-space sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampler {
    pub normal_min: f64,
    pub normal_max: f64,
    pub normal_count: usize,
    pub tangential_min: f64,
    pub tangential_max: f64,
    pub tangential_count: usize,
    pub far_axis_decades: u32,
    pub mirror: bool,
    pub extras: Vec<Vec<f64>>,
}

impl Default for Sampler {
    fn default() -> Self {
        Self {
            normal_min: 1e-2,
            normal_max: 10.0,
            normal_count: 20,
            tangential_min: 1e-2,
            tangential_max: 10.0,
            tangential_count: 5,
            far_axis_decades: 100,
            mirror: false,
            extras: Vec::new(),
        }
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
        }
    }
}

impl Sampler {
    pub fn validate(&self) -> Result<()> {
        if !(self.normal_min > 0.0 && self.normal_max >= self.normal_min && self.normal_count > 0) {
            return domain("sampler normal range must be positive and nonempty");
        }
        if !(self.tangential_min > 0.0 && self.tangential_max >= self.tangential_min) {
            return domain("sampler tangential range must be positive");
        }
        Ok(())
    }

    pub fn points(&self, n: usize) -> Vec<Vec<f64>> {
        let normals = log_space(self.normal_min, self.normal_max, self.normal_count);
        let mut tangentials = vec![0.0];
        if n >= 2 {
            for t in log_space(self.tangential_min, self.tangential_max, self.tangential_count) {
                tangentials.push(t);
                tangentials.push(-t);
            }
        }
        let mut out = Vec::new();
        let mut push = |xt: f64, xn: f64| {
            let mut x = vec![0.0; n];
            if n >= 2 {
                x[0] = xt;
            }
            x[n - 1] = xn;
            out.push(x);
        };
        for &xn in &normals {
            for &xt in &tangentials {
                push(xt, xn);
            }
        }
        for k in 1..=self.far_axis_decades {
            push(0.0, 10f64.powi(k as i32));
        }
        out.extend(self.extras.iter().filter(|x| x.len() == n).cloned());
        if self.mirror {
            let reflected: Vec<Vec<f64>> = out
                .iter()
                .map(|x| {
                    let mut y = x.clone();
                    y[n - 1] = -y[n - 1];
                    y
                })
                .collect();
            out.extend(reflected);
        }
        out
    }
}

/// Allowance for a sample: `abs + rel·(|Lu| + u^p)` plus the operator's own error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyTolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for CertifyTolerance {
    fn default() -> Self {
        Self { abs: 0.0, rel: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointMargin {
    pub x: Vec<f64>,
    pub u: f64,
    pub lu: f64,
    pub lu_err: f64,
    /// `−Lu(x) − u(x)^p`.
    pub margin: f64,
    /// `(margin + allowance)/(|Lu| + u^p)`; negative means the point fails.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub p: f64,
    pub min_margin: f64,
    pub argmin: Vec<f64>,
    pub n_points: usize,
    pub certified: bool,
    /// Largest operator error estimate over the samples.
    pub max_error: f64,
    /// The five points with the least relative slack, worst first.
    pub worst: Vec<PointMargin>,
}

/// `Lf` at each point, reusing one evaluation per ray for homogeneous `f`.
pub(crate) fn evaluate_l(
    a: &SpectralDensity,
    s: f64,
    f: &CatalogFunction,
    points: &[Vec<f64>],
    cfg: &QuadratureConfig,
) -> Result<Vec<(f64, f64)>> {
    let degree = f.homogeneity_degree();
    // With both a and f symmetric about the e_N axis, Lf(x) only depends on (|x'|, x_N).
    let axial = a.is_axially_symmetric() && f.is_axially_symmetric();
    let mut cache: HashMap<Vec<u64>, (f64, f64)> = HashMap::new();
    let mut out = Vec::with_capacity(points.len());
    for x in points {
        let n = x.len();
        let mut y = x.clone();
        if axial && n > 1 {
            let t = y[..n - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
            y[..n - 1].iter_mut().for_each(|v| *v = 0.0);
            y[0] = t;
        }
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = match degree {
            Some(d) if r > 0.0 => {
                y.iter_mut().for_each(|v| *v /= r);
                r.powf(d - 2.0 * s)
            }
            _ => 1.0,
        };
        let key: Vec<u64> = y.iter().map(|v| v.to_bits()).collect();
        let (v, e) = match cache.get(&key) {
            Some(&hit) => hit,
            None => {
                let ev = apply_l(a, s, f, &y, cfg)?;
                cache.insert(key, (ev.value, ev.abs_error_estimate));
                (ev.value, ev.abs_error_estimate)
            }
        };
        out.push((v * scale, e * scale));
    }
    Ok(out)
}

/// Margins of `u = eps·f` from precomputed values of `Lf`.
pub(crate) fn assess(
    p: f64,
    eps: f64,
    f: &CatalogFunction,
    points: &[Vec<f64>],
    lf: &[(f64, f64)],
    tol: CertifyTolerance,
) -> Result<CertificationReport> {
    let mut all = Vec::with_capacity(points.len());
    let mut certified = true;
    let mut max_error = 0.0f64;
    for (x, &(lv, le)) in points.iter().zip(lf) {
        let u = eps * f.eval(x);
        if u < 0.0 {
            return domain(format!("candidate is negative at {x:?}"));
        }
        let (lu, lu_err) = (eps * lv, eps.abs() * le);
        let up = u.powf(p);
        let margin = -lu - up;
        let scale = lu.abs() + up;
        let allowance = tol.abs + tol.rel * scale + lu_err;
        if margin < -allowance {
            certified = false;
        }
        max_error = max_error.max(lu_err);
        let slack = if scale > 0.0 { (margin + allowance) / scale } else { f64::INFINITY };
        all.push(PointMargin { x: x.clone(), u, lu, lu_err, margin, slack });
    }
    let (min_margin, argmin) = all
        .iter()
        .fold((f64::INFINITY, Vec::new()), |(m, a), pm| if pm.margin < m { (pm.margin, pm.x.clone()) } else { (m, a) });
    let mut order: Vec<usize> = (0..all.len()).collect();
    order.sort_by(|&i, &j| all[i].slack.total_cmp(&all[j].slack));
    let worst = order.iter().take(5).map(|&i| all[i].clone()).collect();
    Ok(CertificationReport { p, min_margin, argmin, n_points: all.len(), certified, max_error, worst })
}

/// Checks `−Lu ≥ u^p` on the sample set, within tolerance and error budget.
pub fn certify(
    a: &SpectralDensity,
    s: f64,
    p: f64,
    u: &CatalogFunction,
    sampler: &Sampler,
    tol: CertifyTolerance,
    cfg: &QuadratureConfig,
) -> Result<CertificationReport> {
    if !(p >= 1.0) {
        return domain(format!("exponent p = {p} must be at least 1"));
    }
    sampler.validate()?;
    let points = sampler.points(a.dim());
    let lu = evaluate_l(a, s, u, &points, cfg)?;
    assess(p, 1.0, u, &points, &lu, tol)
}
