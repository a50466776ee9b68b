use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Error, Result};
use crate::quad::{mc_region_volume, QuadratureConfig};
use crate::spectral::Cone;

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSearchConfig {
    /// Candidate shifts, tried largest first.
    pub grid: Vec<f64>,
    pub boundary_points: usize,
}

impl Default for GammaSearchConfig {
    fn default() -> Self {
        Self { grid: vec![0.5, 0.25, 0.1, 0.05, 0.025, 0.01], boundary_points: 64 }
    }
}

/// Outcome for one grid value of `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaProbe {
    pub gamma: f64,
    pub n_points: usize,
    /// Volume at the boundary point with the smallest `volume − 3σ`.
    pub min_volume: f64,
    pub three_sigma: f64,
    pub worst_point: Vec<f64>,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSearchResult {
    pub gamma: f64,
    pub n_points: usize,
    pub min_volume: f64,
    pub three_sigma: f64,
    pub worst_point: Vec<f64>,
    pub verified: bool,
    /// Every grid value below the returned one also verified.
    pub monotone: bool,
    pub probes: Vec<GammaProbe>,
}

/// Points of `∂B₁((1−γ)e_N)` with `x_N ≥ 0`. In the plane they are evenly
/// spaced in angle over the admissible arc, endpoints on `{x_N = 0}`
/// included; in higher dimensions they come from a seeded direction net.
fn boundary_net(n: usize, gamma: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let h = 1.0 - gamma;
    if n == 2 {
        let lo = -h.asin();
        let hi = PI - lo;
        return (0..count)
            .map(|i| {
                let phi = lo + (hi - lo) * i as f64 / (count - 1) as f64;
                vec![phi.cos(), (h + phi.sin()).max(0.0)]
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut d: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let l = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        d.iter_mut().for_each(|v| *v /= l);
        d[n - 1] += h;
        if d[n - 1] >= 0.0 {
            out.push(d);
        }
    }
    out
}

fn probe(nu: &[f64], tau: f64, gamma: f64, count: usize, cfg: &QuadratureConfig) -> Result<GammaProbe> {
    let n = nu.len();
    let mut center = vec![0.0; n];
    center[n - 1] = 1.0 - gamma;
    let mut best: Option<(f64, f64, f64, Vec<f64>)> = None;
    let mut verified = true;
    let points = boundary_net(n, gamma, count, cfg.mc_seed ^ 0x9a33a);
    for x in &points {
        let cone = Cone::new(nu.to_vec(), tau, x.clone())?;
        let inside = |y: &[f64]| y[n - 1] > 0.0 && cone.contains(y);
        let r = mc_region_volume(&inside, &center, 1.0, cfg);
        let lower = r.value - r.abs_error_estimate;
        if !(lower > 0.0) {
            verified = false;
        }
        if best.as_ref().is_none_or(|b| lower < b.0) {
            best = Some((lower, r.value, r.abs_error_estimate, x.clone()));
        }
    }
    let (_, min_volume, three_sigma, worst_point) = best.expect("boundary net is nonempty");
    Ok(GammaProbe { gamma, n_points: points.len(), min_volume, three_sigma, worst_point, verified })
}

/// Largest grid `γ` such that every sampled boundary point `x` of
/// `B₁((1−γ)e_N) ∩ {x_N ≥ 0}` sees a set `Σ_{ν,τ}(x) ∩ B₁((1−γ)e_N) ∩ {x_N > 0}`
/// of positive volume, certified by Monte Carlo at three sigma.
pub fn gamma_search(nu: &[f64], tau: f64, gc: &GammaSearchConfig, cfg: &QuadratureConfig) -> Result<GammaSearchResult> {
    let n = nu.len();
    if n < 2 {
        return domain("the cone search needs N ≥ 2");
    }
    Cone::centered(nu.to_vec(), tau)?;
    cfg.validate()?;
    if gc.boundary_points < 2 || gc.grid.is_empty() || gc.grid.iter().any(|g| !(*g > 0.0 && *g < 1.0)) {
        return domain("γ grid must be nonempty and inside (0, 1), with at least two boundary points");
    }
    let mut grid = gc.grid.clone();
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();
    let probes = grid.iter().map(|&g| probe(nu, tau, g, gc.boundary_points, cfg)).collect::<Result<Vec<_>>>()?;
    let first = probes.iter().position(|p| p.verified).ok_or_else(|| {
        Error::SearchFailure(format!("no γ in {grid:?} verified for ν = {nu:?}, τ = {tau}"))
    })?;
    let chosen = probes[first].clone();
    let monotone = probes[first..].iter().all(|p| p.verified);
    Ok(GammaSearchResult {
        gamma: chosen.gamma,
        n_points: chosen.n_points,
        min_volume: chosen.min_volume,
        three_sigma: chosen.three_sigma,
        worst_point: chosen.worst_point,
        verified: chosen.verified,
        monotone,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_net_touches_the_flat_boundary() {
        let pts = boundary_net(2, 0.25, 50, 1);
        assert_eq!(pts.len(), 50);
        assert!(pts[0][1].abs() < 1e-12 && pts[49][1].abs() < 1e-12);
        for p in &pts {
            let r = (p[0] * p[0] + (p[1] - 0.75).powi(2)).sqrt();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn full_cone_sees_the_whole_lens() {
        let cfg = QuadratureConfig::default();
        let r = gamma_search(&[0.0, 1.0], 1.0, &GammaSearchConfig::default(), &cfg).unwrap();
        assert_eq!(r.gamma, 0.5);
        let lens = mc_region_volume(&|y: &[f64]| y[1] > 0.0, &[0.0, 0.5], 1.0, &cfg);
        assert_eq!(r.min_volume, lens.value);
    }

    #[test]
    fn rejects_bad_input() {
        let cfg = QuadratureConfig::default();
        assert!(gamma_search(&[1.0], 0.5, &GammaSearchConfig::default(), &cfg).is_err());
        assert!(gamma_search(&[0.0, 1.0], 0.0, &GammaSearchConfig::default(), &cfg).is_err());
        let bad = GammaSearchConfig { grid: vec![1.5], boundary_points: 50 };
        assert!(gamma_search(&[0.0, 1.0], 0.5, &bad, &cfg).is_err());
    }
}
