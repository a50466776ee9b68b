//! Spectral densities on the unit sphere and the two-fold cones that carry them.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::quad::{sphere_quadrature, IntegralResult, QuadratureConfig, SphereBreaks};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// The closed two-fold cone `{y : |(y − x)·ν| ≥ (1 − τ)|y − x|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    axis: Vec<f64>,
    aperture: f64,
    vertex: Vec<f64>,
}

impl Cone {
    pub fn new(axis: Vec<f64>, aperture: f64, vertex: Vec<f64>) -> Result<Self> {
        if axis.is_empty() || axis.len() != vertex.len() {
            return domain("cone axis and vertex must share a positive dimension");
        }
        if (norm(&axis) - 1.0).abs() > 1e-12 {
            return domain(format!("cone axis must be a unit vector, |ν| = {}", norm(&axis)));
        }
        if !(aperture > 0.0 && aperture <= 1.0) {
            return domain(format!("cone aperture τ = {aperture} must lie in (0, 1]"));
        }
        Ok(Self { axis, aperture, vertex })
    }

    /// Cone with vertex at the origin.
    pub fn centered(axis: Vec<f64>, aperture: f64) -> Result<Self> {
        let n = axis.len();
        Self::new(axis, aperture, vec![0.0; n])
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn vertex(&self) -> &[f64] {
        &self.vertex
    }

    pub fn dim(&self) -> usize {
        self.axis.len()
    }

    /// Cosine of the cap half-angle, `1 − τ`.
    pub fn cap_cosine(&self) -> f64 {
        1.0 - self.aperture
    }

    /// Same axis and aperture, different vertex.
    pub fn with_vertex(&self, vertex: Vec<f64>) -> Result<Self> {
        Self::new(self.axis.clone(), self.aperture, vertex)
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        let d: Vec<f64> = y.iter().zip(&self.vertex).map(|(a, b)| a - b).collect();
        dot(&d, &self.axis).abs() >= self.cap_cosine() * norm(&d)
    }
}

/// User-supplied density. The evaluator must be even; jumps are only
/// allowed on the declared cap boundaries `|θ·axis| = c`.
#[derive(Clone)]
pub struct CustomDensity {
    pub evaluator: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub smooth: bool,
    pub axis: Vec<f64>,
    pub cap_cosines: Vec<f64>,
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("smooth", &self.smooth)
            .field("axis", &self.axis)
            .field("cap_cosines", &self.cap_cosines)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum DensityKind {
    Constant(f64),
    ConePlateau { cone: Cone, inside: f64, outside: f64 },
    Custom(CustomDensity),
}

/// An even, bounded weight `a(θ)` on `S^{N−1}`.
#[derive(Debug, Clone)]
pub struct SpectralDensity {
    kind: DensityKind,
    dim: usize,
    lower: f64,
    upper: f64,
}

impl SpectralDensity {
    pub fn constant(dim: usize, value: f64) -> Result<Self> {
        if dim == 0 {
            return domain("dimension must be at least 1");
        }
        if !(value >= 0.0) || !value.is_finite() {
            return domain(format!("constant density must be finite and nonnegative, got {value}"));
        }
        Ok(Self { kind: DensityKind::Constant(value), dim, lower: value, upper: value })
    }

    /// `inside` on the closed cap `|θ·ν| ≥ 1 − τ`, `outside` elsewhere.
    pub fn cone_plateau(cone: Cone, inside: f64, outside: f64) -> Result<Self> {
        if cone.vertex().iter().any(|&v| v != 0.0) {
            return domain("plateau cone must have its vertex at the origin");
        }
        if !(inside > 0.0) || !inside.is_finite() {
            return domain(format!("plateau inside value must be positive, got {inside}"));
        }
        if !(outside >= 0.0 && outside <= inside) {
            return domain(format!("plateau outside value must lie in [0, inside], got {outside}"));
        }
        let dim = cone.dim();
        Ok(Self { kind: DensityKind::ConePlateau { cone, inside, outside }, dim, lower: inside, upper: inside })
    }

    /// A custom density with declared bounds `lower ≤ a ≤ upper` on its cone cap.
    pub fn custom(dim: usize, density: CustomDensity, lower: f64, upper: f64) -> Result<Self> {
        if density.axis.len() != dim || (norm(&density.axis) - 1.0).abs() > 1e-12 {
            return domain("custom density axis must be a unit vector of the stated dimension");
        }
        if density.cap_cosines.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return domain("cap cosines must lie in [0, 1]");
        }
        if !(upper >= lower && lower >= 0.0) {
            return domain("custom density bounds must satisfy 0 ≤ d ≤ D");
        }
        Ok(Self { kind: DensityKind::Custom(density), dim, lower, upper })
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lower bound `d` on the cone cap.
    pub fn lower_bound(&self) -> f64 {
        self.lower
    }

    /// Upper bound `D`.
    pub fn upper_bound(&self) -> f64 {
        self.upper
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, DensityKind::Constant(_))
    }

    pub fn is_identically_zero(&self) -> bool {
        matches!(self.kind, DensityKind::Constant(c) if c == 0.0)
    }

    /// Rejects densities for which the operator degenerates.
    /// Whether `a(θ)` depends on `θ` only through `θ_N`.
    pub fn is_axially_symmetric(&self) -> bool {
        match &self.kind {
            DensityKind::Constant(_) => true,
            DensityKind::ConePlateau { cone, .. } => {
                let ax = cone.axis();
                ax[..ax.len() - 1].iter().all(|c| *c == 0.0) && cone.vertex().iter().all(|c| *c == 0.0)
            }
            DensityKind::Custom(_) => false,
        }
    }

    pub fn require_nondegenerate(&self) -> Result<()> {
        if self.is_identically_zero() {
            return Err(Error::DegenerateDensity("a ≡ 0".into()));
        }
        Ok(())
    }

    pub fn eval(&self, theta: &[f64]) -> Result<f64> {
        if theta.len() != self.dim {
            return domain(format!("direction has dimension {}, density has {}", theta.len(), self.dim));
        }
        if (norm(theta) - 1.0).abs() > 1e-9 {
            return domain(format!("direction must be a unit vector, |θ| = {}", norm(theta)));
        }
        Ok(self.eval_unchecked(theta))
    }

    pub(crate) fn eval_unchecked(&self, theta: &[f64]) -> f64 {
        match &self.kind {
            DensityKind::Constant(c) => *c,
            DensityKind::ConePlateau { cone, inside, outside } => {
                if dot(theta, cone.axis()).abs() >= cone.cap_cosine() {
                    *inside
                } else {
                    *outside
                }
            }
            DensityKind::Custom(c) => (c.evaluator)(theta),
        }
    }

    /// Axis and cap cosines across which the density may jump.
    pub fn discontinuities(&self) -> Option<(&[f64], Vec<f64>)> {
        match &self.kind {
            DensityKind::Constant(_) => None,
            DensityKind::ConePlateau { cone, inside, outside } => {
                if inside == outside || cone.aperture() >= 1.0 {
                    None
                } else {
                    Some((cone.axis(), vec![cone.cap_cosine()]))
                }
            }
            DensityKind::Custom(c) => Some((&c.axis, c.cap_cosines.clone())),
        }
    }

    /// Preferred polar axis for product rules: the cone axis if any, else `e_N`.
    pub fn polar_axis(&self) -> Vec<f64> {
        match &self.kind {
            DensityKind::ConePlateau { cone, .. } => cone.axis().to_vec(),
            DensityKind::Custom(c) => c.axis.clone(),
            DensityKind::Constant(_) => {
                let mut e = vec![0.0; self.dim];
                e[self.dim - 1] = 1.0;
                e
            }
        }
    }
}

/// `I_a = ∫_{S^{N−1}} |θ_N|^{2s} a(θ) dθ`.
pub fn weighted_sphere_moment(a: &SpectralDensity, s: f64, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("order s = {s} must lie in (0, 1)"));
    }
    if a.is_identically_zero() {
        return Ok(IntegralResult::exact(0.0));
    }
    let n = a.dim();
    let mut normal = vec![0.0; n];
    normal[n - 1] = 1.0;
    let breaks = SphereBreaks::default().perpendicular_to(&normal);
    let g = move |theta: &[f64]| Ok(theta[n - 1].abs().powf(2.0 * s));
    sphere_quadrature(&g, a, &breaks, cfg)
}

/// Estimates of the ellipticity constants `λ` and `Λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticityDiagnostics {
    pub lambda_est: f64,
    pub lambda_err: f64,
    pub lambda_direction: Vec<f64>,
    pub big_lambda_est: f64,
    pub big_lambda_err: f64,
}

fn directional_moment(a: &SpectralDensity, s: f64, nu: &[f64], cfg: &QuadratureConfig) -> Result<IntegralResult> {
    let nu = nu.to_vec();
    let breaks = SphereBreaks::default().perpendicular_to(&nu);
    let g = move |theta: &[f64]| Ok(dot(theta, &nu).abs().powf(2.0 * s));
    sphere_quadrature(&g, a, &breaks, cfg)
}

/// Unit directions on the half-sphere used to scan for `λ`.
fn direction_grid(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0]],
        2 => (0..count)
            .map(|k| {
                let phi = std::f64::consts::PI * k as f64 / count as f64;
                vec![phi.cos(), phi.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci lattice on the upper hemisphere in the first three
            // coordinates, with remaining coordinates cycled by a golden-ratio
            // sequence for N > 3.
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            (0..count)
                .map(|k| {
                    let z = (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = 2.0 * std::f64::consts::PI * (k as f64 / golden).fract();
                    let mut v = vec![0.0; n];
                    v[0] = r * phi.cos();
                    v[1] = r * phi.sin();
                    v[n - 1] = z;
                    for (j, vj) in v.iter_mut().enumerate().take(n - 1).skip(2) {
                        *vj = ((k as f64 + 1.0) * golden * (j as f64 + 1.0)).fract() - 0.5;
                    }
                    let l = norm(&v);
                    v.iter().map(|x| x / l).collect()
                })
                .collect()
        }
    }
}

pub fn ellipticity_diagnostics(a: &SpectralDensity, s: f64, cfg: &QuadratureConfig) -> Result<EllipticityDiagnostics> {
    a.require_nondegenerate()?;
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("order s = {s} must lie in (0, 1)"));
    }
    let n = a.dim();
    let big = sphere_quadrature(&|_: &[f64]| Ok(1.0), a, &SphereBreaks::default(), cfg)?;

    let grid = direction_grid(n, if n == 2 { 64 } else { 96 });
    let mut best: Option<(Vec<f64>, IntegralResult)> = None;
    for nu in grid {
        let r = directional_moment(a, s, &nu, cfg)?;
        if best.as_ref().is_none_or(|(_, b)| r.value < b.value) {
            best = Some((nu, r));
        }
    }
    let (mut nu, mut val) = best.expect("direction grid is nonempty");

    // One refinement pass: shrinking pattern search around the grid argmin.
    if n >= 2 {
        let mut h = if n == 2 { std::f64::consts::PI / 64.0 } else { 0.3 };
        while h > 1e-7 {
            let mut improved = false;
            for cand in neighbours(&nu, h) {
                let r = directional_moment(a, s, &cand, cfg)?;
                if r.value < val.value {
                    nu = cand;
                    val = r;
                    improved = true;
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
    }
    if !(val.value > 0.0) {
        return Err(Error::DegenerateDensity(format!("directional moment vanishes along {nu:?}")));
    }
    Ok(EllipticityDiagnostics {
        lambda_est: val.value,
        lambda_err: val.abs_error_estimate,
        lambda_direction: nu,
        big_lambda_est: big.value,
        big_lambda_err: big.abs_error_estimate,
    })
}

fn neighbours(nu: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = nu.len();
    if n == 2 {
        let phi = nu[1].atan2(nu[0]);
        return [phi - h, phi + h].iter().map(|p| vec![p.cos(), p.sin()]).collect();
    }
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        for sign in [-1.0, 1.0] {
            let mut v = nu.to_vec();
            v[i] += sign * h;
            let l = norm(&v);
            out.push(v.iter().map(|x| x / l).collect());
        }
    }
    out
}
