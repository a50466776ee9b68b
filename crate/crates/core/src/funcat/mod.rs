//! Closed-form test functions with exact derivatives and the geometric
//! metadata (kinks, singular points, support, growth) that the quadrature
//! needs to integrate their second differences accurately.

mod bump;

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Error, Result};

/// Value, gradient and Hessian at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl Jet {
    fn zero(n: usize) -> Self {
        Self { value: 0.0, grad: DVector::zeros(n), hess: DMatrix::zeros(n, n) }
    }

    fn scaled(mut self, c: f64) -> Self {
        self.value *= c;
        self.grad *= c;
        self.hess *= c;
        self
    }
}

/// A surface across which a function, or one of its derivatives, changes
/// character. `hard` surfaces are genuine kinks or jumps; soft ones (bump
/// plateau and support spheres) are C^∞ but non-analytic and only used to
/// split quadrature intervals.
#[derive(Debug, Clone, PartialEq)]
pub enum KinkSurface {
    /// `{x_N = level}`.
    Plane { level: f64, hard: bool },
    Sphere { center: Vec<f64>, radius: f64, hard: bool },
}

impl KinkSurface {
    pub fn is_hard(&self) -> bool {
        match self {
            KinkSurface::Plane { hard, .. } | KinkSurface::Sphere { hard, .. } => *hard,
        }
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            KinkSurface::Plane { level, .. } => (x[x.len() - 1] - level).abs(),
            KinkSurface::Sphere { center, radius, .. } => (dist(x, center) - radius).abs(),
        }
    }

    /// Positive `t` with `x + tθ` or `x − tθ` on the surface.
    fn crossing_times(&self, x: &[f64], theta: &[f64], out: &mut Vec<f64>) {
        match self {
            KinkSurface::Plane { level, .. } => {
                let tn = theta[theta.len() - 1];
                if tn != 0.0 {
                    let t = (x[x.len() - 1] - level).abs() / tn.abs();
                    if t > 0.0 {
                        out.push(t);
                    }
                }
            }
            KinkSurface::Sphere { center, radius, .. } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                let b = dot(theta, &d);
                let c = dot(&d, &d) - radius * radius;
                // t² ± 2bt + c = 0 for the two rays.
                let disc = b * b - c;
                if disc < 0.0 {
                    return;
                }
                let sq = disc.sqrt();
                for t in [-b - sq, -b + sq, b - sq, b + sq] {
                    if t > 0.0 {
                        out.push(t);
                    }
                }
            }
        }
    }

    fn shifted_down(&self) -> Self {
        match self {
            KinkSurface::Plane { level, hard } => KinkSurface::Plane { level: level - 1.0, hard: *hard },
            KinkSurface::Sphere { center, radius, hard } => {
                let mut c = center.clone();
                let n = c.len();
                c[n - 1] -= 1.0;
                KinkSurface::Sphere { center: c, radius: *radius, hard: *hard }
            }
        }
    }

    fn scaled(&self, r: f64) -> Self {
        match self {
            KinkSurface::Plane { level, hard } => KinkSurface::Plane { level: level * r, hard: *hard },
            KinkSurface::Sphere { center, radius, hard } => KinkSurface::Sphere {
                center: center.iter().map(|c| c * r).collect(),
                radius: radius * r,
                hard: *hard,
            },
        }
    }

    fn reaches_upper_half_space(&self) -> bool {
        match self {
            KinkSurface::Plane { level, .. } => *level >= 0.0,
            KinkSurface::Sphere { center, radius, .. } => center[center.len() - 1] + radius > 0.0,
        }
    }
}

/// `|f(x)| ≤ beta·(1 + |x|^{2s − delta})` for `|x| ≥ valid_from`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub beta: f64,
    pub delta: f64,
    pub valid_from: f64,
}

/// `|f(x)| ≤ coefficient·|x|^{−exponent}` for all `x ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decay {
    pub coefficient: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogFunction {
    Zero,
    Constant(f64),
    /// `(x_N)₊^α`.
    HalfSpacePower { alpha: f64 },
    /// `(x_N)₊^α / |x|^exponent`, with `exponent = N − 2s + 2α`.
    KelvinHalfSpacePower { alpha: f64, exponent: f64 },
    /// Smooth radial bump: 1 on `|x − c| ≤ r_in`, 0 on `|x − c| ≥ r_out`.
    Bump { center: Vec<f64>, r_in: f64, r_out: f64 },
    Product(Box<CatalogFunction>, Box<CatalogFunction>),
    /// `x ↦ f(x / R)`.
    Rescale(Box<CatalogFunction>, f64),
    /// `x ↦ f(x + e_N)` on `x_N > 0`, zero elsewhere.
    TranslateTruncate(Box<CatalogFunction>),
    ScalarMultiple(f64, Box<CatalogFunction>),
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn shifted_up(x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    let n = y.len();
    y[n - 1] += 1.0;
    y
}

impl CatalogFunction {
    pub fn half_space_power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return domain(format!("half-space power exponent must be positive, got {alpha}"));
        }
        Ok(Self::HalfSpacePower { alpha })
    }

    pub fn bump(center: Vec<f64>, r_in: f64, r_out: f64) -> Result<Self> {
        if center.is_empty() {
            return domain("bump center must have positive dimension");
        }
        if !(r_in > 0.0 && r_out > r_in) || !r_out.is_finite() {
            return domain(format!("bump radii must satisfy 0 < r_in < r_out, got ({r_in}, {r_out})"));
        }
        Ok(Self::Bump { center, r_in, r_out })
    }

    /// The bump centered at the origin with plateau radius 1 and support radius 2.
    pub fn wholespace_bump(n: usize) -> Self {
        Self::Bump { center: vec![0.0; n], r_in: 1.0, r_out: 2.0 }
    }

    pub fn product(f: Self, g: Self) -> Self {
        Self::Product(Box::new(f), Box::new(g))
    }

    pub fn scalar(eps: f64, f: Self) -> Self {
        Self::ScalarMultiple(eps, Box::new(f))
    }

    /// Evaluate with a step in `x_N`: `f(x + e_N)` above the boundary, 0 below.
    pub fn translate_truncate(f: Self) -> Self {
        Self::TranslateTruncate(Box::new(f))
    }

    pub fn rescale(f: Self, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return domain(format!("rescaling factor must be positive, got {r}"));
        }
        Ok(Self::Rescale(Box::new(f), r))
    }

    /// The function `(x_N)₊^α / |x|^{N−2s+2α}`, for `0 < α < s`.
    pub fn kelvin(alpha: f64, n: usize, s: f64) -> Result<Self> {
        if n == 0 || !(s > 0.0 && s < 1.0) {
            return domain(format!("need N ≥ 1 and 0 < s < 1, got N = {n}, s = {s}"));
        }
        if !(alpha > 0.0 && alpha < s) {
            return domain(format!("Kelvin exponent alpha = {alpha} must lie in (0, s) = (0, {s})"));
        }
        Ok(Self::KelvinHalfSpacePower { alpha, exponent: n as f64 - 2.0 * s + 2.0 * alpha })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = x.len();
        match self {
            Self::Zero => 0.0,
            Self::Constant(c) => *c,
            Self::HalfSpacePower { alpha } => {
                let xn = x[n - 1];
                if xn > 0.0 {
                    xn.powf(*alpha)
                } else {
                    0.0
                }
            }
            Self::KelvinHalfSpacePower { alpha, exponent } => {
                let xn = x[n - 1];
                if xn > 0.0 {
                    xn.powf(*alpha) * norm(x).powf(-exponent)
                } else {
                    0.0
                }
            }
            Self::Bump { center, r_in, r_out } => {
                let r = dist(x, center);
                bump::step((r - r_in) / (r_out - r_in)).0
            }
            Self::Product(f, g) => f.eval(x) * g.eval(x),
            Self::Rescale(f, r) => {
                let y: Vec<f64> = x.iter().map(|v| v / r).collect();
                f.eval(&y)
            }
            Self::TranslateTruncate(f) => {
                if x[n - 1] > 0.0 {
                    f.eval(&shifted_up(x))
                } else {
                    0.0
                }
            }
            Self::ScalarMultiple(eps, f) => eps * f.eval(x),
        }
    }

    /// Value, gradient and Hessian; refused on hard kinks and singular points.
    pub fn jet(&self, x: &[f64]) -> Result<Jet> {
        if self.is_nonsmooth_at(x) {
            return Err(Error::NonsmoothPoint(format!("{x:?}")));
        }
        Ok(self.jet_unchecked(x))
    }

    pub fn grad(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.jet(x).map(|j| j.grad)
    }

    pub fn hess(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.jet(x).map(|j| j.hess)
    }

    fn jet_unchecked(&self, x: &[f64]) -> Jet {
        let n = x.len();
        match self {
            Self::Zero => Jet::zero(n),
            Self::Constant(c) => Jet { value: *c, ..Jet::zero(n) },
            Self::HalfSpacePower { alpha } => {
                let xn = x[n - 1];
                let mut j = Jet::zero(n);
                if xn > 0.0 {
                    let a = *alpha;
                    j.value = xn.powf(a);
                    j.grad[n - 1] = a * xn.powf(a - 1.0);
                    j.hess[(n - 1, n - 1)] = a * (a - 1.0) * xn.powf(a - 2.0);
                }
                j
            }
            Self::KelvinHalfSpacePower { alpha, exponent } => {
                let xn = x[n - 1];
                if xn <= 0.0 {
                    return Jet::zero(n);
                }
                let (a, k) = (*alpha, *exponent);
                let xv = DVector::from_column_slice(x);
                let r2 = xv.norm_squared();
                let big_a = xn.powf(a);
                let mut grad_a = DVector::zeros(n);
                grad_a[n - 1] = a * xn.powf(a - 1.0);
                let mut hess_a = DMatrix::zeros(n, n);
                hess_a[(n - 1, n - 1)] = a * (a - 1.0) * xn.powf(a - 2.0);
                let big_b = r2.powf(-0.5 * k);
                let grad_b = &xv * (-k * r2.powf(-0.5 * k - 1.0));
                let hess_b = DMatrix::identity(n, n) * (-k * r2.powf(-0.5 * k - 1.0))
                    + &xv * xv.transpose() * (k * (k + 2.0) * r2.powf(-0.5 * k - 2.0));
                let hess = &hess_b * big_a
                    + &hess_a * big_b
                    + &grad_a * grad_b.transpose()
                    + &grad_b * grad_a.transpose();
                Jet { value: big_a * big_b, grad: &grad_a * big_b + &grad_b * big_a, hess }
            }
            Self::Bump { center, r_in, r_out } => {
                let d = DVector::from_iterator(n, x.iter().zip(center).map(|(a, b)| a - b));
                let r = d.norm();
                let w = r_out - r_in;
                let (v, s1, s2) = bump::step((r - r_in) / w);
                let mut j = Jet { value: v, ..Jet::zero(n) };
                if s1 != 0.0 || s2 != 0.0 {
                    let u = d / r;
                    let uu = &u * u.transpose();
                    j.grad = &u * (s1 / w);
                    j.hess = &uu * (s2 / (w * w)) + (DMatrix::identity(n, n) - &uu) * (s1 / (w * r));
                }
                j
            }
            Self::Product(f, g) => {
                let a = f.jet_unchecked(x);
                let b = g.jet_unchecked(x);
                Jet {
                    value: a.value * b.value,
                    grad: &a.grad * b.value + &b.grad * a.value,
                    hess: &a.hess * b.value
                        + &b.hess * a.value
                        + &a.grad * b.grad.transpose()
                        + &b.grad * a.grad.transpose(),
                }
            }
            Self::Rescale(f, r) => {
                let y: Vec<f64> = x.iter().map(|v| v / r).collect();
                let j = f.jet_unchecked(&y);
                Jet { value: j.value, grad: j.grad / *r, hess: j.hess / (r * r) }
            }
            Self::TranslateTruncate(f) => {
                if x[n - 1] > 0.0 {
                    f.jet_unchecked(&shifted_up(x))
                } else {
                    Jet::zero(n)
                }
            }
            Self::ScalarMultiple(eps, f) => f.jet_unchecked(x).scaled(*eps),
        }
    }

    pub fn kink_surfaces(&self) -> Vec<KinkSurface> {
        match self {
            Self::Zero | Self::Constant(_) => vec![],
            Self::HalfSpacePower { .. } | Self::KelvinHalfSpacePower { .. } => {
                vec![KinkSurface::Plane { level: 0.0, hard: true }]
            }
            Self::Bump { center, r_in, r_out } => vec![
                KinkSurface::Sphere { center: center.clone(), radius: *r_in, hard: false },
                KinkSurface::Sphere { center: center.clone(), radius: *r_out, hard: false },
            ],
            Self::Product(f, g) => {
                let mut v = f.kink_surfaces();
                for k in g.kink_surfaces() {
                    if !v.contains(&k) {
                        v.push(k);
                    }
                }
                v
            }
            Self::Rescale(f, r) => f.kink_surfaces().iter().map(|k| k.scaled(*r)).collect(),
            Self::TranslateTruncate(f) => {
                let mut v: Vec<KinkSurface> = f
                    .kink_surfaces()
                    .iter()
                    .map(KinkSurface::shifted_down)
                    .filter(|k| k.reaches_upper_half_space())
                    .collect();
                let plane = KinkSurface::Plane { level: 0.0, hard: true };
                if let Some(p) = v.iter_mut().find(|k| matches!(k, KinkSurface::Plane { level, .. } if *level == 0.0)) {
                    *p = plane;
                } else {
                    v.push(plane);
                }
                v
            }
            Self::ScalarMultiple(_, f) => f.kink_surfaces(),
        }
    }

    /// Points where the function is unbounded.
    pub fn singular_points(&self, n: usize) -> Vec<Vec<f64>> {
        match self {
            Self::KelvinHalfSpacePower { .. } => vec![vec![0.0; n]],
            Self::Product(f, g) => {
                let mut v = f.singular_points(n);
                v.extend(g.singular_points(n));
                v
            }
            Self::Rescale(f, r) => f.singular_points(n).into_iter().map(|p| p.iter().map(|c| c * r).collect()).collect(),
            Self::TranslateTruncate(f) => f
                .singular_points(n)
                .into_iter()
                .map(|mut p| {
                    p[n - 1] -= 1.0;
                    p
                })
                .filter(|p| p[n - 1] > 0.0)
                .collect(),
            Self::ScalarMultiple(_, f) => f.singular_points(n),
            _ => vec![],
        }
    }

    pub fn is_nonsmooth_at(&self, x: &[f64]) -> bool {
        let tol = 1e-12 * (1.0 + norm(x));
        self.kink_surfaces().iter().any(|k| k.is_hard() && k.distance(x) <= tol)
            || self.singular_points(x.len()).iter().any(|p| dist(x, p) <= tol)
    }

    /// Distance from `x` to the nearest hard kink or singular point, capped at 1.
    pub fn local_scale(&self, x: &[f64]) -> f64 {
        let mut rho: f64 = 1.0;
        for k in self.kink_surfaces().iter().filter(|k| k.is_hard()) {
            rho = rho.min(k.distance(x));
        }
        for p in self.singular_points(x.len()) {
            rho = rho.min(dist(x, &p));
        }
        rho
    }

    /// Sorted positive `t` at which `t ↦ f(x + tθ) + f(x − tθ)` crosses a kink surface.
    pub fn kink_times(&self, x: &[f64], theta: &[f64]) -> Vec<f64> {
        let mut out = Vec::new();
        for k in self.kink_surfaces() {
            k.crossing_times(x, theta, &mut out);
        }
        sort_dedup(out)
    }

    /// Sorted positive `t` at which either ray passes closest to a singular point.
    pub fn singular_times(&self, x: &[f64], theta: &[f64]) -> Vec<f64> {
        let out = self
            .singular_points(x.len())
            .iter()
            .map(|p| {
                let d: Vec<f64> = p.iter().zip(x).map(|(a, b)| a - b).collect();
                dot(theta, &d).abs()
            })
            .filter(|t| *t > 0.0)
            .collect();
        sort_dedup(out)
    }

    /// A ball outside which the function vanishes, if any.
    pub fn support_ball(&self) -> Option<(Vec<f64>, f64)> {
        match self {
            Self::Bump { center, r_out, .. } => Some((center.clone(), *r_out)),
            Self::Product(f, g) => match (f.support_ball(), g.support_ball()) {
                (Some(a), Some(b)) => Some(if a.1 <= b.1 { a } else { b }),
                (a, b) => a.or(b),
            },
            Self::Rescale(f, r) => f.support_ball().map(|(c, rad)| (c.iter().map(|v| v * r).collect(), rad * r)),
            Self::TranslateTruncate(f) => f.support_ball().map(|(mut c, rad)| {
                let n = c.len();
                c[n - 1] -= 1.0;
                (c, rad)
            }),
            Self::ScalarMultiple(_, f) => f.support_ball(),
            _ => None,
        }
    }

    /// True when the function is zero on the closed lower half-space `{x_N ≤ 0}`.
    pub fn vanishes_below(&self) -> bool {
        match self {
            Self::Zero | Self::HalfSpacePower { .. } | Self::KelvinHalfSpacePower { .. } | Self::TranslateTruncate(_) => true,
            Self::Constant(c) => *c == 0.0,
            Self::Bump { center, r_out, .. } => center[center.len() - 1] >= *r_out,
            Self::Product(f, g) => f.vanishes_below() || g.vanishes_below(),
            Self::Rescale(f, _) | Self::ScalarMultiple(_, f) => f.vanishes_below(),
        }
    }

    /// Growth bound placing the function in the class `𝓛_s`.
    pub fn growth(&self, s: f64) -> Result<Growth> {
        let bounded = |beta: f64| Growth { beta, delta: 2.0 * s, valid_from: 0.0 };
        let g = match self {
            Self::Zero => bounded(0.0),
            Self::Constant(c) => bounded(c.abs()),
            Self::HalfSpacePower { alpha } => {
                if *alpha >= 2.0 * s {
                    return domain(format!("(x_N)^alpha with alpha = {alpha} ≥ 2s is outside the growth class"));
                }
                Growth { beta: 1.0, delta: 2.0 * s - alpha, valid_from: 0.0 }
            }
            Self::KelvinHalfSpacePower { .. } => Growth { beta: 1.0, delta: 2.0 * s, valid_from: 1.0 },
            Self::Bump { .. } => bounded(1.0),
            Self::Product(f, g) => {
                let (a, b) = (f.growth(s)?, g.growth(s)?);
                let (ea, eb) = ((2.0 * s - a.delta).max(0.0), (2.0 * s - b.delta).max(0.0));
                let valid_from = a.valid_from.max(b.valid_from);
                match self.support_ball() {
                    Some((c, r)) => {
                        let reach = norm(&c) + r;
                        Growth { beta: 4.0 * a.beta * b.beta * (1.0 + reach.powf(ea + eb)), delta: 2.0 * s, valid_from }
                    }
                    None => {
                        let delta = 2.0 * s - ea - eb;
                        if delta <= 0.0 {
                            return domain("product grows too fast for the operator to be defined");
                        }
                        Growth { beta: 4.0 * a.beta * b.beta, delta, valid_from }
                    }
                }
            }
            Self::Rescale(f, r) => {
                let a = f.growth(s)?;
                let e = 2.0 * s - a.delta;
                Growth { beta: a.beta * r.powf(-e).max(1.0), delta: a.delta, valid_from: a.valid_from * r }
            }
            Self::TranslateTruncate(f) => {
                let a = f.growth(s)?;
                let e = (2.0 * s - a.delta).max(0.0);
                // x_N > 0 forces |x + e_N| > 1.
                let valid_from = if a.valid_from <= 1.0 { 0.0 } else { a.valid_from + 1.0 };
                Growth { beta: a.beta * (1.0 + 2f64.powf(e)), delta: a.delta, valid_from }
            }
            Self::ScalarMultiple(eps, f) => {
                let a = f.growth(s)?;
                Growth { beta: a.beta * eps.abs(), ..a }
            }
        };
        Ok(g)
    }

    /// Power-law decay at infinity, if known. Compactly supported functions
    /// report `None`; use [`CatalogFunction::support_ball`] for them.
    pub fn decay(&self) -> Option<Decay> {
        match self {
            Self::KelvinHalfSpacePower { alpha, exponent } => {
                Some(Decay { coefficient: 1.0, exponent: exponent - alpha }).filter(|d| d.exponent > 0.0)
            }
            // |x + e_N| ≥ |x| on the upper half-space, so the bound carries over.
            Self::TranslateTruncate(f) => match f.as_ref() {
                Self::KelvinHalfSpacePower { .. } | Self::ScalarMultiple(..) => f.decay(),
                _ => None,
            },
            Self::ScalarMultiple(eps, f) => f.decay().map(|d| Decay { coefficient: d.coefficient * eps.abs(), ..d }),
            Self::Rescale(f, r) => f.decay().map(|d| Decay { coefficient: d.coefficient * r.powf(d.exponent), ..d }),
            Self::Product(f, g) => match (f.decay(), g.decay()) {
                (Some(a), Some(b)) => Some(Decay { coefficient: a.coefficient * b.coefficient, exponent: a.exponent + b.exponent }),
                _ => None,
            },
            _ => None,
        }
    }

    /// Whether `f(x)` depends on `x` only through `|x'|` and `x_N`.
    pub fn is_axially_symmetric(&self) -> bool {
        match self {
            Self::Zero | Self::Constant(_) | Self::HalfSpacePower { .. } | Self::KelvinHalfSpacePower { .. } => true,
            Self::Bump { center, .. } => center[..center.len() - 1].iter().all(|c| *c == 0.0),
            Self::Product(f, g) => f.is_axially_symmetric() && g.is_axially_symmetric(),
            Self::Rescale(f, _) | Self::ScalarMultiple(_, f) | Self::TranslateTruncate(f) => f.is_axially_symmetric(),
        }
    }

    /// Degree `d` with `f(λx) = λ^d f(x)` for `λ > 0`, if the function is homogeneous.
    pub fn homogeneity_degree(&self) -> Option<f64> {
        match self {
            Self::Zero | Self::Constant(_) => Some(0.0),
            Self::HalfSpacePower { alpha } => Some(*alpha),
            Self::KelvinHalfSpacePower { alpha, exponent } => Some(alpha - exponent),
            Self::Product(f, g) => Some(f.homogeneity_degree()? + g.homogeneity_degree()?),
            Self::Rescale(f, _) | Self::ScalarMultiple(_, f) => f.homogeneity_degree(),
            Self::Bump { .. } | Self::TranslateTruncate(_) => None,
        }
    }

    /// Dimension implied by stored coordinates, if any.
    pub fn dim_hint(&self) -> Option<usize> {
        match self {
            Self::Bump { center, .. } => Some(center.len()),
            Self::Product(f, g) => f.dim_hint().or_else(|| g.dim_hint()),
            Self::Rescale(f, _) | Self::TranslateTruncate(f) | Self::ScalarMultiple(_, f) => f.dim_hint(),
            _ => None,
        }
    }

    /// True when the function has a hard kink on `{x_N = 0}`.
    pub fn has_boundary_kink(&self) -> bool {
        self.kink_surfaces()
            .iter()
            .any(|k| matches!(k, KinkSurface::Plane { level, hard: true } if *level == 0.0))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Constant(c) => *c == 0.0,
            Self::ScalarMultiple(eps, f) => *eps == 0.0 || f.is_zero(),
            Self::Product(f, g) => f.is_zero() || g.is_zero(),
            Self::Rescale(f, _) | Self::TranslateTruncate(f) => f.is_zero(),
            _ => false,
        }
    }

    /// True when every second difference vanishes (constants).
    pub fn is_constant(&self) -> bool {
        match self {
            Self::Zero | Self::Constant(_) => true,
            Self::ScalarMultiple(eps, f) => *eps == 0.0 || f.is_constant(),
            Self::Rescale(f, _) => f.is_constant(),
            Self::Product(f, g) => f.is_zero() || g.is_zero() || (f.is_constant() && g.is_constant()),
            _ => false,
        }
    }
}

fn sort_dedup(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1e-300));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_space_power_values() {
        let f = CatalogFunction::half_space_power(0.5).unwrap();
        assert_eq!(f.eval(&[3.0, -1.0]), 0.0);
        assert_eq!(f.eval(&[0.0, 4.0]), 2.0);
    }

    #[test]
    fn kelvin_values() {
        let k = CatalogFunction::kelvin(0.25, 2, 0.5).unwrap();
        assert!((k.eval(&[0.0, 1.0]) - 1.0).abs() < 1e-15);
        assert!((k.eval(&[0.0, 2.0]) - 2f64.powf(-1.25)).abs() < 1e-15);
        assert_eq!(k.eval(&[1.0, 0.0]), 0.0);
        assert_eq!(k.eval(&[0.0, 0.0]), 0.0);
        assert!(CatalogFunction::kelvin(0.6, 2, 0.5).is_err());
    }

    #[test]
    fn translate_truncate_of_constant_and_power() {
        let g = CatalogFunction::translate_truncate(CatalogFunction::Constant(1.0));
        assert_eq!(g.eval(&[0.0, 0.5]), 1.0);
        assert_eq!(g.eval(&[0.0, -0.5]), 0.0);
        let h = CatalogFunction::translate_truncate(CatalogFunction::half_space_power(0.5).unwrap());
        for &(a, b) in &[(0.0, 0.1), (1.0, 2.0), (-3.0, 0.7), (2.0, -0.2), (0.0, 5.0)] {
            let expect = if b > 0.0 { (b + 1.0f64).powf(0.5) } else { 0.0 };
            assert_eq!(h.eval(&[a, b]), expect);
        }
        assert!(h.has_boundary_kink());
    }

    #[test]
    fn rescaling() {
        let b = CatalogFunction::rescale(CatalogFunction::wholespace_bump(2), 3.0).unwrap();
        assert_eq!(b.eval(&[0.0, 3.0]), 1.0);
        assert_eq!(b.eval(&[6.0, 0.0]), 0.0);
        let p = CatalogFunction::rescale(CatalogFunction::half_space_power(0.3).unwrap(), 2.0).unwrap();
        let q = CatalogFunction::half_space_power(0.3).unwrap();
        assert!((p.eval(&[1.0, 3.0]) - 2f64.powf(-0.3) * q.eval(&[1.0, 3.0])).abs() < 1e-15);
        assert!(CatalogFunction::rescale(q, 0.0).is_err());
    }

    #[test]
    fn kink_times_examples() {
        let f = CatalogFunction::half_space_power(0.3).unwrap();
        assert_eq!(f.kink_times(&[0.0, 2.0], &[0.0, 1.0]), vec![2.0]);
        assert!(f.kink_times(&[0.0, 2.0], &[1.0, 0.0]).is_empty());
        let b = CatalogFunction::wholespace_bump(2);
        assert_eq!(b.kink_times(&[0.0, 0.0], &[0.6, 0.8]), vec![1.0, 2.0]);
    }

    #[test]
    fn derivatives_refused_on_kinks() {
        let f = CatalogFunction::half_space_power(0.3).unwrap();
        assert!(matches!(f.grad(&[1.0, 0.0]), Err(Error::NonsmoothPoint(_))));
        let k = CatalogFunction::kelvin(0.25, 2, 0.5).unwrap();
        assert!(k.hess(&[0.0, 0.0]).is_err());
        assert!(CatalogFunction::wholespace_bump(2).hess(&[1.0, 0.0]).is_ok());
    }

    #[test]
    fn growth_rejects_large_powers() {
        let f = CatalogFunction::half_space_power(1.2).unwrap();
        assert!(f.growth(0.5).is_err());
        assert!(f.growth(0.7).is_ok());
    }
}
