//! Gauss-Legendre rules and graded panel layouts for tensor-product integration.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A one-dimensional composite rule: flattened nodes and weights over panels.
#[derive(Debug, Clone, Default)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    /// Applies an `order`-point Gauss rule on each consecutive pair of `breaks`.
    pub fn from_breaks(breaks: &[f64], order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let mut rule = CompositeRule::default();
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if !(b > a) {
                continue;
            }
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            for (xi, wi) in x.iter().zip(&w) {
                rule.nodes.push(c + h * xi);
                rule.weights.push(h * wi);
            }
        }
        rule
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Breakpoints `lo = b_0 < ... < b_k = hi` that shrink geometrically (ratio
/// `ratio`) toward `lo`, with at least `min_panels` panels.
pub fn graded_toward_lo(lo: f64, hi: f64, ratio: f64, min_panels: usize) -> Vec<f64> {
    let mut pts = vec![hi];
    let mut width = hi - lo;
    for _ in 0..min_panels.max(1) - 1 {
        width /= ratio;
        pts.push(lo + width);
    }
    pts.push(lo);
    pts.reverse();
    pts
}

/// Breakpoints that grow geometrically from `lo` out to `hi` starting with
/// panel width `h0`.
pub fn geometric_outward(lo: f64, hi: f64, h0: f64, ratio: f64) -> Vec<f64> {
    let mut pts = vec![lo];
    let mut x = lo;
    let mut h = h0;
    while x + h < hi {
        x += h;
        pts.push(x);
        h *= ratio;
    }
    pts.push(hi);
    pts
}

/// Sorted union of break lists with near-duplicates removed.
pub fn merge_breaks(mut pts: Vec<f64>) -> Vec<f64> {
    pts.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last() {
            Some(&q) if (p - q).abs() <= 1e-12 * (1.0 + p.abs()) => {}
            _ => out.push(p),
        }
    }
    out
}
