//! Globally adaptive Gauss-Kronrod (7/15) integration over a list of pieces.
//!
//! Every piece carries its own integrand, so substitution-mapped tails and
//! plain finite segments share a single error budget: the interval with the
//! largest local error is bisected first, whatever piece it belongs to.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::IntegralResult;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One integration piece: `f` integrated over `[a, b]`.
pub struct Piece<'a> {
    pub f: &'a dyn Fn(f64) -> f64,
    pub a: f64,
    pub b: f64,
}

impl<'a> Piece<'a> {
    pub fn new(f: &'a dyn Fn(f64) -> f64, a: f64, b: f64) -> Self {
        Self { f, a, b }
    }
}

/// Tolerances and budget for [`integrate_pieces`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// 15-point Kronrod estimate with the QUADPACK error heuristic. The second
/// component of `f` is an auxiliary integrand that rides along with the
/// Kronrod weights and does not steer adaptivity.
fn kronrod15(f: &dyn Fn(f64) -> (f64, f64), a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (fc, ac) = f(center);
    let mut res_k = fc * WGK[7];
    let mut aux = ac * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, a1) = f(center - dx);
        let (f2, a2) = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        aux += WGK[j] * (a1 + a2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let aux = aux * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() || !err.is_finite() {
        return (value, f64::INFINITY, aux);
    }
    (value, err, aux)
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    piece: usize,
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    aux: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrates the sum of all pieces to the requested tolerance.
///
/// Empty or reversed pieces contribute nothing. When the budget runs out the
/// best estimate is returned with `converged == false`.
pub fn integrate_pieces(pieces: &[Piece<'_>], tol: Tolerance) -> IntegralResult {
    let wrapped: Vec<Box<dyn Fn(f64) -> (f64, f64) + '_>> =
        pieces.iter().map(|p| Box::new(move |t: f64| ((p.f)(t), 0.0)) as Box<dyn Fn(f64) -> (f64, f64)>).collect();
    let aux: Vec<AuxPiece> =
        pieces.iter().zip(&wrapped).map(|(p, f)| AuxPiece { f: f.as_ref(), a: p.a, b: p.b }).collect();
    integrate_pieces_aux(&aux, tol).0
}

/// A piece whose integrand also returns an auxiliary value.
pub struct AuxPiece<'a> {
    pub f: &'a dyn Fn(f64) -> (f64, f64),
    pub a: f64,
    pub b: f64,
}

/// Like [`integrate_pieces`], additionally returning the integral of the
/// auxiliary component over the final partition.
pub fn integrate_pieces_aux(pieces: &[AuxPiece<'_>], tol: Tolerance) -> (IntegralResult, f64) {
    let mut heap = BinaryHeap::new();
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    let mut frozen_aux = 0.0;
    let mut n_evals = 0usize;
    for (i, p) in pieces.iter().enumerate() {
        if !(p.b > p.a) {
            continue;
        }
        let (value, err, aux) = kronrod15(p.f, p.a, p.b);
        n_evals += 15;
        heap.push(Interval { piece: i, a: p.a, b: p.b, value, err, aux });
    }
    let mut subdivisions = heap.len();
    let totals = |heap: &BinaryHeap<Interval>, fv: f64, fe: f64, fa: f64| {
        heap.iter().fold((fv, fe, fa), |(v, e, x), iv| (v + iv.value, e + iv.err, x + iv.aux))
    };
    loop {
        let (value, err, aux) = totals(&heap, frozen_value, frozen_err, frozen_aux);
        if err <= tol.target(value) {
            return (IntegralResult { value, abs_error_estimate: err, n_evals, converged: true }, aux);
        }
        let worst = match heap.pop() {
            Some(w) => w,
            None => {
                return (IntegralResult { value, abs_error_estimate: err, n_evals, converged: false }, aux);
            }
        };
        if subdivisions >= tol.max_subdivisions || !worst.err.is_finite() {
            return (IntegralResult { value, abs_error_estimate: err, n_evals, converged: false }, aux);
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 1e-14 * worst.a.abs().max(worst.b.abs()) {
            // Cannot be resolved further in floating point.
            frozen_value += worst.value;
            frozen_err += worst.err;
            frozen_aux += worst.aux;
            continue;
        }
        let f = pieces[worst.piece].f;
        let (v1, e1, x1) = kronrod15(f, worst.a, mid);
        let (v2, e2, x2) = kronrod15(f, mid, worst.b);
        n_evals += 30;
        subdivisions += 1;
        heap.push(Interval { piece: worst.piece, a: worst.a, b: mid, value: v1, err: e1, aux: x1 });
        heap.push(Interval { piece: worst.piece, a: mid, b: worst.b, value: v2, err: e2, aux: x2 });
    }
}

/// Convenience wrapper for a single finite interval.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> IntegralResult {
    integrate_pieces(&[Piece::new(f, a, b)], tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance { abs: 1e-13, rel: 1e-12, max_subdivisions: 500 }
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(&|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, tol());
        assert!((r.value - (15.0 / 4.0 - 3.0 + 3.0)).abs() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate(&|x: f64| x.powf(-0.5), 0.0, 1.0, tol());
        assert!((r.value - 2.0).abs() < 1e-10, "{:?}", r);
    }

    #[test]
    fn pieces_share_budget() {
        let f = |x: f64| x.sin();
        let g = |x: f64| x.exp();
        let r = integrate_pieces(
            &[Piece::new(&f, 0.0, std::f64::consts::PI), Piece::new(&g, 0.0, 1.0)],
            tol(),
        );
        assert!((r.value - (2.0 + std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = integrate(
            &|x: f64| (1.0 / x).sin() / x,
            1e-6,
            1.0,
            Tolerance { abs: 1e-14, rel: 1e-14, max_subdivisions: 5 },
        );
        assert!(!r.converged);
        assert!(r.abs_error_estimate > 0.0);
    }
}
