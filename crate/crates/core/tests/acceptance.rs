//! Twelve acceptance checks, run in sequence. Each prints one line:
//! `criterion <k> PASS|FAIL <details>`. The process fails if any check does.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stable_cone::funcat::CatalogFunction;
use stable_cone::liouville::{
    construct_supersolution, critical_exponents, envelope_exponent, gamma_search, liouville_scan,
    step_one_m, wholespace_envelope_exponent, GammaSearchConfig, ScanConfig, ScanMode, StepOneConfig,
};
use stable_cone::operator::{apply_l, apply_l_halfspace_power, apply_l_numeric, correction_l, correction_l_boundary};
use stable_cone::quad::{c_alpha, QuadratureConfig};
use stable_cone::spectral::{weighted_sphere_moment, Cone, SpectralDensity};
use stable_cone::Error;

type Outcome = (bool, String);

fn unit(n: usize) -> SpectralDensity {
    SpectralDensity::constant(n, 1.0).unwrap()
}

fn cone_density() -> SpectralDensity {
    SpectralDensity::cone_plateau(Cone::centered(vec![0.0, 1.0], 0.3).unwrap(), 1.0, 0.25).unwrap()
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e <= limit, format!("{:.1}s of {}s", e.as_secs_f64(), limit.as_secs()))
}

fn c1_sign_trichotomy() -> Outcome {
    let cfg = QuadratureConfig::default();
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut worst_cs: f64 = 0.0;
    for s in [0.3, 0.5, 0.7] {
        for k in (1..=9).filter(|k| *k != 5) {
            let alpha = k as f64 / 10.0 * 2.0 * s;
            let c = c_alpha(alpha, s, &cfg).unwrap().value;
            if c.signum() != (alpha - s).signum() || c == 0.0 {
                bad.push(format!("s={s} α={alpha} c={c:e}"));
            }
        }
        worst_cs = worst_cs.max(c_alpha(s, s, &cfg).unwrap().value.abs());
    }
    let (fast, time) = within(t, Duration::from_secs(5));
    (bad.is_empty() && worst_cs <= 1e-8 && fast, format!("wrong signs {bad:?}, max |c_s| = {worst_cs:.2e}, {time}"))
}

fn c2_closed_form_vs_numeric() -> Outcome {
    let cfg = QuadratureConfig::default();
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let points: Vec<[f64; 2]> = (0..20).map(|_| [rng.random_range(-3.0..3.0), rng.random_range(0.1..5.0)]).collect();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for a in [unit(2), cone_density()] {
        for alpha in [0.2, 0.5, 0.8] {
            for x in &points {
                let closed = apply_l_halfspace_power(&a, 0.5, alpha, x, &cfg).unwrap().value;
                let f = CatalogFunction::half_space_power(alpha).unwrap();
                let num = apply_l_numeric(&a, 0.5, &f, x, &cfg).unwrap().value;
                let diff = (closed - num).abs();
                if closed.abs() < 1e-10 {
                    ok &= diff <= 1e-8;
                } else {
                    let rel = diff / closed.abs();
                    worst = worst.max(rel);
                    ok &= rel <= 1e-5;
                }
            }
        }
    }
    let (fast, time) = within(t, Duration::from_secs(60));
    (ok && fast, format!("120 comparisons, worst relative {worst:.2e}, {time}"))
}

fn c3_scaling() -> Outcome {
    let cfg = QuadratureConfig::default();
    let s = 0.5;
    let a = unit(2);
    let bump = CatalogFunction::bump(vec![0.0, 1.0], 0.25, 0.75).unwrap();
    let product = CatalogFunction::product(CatalogFunction::half_space_power(0.4).unwrap(), bump.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_rel: f64 = 0.0;
    let mut over_budget = 0;
    for f in [bump, product] {
        for r in [0.5, 2.0, 10.0] {
            let fr = CatalogFunction::rescale(f.clone(), r).unwrap();
            for _ in 0..10 {
                let x = [r * rng.random_range(-1.0..1.0), r * rng.random_range(0.2..1.8)];
                let lhs = apply_l(&a, s, &fr, &x, &cfg).unwrap();
                let y = [x[0] / r, x[1] / r];
                let rhs = apply_l(&a, s, &f, &y, &cfg).unwrap();
                let k = r.powf(-2.0 * s);
                let residual = (lhs.value - k * rhs.value).abs();
                if residual > lhs.abs_error_estimate + k * rhs.abs_error_estimate {
                    over_budget += 1;
                }
                worst_rel = worst_rel.max(residual / lhs.value.abs().max(1e-300));
            }
        }
    }
    (over_budget == 0 && worst_rel <= 1e-8, format!("60 points, {over_budget} over budget, worst relative {worst_rel:.2e}"))
}

fn c4_product_rule() -> Outcome {
    let cfg = QuadratureConfig::default();
    let s = 0.5;
    let g = CatalogFunction::product(
        CatalogFunction::half_space_power(0.4).unwrap(),
        CatalogFunction::bump(vec![0.0, 1.0], 0.25, 0.75).unwrap(),
    );
    let h = CatalogFunction::bump(vec![0.3, 1.2], 0.5, 1.0).unwrap();
    let gh = CatalogFunction::product(g.clone(), h.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for a in [unit(2), cone_density()] {
        for _ in 0..20 {
            let x = [rng.random_range(-1.5..1.5), rng.random_range(0.1..2.5)];
            let lgh = apply_l(&a, s, &gh, &x, &cfg).unwrap().value;
            let lg = apply_l(&a, s, &g, &x, &cfg).unwrap().value;
            let lh = apply_l(&a, s, &h, &x, &cfg).unwrap().value;
            let l = correction_l(&a, s, &g, &h, &x, &cfg).unwrap().value;
            let (gx, hx) = (g.eval(&x), h.eval(&x));
            let scale = lgh.abs() + (gx * lh).abs() + (hx * lg).abs() + l.abs();
            let residual = (lgh - gx * lh - hx * lg - l).abs();
            if scale > 0.0 {
                worst = worst.max(residual / scale);
            }
        }
    }
    (worst <= 1e-5, format!("40 points, worst residual/scale {worst:.2e}"))
}

fn c5_kelvin() -> Outcome {
    let cfg = QuadratureConfig::default();
    let (s, alpha) = (0.5, 0.25);
    let a = unit(2);
    let w = CatalogFunction::kelvin(alpha, 2, s).unwrap();
    let big_c = c_alpha(alpha, s, &cfg).unwrap().value * weighted_sphere_moment(&a, s, &cfg).unwrap().value;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..15 {
        let r: f64 = rng.random_range(0.5..2.0);
        let lo = (0.2 / r).asin();
        let phi = rng.random_range(lo..std::f64::consts::PI - lo);
        let x = [r * phi.cos(), r * phi.sin()];
        let lw = apply_l(&a, s, &w, &x, &cfg).unwrap().value;
        let want = big_c * x[1].powf(alpha - 2.0 * s) / r.powf(2.0 - 2.0 * s + 2.0 * alpha);
        worst = worst.max((lw - want).abs() / want.abs());
    }
    (worst <= 1e-4, format!("15 points, C_α = {big_c:.12}, worst relative {worst:.2e}"))
}

fn run_cli(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_stable-cone"))
        .args(args)
        .args(["--output.dir", dir.to_str().unwrap()])
        .env_clear()
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn cell(csv: &str, col: &str) -> f64 {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == col).unwrap();
    lines.next().unwrap().split(',').nth(i).unwrap().parse().unwrap()
}

fn c6_pairing() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let (code, out) = run_cli(dir.path(), &["pair"]);
    let (fast, time) = within(t, Duration::from_secs(300));
    if code != 0 {
        return (false, format!("pair exited with {code}"));
    }
    let (iuv, ivu) = (cell(&out, "I_uLv"), cell(&out, "I_vLu"));
    let rel = (iuv - ivu).abs() / iuv.abs().max(ivu.abs());
    (rel <= 1e-3 && fast, format!("I_uLv = {iuv:.6}, I_vLu = {ivu:.6}, relative residual {rel:.2e}, {time}"))
}

fn c7_scan() -> Outcome {
    let cfg = QuadratureConfig::default();
    let sc = ScanConfig::default();
    let a = unit(2);
    let t = Instant::now();
    let half = liouville_scan(&a, 0.5, &[1.2, 1.4, 1.6, 1.7, 1.8, 1.9], ScanMode::Halfspace, &sc, &cfg).unwrap();
    let whole = liouville_scan(&a, 0.5, &[2.0, 2.3], ScanMode::Wholespace, &sc, &cfg).unwrap();
    let (fast, time) = within(t, Duration::from_secs(600));
    let mut ok = fast;
    let mut detail = Vec::new();
    for r in half.iter().chain(&whole) {
        let want = r.threshold.is_some_and(|th| r.p > th);
        let margin_ok = !want || r.min_margin.is_some_and(|m| m >= -1e-6);
        ok &= r.certified == Some(want) && margin_ok && r.n_points >= 200;
        detail.push(format!("p={} {} certified={:?} n={}", r.p, r.regime, r.certified, r.n_points));
    }
    (ok, format!("{}; {time}", detail.join(", ")))
}

fn c8_step_one() -> Outcome {
    let cfg = QuadratureConfig::default();
    let sc = StepOneConfig::default();
    let gc = GammaSearchConfig::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, a, axis, tau) in [("constant", unit(2), vec![0.0, 1.0], 1.0), ("cone", cone_density(), vec![0.0, 1.0], 0.3)] {
        let gamma = gamma_search(&axis, tau, &gc, &cfg).unwrap().gamma;
        let r = step_one_m(&a, 0.5, 0.75, gamma, &sc, &cfg).unwrap();
        ok &= r.m_est.is_finite() && r.stability <= 0.05 && r.audit_max <= 1e-8;
        detail.push(format!("{name}: M = {:.4}, stability {:.2e}, audit max {:.2e}", r.m_est, r.stability, r.audit_max));
    }
    (ok, detail.join("; "))
}

fn c9_gamma() -> Outcome {
    let cfg = QuadratureConfig::default();
    let gc = GammaSearchConfig::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for (axis, tau) in [(vec![0.0, 1.0], 1.0), (vec![0.0, 1.0], 0.1), (vec![1.0, 0.0], 0.1)] {
        match gamma_search(&axis, tau, &gc, &cfg) {
            Ok(r) => {
                ok &= r.verified && r.gamma > 0.0 && r.gamma < 1.0 && r.min_volume - r.three_sigma > 0.0 && r.n_points >= 50;
                detail.push(format!("({axis:?}, {tau}): γ = {}, min volume {:.3e} ± {:.1e} over {}", r.gamma, r.min_volume, r.three_sigma, r.n_points));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("({axis:?}, {tau}): {e}"));
            }
        }
    }
    (ok, detail.join("; "))
}

fn c10_exponents() -> Outcome {
    let cfg = QuadratureConfig::default();
    // |exponent| in units of ε times the scale set by the terms and by the
    // rounding of p, which is amplified by p²/(p − 1)² near p = 1
    let ulps = |n: usize, s: f64, p: f64, e: f64| {
        let scale = n as f64 + s + 2.0 * s * p * p / ((p - 1.0) * (p - 1.0));
        e.abs() / (scale * f64::EPSILON)
    };
    let mut worst: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    let mut count = 0;
    for n in 1..=5 {
        for s in [0.1, 0.3, 0.5, 0.9] {
            let c = critical_exponents(n, s).unwrap();
            let e = envelope_exponent(n, s, c.halfspace);
            worst = worst.max(ulps(n, s, c.halfspace, e));
            worst_abs = worst_abs.max(e.abs());
            if let Some(w) = c.wholespace {
                let e = wholespace_envelope_exponent(n, s, w);
                worst = worst.max(ulps(n, s, w, e));
                worst_abs = worst_abs.max(e.abs());
            }
            count += 1;
        }
    }
    let p = 5.0 / 3.0;
    let degenerate = matches!(construct_supersolution(2, 0.5, p, None, &cfg), Err(Error::DegenerateConstruction(_)));
    (
        count == 20 && worst <= 2.0 && degenerate,
        format!("{count} pairs, worst |exponent| {worst_abs:.1e} ({worst:.2} scaled ulps), degenerate at threshold: {degenerate}"),
    )
}

fn c11_continuity() -> Outcome {
    let cfg = QuadratureConfig::default();
    let a = unit(2);
    let phi = CatalogFunction::bump(vec![0.0, 0.5], 0.25, 0.75).unwrap();
    let x0 = [0.2, 0.0];
    let mut ok = true;
    let mut detail = Vec::new();
    for alpha in [0.3, 0.45] {
        let w = CatalogFunction::half_space_power(alpha).unwrap();
        let l = |n: i32| correction_l(&a, 0.5, &w, &phi, &[x0[0], 0.5f64.powi(n)], &cfg).unwrap().value;
        let (l19, l20, l21) = (l(19), l(20), l(21));
        let (gap20, gap21) = ((l20 - l19).abs(), (l21 - l20).abs());
        let limit = correction_l_boundary(&a, 0.5, &w, &phi, &x0, &cfg).unwrap().value;
        // geometric extrapolation of the tail, to compare with the boundary value
        let ratio = gap21 / gap20;
        let extrapolated = l21 + (l21 - l20) * ratio / (1.0 - ratio);
        ok &= gap20 <= 1e-4 && gap21 < gap20;
        detail.push(format!(
            "α={alpha}: gap at n=20 {gap20:.2e}, ratio {ratio:.3}, extrapolated limit {extrapolated:.5} vs boundary value {limit:.5}"
        ));
    }
    (ok, detail.join("; "))
}

fn c12_determinism() -> Outcome {
    let commands: [&[&str]; 5] = [
        &["calpha", "--problem.alpha", "0.1,0.25,0.4"],
        &["moment", "--density.kind", "cone", "--density.aperture", "0.3", "--density.outside", "0.25"],
        &["eval", "--function.kind", "bump_power", "--function.alpha", "0.4"],
        &["construct", "--problem.p", "1.9"],
        &["gamma", "--density.kind", "cone", "--density.aperture", "0.1"],
    ];
    let mut ok = true;
    let mut differing = Vec::new();
    for args in commands {
        let (first, second) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let (c1, out1) = run_cli(first.path(), args);
        let cfg = first.path().join("resolved.cfg");
        let (c2, out2) = run_cli(second.path(), &[args[0], "--config", cfg.to_str().unwrap()]);
        let file = format!("{}.csv", args[0]);
        let (f1, f2) = (std::fs::read(first.path().join(&file)).unwrap(), std::fs::read(second.path().join(&file)).unwrap());
        let same = c1 == 0 && c2 == 0 && out1 == out2 && f1 == f2;
        if !same {
            differing.push(args[0]);
        }
        ok &= same;
    }
    (ok, format!("{} commands rerun from resolved.cfg, differing: {differing:?}", commands.len()))
}

fn main() {
    let checks: [(u32, fn() -> Outcome); 12] = [
        (1, c1_sign_trichotomy),
        (2, c2_closed_form_vs_numeric),
        (3, c3_scaling),
        (4, c4_product_rule),
        (5, c5_kelvin),
        (6, c6_pairing),
        (7, c7_scan),
        (8, c8_step_one),
        (9, c9_gamma),
        (10, c10_exponents),
        (11, c11_continuity),
        (12, c12_determinism),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (k, check) in checks {
        if !only.is_empty() && !only.contains(&k) {
            continue;
        }
        let t = Instant::now();
        let (pass, detail) = check();
        println!("criterion {k:>2} {} [{:.1}s] {detail}", if pass { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64());
        if !pass {
            failed.push(k);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
