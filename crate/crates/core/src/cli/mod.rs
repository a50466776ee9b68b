//! Command-line front end. Each subcommand resolves a [`RunConfig`], writes
//! `resolved.cfg`, computes, and writes `<command>.csv` (plus an optional
//! SVG) into `output.dir`.
//!
//! Exit codes: 0 success, 1 other runtime failure, 2 invalid configuration
//! or degenerate input, 3 failed `--expect`, 4 accuracy budget exhausted.

pub mod config;
pub mod csv;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::funcat::CatalogFunction;
use crate::liouville::{
    certify, construct_for_density, construct_supersolution, gamma_search, liouville_scan, rescaled_inequality_experiment,
    step_one_m, CertifyTolerance, GammaSearchConfig, RescaledConfig, Sampler, ScanConfig, ScanMode, StepOneConfig,
};
use crate::operator::{apply_l, correction_l, pairing, PairingConfig};
use crate::quad::{c_alpha, QuadratureConfig};
use crate::spectral::{weighted_sphere_moment, Cone, DensityKind, SpectralDensity};
pub use config::{ConfigError, RunConfig};
use csv::{Cell, Table};

#[derive(Parser, Debug)]
#[command(name = "stable-cone", version, about = "Nonlocal operator experiments with reproducible CSV output")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Overrides {
    /// `--config <path>`, `--expect <check>`, and `--section.key value` overrides.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0..)]
    args: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One-dimensional constant c_α for each value of problem.alpha.
    Calpha(Overrides),
    /// Weighted sphere moment of the density.
    Moment(Overrides),
    /// Lu at the points in problem.x.
    Eval(Overrides),
    /// Scaling, product-rule and Kelvin identity residuals.
    Identity(Overrides),
    /// Self-adjointness check ∫u·Lv = ∫v·Lu.
    Pair(Overrides),
    /// Pointwise check of −Lu ≥ u^p on the sampler.
    Certify(Overrides),
    /// Explicit supersolution parameters for problem.p.
    Construct(Overrides),
    /// Cone-geometry γ search.
    Gamma(Overrides),
    /// Step-one bound M.
    Stepone(Overrides),
    /// Rescaled integral inequality for R in problem.R_list.
    Rescaled(Overrides),
    /// Sharpness scan over problem.p_grid.
    Scan(Overrides),
}

impl Command {
    fn parts(&self) -> (&'static str, &[String]) {
        match self {
            Command::Calpha(o) => ("calpha", &o.args),
            Command::Moment(o) => ("moment", &o.args),
            Command::Eval(o) => ("eval", &o.args),
            Command::Identity(o) => ("identity", &o.args),
            Command::Pair(o) => ("pair", &o.args),
            Command::Certify(o) => ("certify", &o.args),
            Command::Construct(o) => ("construct", &o.args),
            Command::Gamma(o) => ("gamma", &o.args),
            Command::Stepone(o) => ("stepone", &o.args),
            Command::Rescaled(o) => ("rescaled", &o.args),
            Command::Scan(o) => ("scan", &o.args),
        }
    }
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Expect(String),
    Accuracy(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Expect(_) => 3,
            Failure::Accuracy(_) => 4,
            Failure::Runtime(_) => 1,
        }
    }

    fn line(&self) -> String {
        let (kind, msg) = match self {
            Failure::Config(m) => ("invalid_config", m),
            Failure::Expect(m) => ("expect_failed", m),
            Failure::Accuracy(m) => ("accuracy", m),
            Failure::Runtime(m) => ("runtime", m),
        };
        format!("error={kind} reason={}", msg.replace('\n', " "))
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Accuracy { .. } => Failure::Accuracy(e.to_string()),
            Error::InputDomain(_)
            | Error::NonsmoothPoint(_)
            | Error::DegenerateDensity(_)
            | Error::DegenerateConstruction(_) => Failure::Config(e.to_string()),
            Error::SearchFailure(_) | Error::TruncationUnattainable(_) => Failure::Runtime(e.to_string()),
        }
    }
}

/// Parsed problem context shared by the subcommands.
struct Ctx {
    cfg: RunConfig,
    n: usize,
    s: f64,
    density: SpectralDensity,
    quad: QuadratureConfig,
}

impl Ctx {
    fn new(cfg: RunConfig) -> Result<Self, Failure> {
        let n: usize = cfg.get("problem.N")?;
        let s: f64 = cfg.get("problem.s")?;
        if n == 0 || !(s > 0.0 && s < 1.0) {
            return Err(Failure::Config(format!("need problem.N ≥ 1 and 0 < problem.s < 1, got N = {n}, s = {s}")));
        }
        let density = match cfg.raw("density.kind") {
            "constant" => SpectralDensity::constant(n, cfg.get("density.value")?)?,
            "cone" => {
                let cone = Cone::centered(cfg.vector_or_axis("density.axis", n)?, cfg.get("density.aperture")?)?;
                SpectralDensity::cone_plateau(cone, cfg.get("density.inside")?, cfg.get("density.outside")?)?
            }
            other => return Err(Failure::Config(format!("density.kind `{other}` is not one of constant, cone"))),
        };
        density.require_nondegenerate()?;
        let quad = QuadratureConfig {
            t0: cfg.get("quad.t0_factor")?,
            abs_tol: cfg.get("quad.abs_tol")?,
            rel_tol: cfg.get("quad.rel_tol")?,
            max_subdivisions: cfg.get("quad.max_subdiv")?,
            sphere_nodes: cfg.get("quad.sphere_nodes")?,
            mc_seed: cfg.get("quad.mc_seed")?,
            mc_samples: cfg.get("quad.mc_samples")?,
        };
        quad.validate()?;
        Ok(Self { cfg, n, s, density, quad })
    }

    fn f(&self, key: &str) -> Result<f64, Failure> {
        Ok(self.cfg.get(key)?)
    }

    fn function(&self) -> Result<CatalogFunction, Failure> {
        self.function_of_kind(self.cfg.raw("function.kind"))
    }

    /// The `function.*` settings with the given kind.
    fn function_of_kind(&self, kind: &str) -> Result<CatalogFunction, Failure> {
        let c = &self.cfg;
        let alpha = || c.get::<f64>("function.alpha");
        let bump = || -> Result<CatalogFunction, Failure> {
            Ok(CatalogFunction::bump(c.vector_or_axis("function.center", self.n)?, c.get("function.r_in")?, c.get("function.r_out")?)?)
        };
        let base = match kind {
            "zero" => CatalogFunction::Zero,
            "constant" => CatalogFunction::Constant(c.get("function.value")?),
            "halfspace_power" => CatalogFunction::half_space_power(alpha()?)?,
            "kelvin" => CatalogFunction::kelvin(alpha()?, self.n, self.s)?,
            "kelvin_tt" => CatalogFunction::translate_truncate(CatalogFunction::kelvin(alpha()?, self.n, self.s)?),
            "bump" => bump()?,
            "bump_power" => CatalogFunction::product(CatalogFunction::half_space_power(alpha()?)?, bump()?),
            other => {
                return Err(Failure::Config(format!(
                    "function.kind `{other}` is not one of zero, constant, halfspace_power, kelvin, kelvin_tt, bump, bump_power"
                )))
            }
        };
        let r: f64 = c.get("function.rescale")?;
        let f = if r != 1.0 { CatalogFunction::rescale(base, r)? } else { base };
        let eps: f64 = c.get("function.scale")?;
        Ok(if eps != 1.0 { CatalogFunction::scalar(eps, f) } else { f })
    }

    fn points(&self) -> Result<Vec<Vec<f64>>, Failure> {
        let pts = self.cfg.points("problem.x")?;
        if pts.is_empty() || pts.iter().any(|p| p.len() != self.n) {
            return Err(Failure::Config(format!("problem.x must list points with {} coordinates", self.n)));
        }
        Ok(pts)
    }

    fn sampler(&self, mirror: bool) -> Result<Sampler, Failure> {
        let c = &self.cfg;
        Ok(Sampler {
            normal_min: c.get("sampler.normal_min")?,
            normal_max: c.get("sampler.normal_max")?,
            normal_count: c.get("sampler.normal_count")?,
            tangential_min: c.get("sampler.tangential_min")?,
            tangential_max: c.get("sampler.tangential_max")?,
            tangential_count: c.get("sampler.tangential_count")?,
            far_axis_decades: c.get("sampler.far_axis_decades")?,
            mirror,
            extras: Vec::new(),
        })
    }

    fn tolerance(&self) -> Result<CertifyTolerance, Failure> {
        Ok(CertifyTolerance { abs: self.f("sampler.tol_abs")?, rel: self.f("sampler.tol_rel")? })
    }

    fn mode(&self) -> Result<ScanMode, Failure> {
        match self.cfg.raw("problem.mode") {
            "halfspace" => Ok(ScanMode::Halfspace),
            "wholespace" => Ok(ScanMode::Wholespace),
            other => Err(Failure::Config(format!("problem.mode `{other}` is not halfspace or wholespace"))),
        }
    }

    /// `problem.gamma0`, or the γ found for the density's cone (the full
    /// space cone for a constant density).
    fn gamma0(&self) -> Result<f64, Failure> {
        if let Some(g) = self.cfg.get_auto::<f64>("problem.gamma0")? {
            return Ok(g);
        }
        let (axis, tau) = match self.density.kind() {
            DensityKind::ConePlateau { cone, .. } => (cone.axis().to_vec(), cone.aperture()),
            _ => {
                let mut e = vec![0.0; self.n];
                e[self.n - 1] = 1.0;
                (e, 1.0)
            }
        };
        Ok(gamma_search(&axis, tau, &self.gamma_config()?, &self.quad)?.gamma)
    }

    fn gamma_config(&self) -> Result<GammaSearchConfig, Failure> {
        Ok(GammaSearchConfig { grid: self.cfg.list("gamma.grid")?, boundary_points: self.cfg.get("gamma.boundary_points")? })
    }

    fn stepone_config(&self) -> Result<StepOneConfig, Failure> {
        let c = &self.cfg;
        Ok(StepOneConfig {
            radial: c.get("stepone.radial")?,
            angular: c.get("stepone.angular")?,
            flat_layers: c.get("stepone.flat_layers")?,
            flat_band: c.get("stepone.flat_band")?,
            refine: c.get("stepone.refine")?,
            ..StepOneConfig::default()
        })
    }
}

fn coord_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn header(fixed_before: &[&str], coords: Vec<String>, fixed_after: &[&str]) -> Vec<String> {
    fixed_before.iter().map(|s| s.to_string()).chain(coords).chain(fixed_after.iter().map(|s| s.to_string())).collect()
}

/// Output of one subcommand: the table and the SVG series.
struct Output {
    table: Table,
    plot: (String, String, Vec<(f64, f64)>),
}

fn cmd_calpha(ctx: &Ctx) -> Result<Output, Failure> {
    let mut t = Table::new(["alpha", "s", "c_alpha", "err"]);
    let mut pts = Vec::new();
    for alpha in ctx.cfg.list("problem.alpha")? {
        let r = c_alpha(alpha, ctx.s, &ctx.quad)?;
        t.push(vec![alpha.into(), ctx.s.into(), r.value.into(), r.abs_error_estimate.into()]);
        pts.push((alpha, r.value));
    }
    Ok(Output { table: t, plot: ("alpha".into(), "c_alpha".into(), pts) })
}

fn cmd_moment(ctx: &Ctx) -> Result<Output, Failure> {
    let r = weighted_sphere_moment(&ctx.density, ctx.s, &ctx.quad)?;
    let mut t = Table::new(["s", "I_a", "err"]);
    t.push(vec![ctx.s.into(), r.value.into(), r.abs_error_estimate.into()]);
    Ok(Output { table: t, plot: ("s".into(), "I_a".into(), vec![(ctx.s, r.value)]) })
}

fn cmd_eval(ctx: &Ctx) -> Result<Output, Failure> {
    let f = ctx.function()?;
    let mut t = Table::new(header(&[], coord_names("x", ctx.n), &["value", "err", "path"]));
    let mut pts = Vec::new();
    for (i, x) in ctx.points()?.iter().enumerate() {
        let r = apply_l(&ctx.density, ctx.s, &f, x, &ctx.quad)?;
        let mut row: Vec<Cell> = x.iter().map(|v| (*v).into()).collect();
        row.extend([r.value.into(), r.abs_error_estimate.into(), r.path.as_str().into()]);
        t.push(row);
        pts.push((i as f64, r.value));
    }
    Ok(Output { table: t, plot: ("point index".into(), "Lu".into(), pts) })
}

fn cmd_identity(ctx: &Ctx) -> Result<Output, Failure> {
    let (a, s, q) = (&ctx.density, ctx.s, &ctx.quad);
    let check = ctx.cfg.raw("problem.check").to_string();
    let wanted = |name: &str| check == "all" || check == name;
    if !["all", "scaling", "product", "kelvin"].contains(&check.as_str()) {
        return Err(Failure::Config(format!("problem.check `{check}` is not one of all, scaling, product, kelvin")));
    }
    let f = ctx.function()?;
    let points = ctx.points()?;
    let mut t = Table::new(header(&["check"], coord_names("x", ctx.n), &["residual", "budget"]));
    let mut pts = Vec::new();
    let mut push = |t: &mut Table, label: String, x: &[f64], residual: f64, budget: f64| {
        let mut row: Vec<Cell> = vec![label.into()];
        row.extend(x.iter().map(|v| Cell::from(*v)));
        row.extend([residual.into(), budget.into()]);
        pts.push((pts.len() as f64, residual));
        t.push(row);
    };
    if wanted("scaling") {
        for r in ctx.cfg.list("problem.R_list")? {
            let fr = CatalogFunction::rescale(f.clone(), r)?;
            for x in &points {
                let lhs = apply_l(a, s, &fr, x, q)?;
                let y: Vec<f64> = x.iter().map(|v| v / r).collect();
                let rhs = apply_l(a, s, &f, &y, q)?;
                let k = r.powf(-2.0 * s);
                push(
                    &mut t,
                    format!("scaling_R={r}"),
                    x,
                    (lhs.value - k * rhs.value).abs(),
                    lhs.abs_error_estimate + k * rhs.abs_error_estimate,
                );
            }
        }
    }
    if wanted("product") {
        let mut c = vec![0.0; ctx.n];
        c[ctx.n - 1] = 1.0;
        let h = CatalogFunction::bump(c, 0.5, 1.5)?;
        let gh = CatalogFunction::product(f.clone(), h.clone());
        for x in &points {
            let (lg, lh, lgh) = (apply_l(a, s, &f, x, q)?, apply_l(a, s, &h, x, q)?, apply_l(a, s, &gh, x, q)?);
            let l = correction_l(a, s, &f, &h, x, q)?;
            let (gx, hx) = (f.eval(x), h.eval(x));
            let residual = (lgh.value - gx * lh.value - hx * lg.value - l.value).abs();
            let budget = lgh.abs_error_estimate
                + gx.abs() * lh.abs_error_estimate
                + hx.abs() * lg.abs_error_estimate
                + l.abs_error_estimate;
            push(&mut t, "product".into(), x, residual, budget);
        }
    }
    if wanted("kelvin") {
        let alpha: f64 = ctx.cfg.get("problem.alpha")?;
        let w = CatalogFunction::kelvin(alpha, ctx.n, s)?;
        let c = c_alpha(alpha, s, q)?;
        let m = weighted_sphere_moment(a, s, q)?;
        let big_c = c.value * m.value;
        let big_c_err = c.value.abs() * m.abs_error_estimate + m.value.abs() * c.abs_error_estimate;
        let k = ctx.n as f64 - 2.0 * s + 2.0 * alpha;
        for x in &points {
            let lw = apply_l(a, s, &w, x, q)?;
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let shape = x[ctx.n - 1].powf(alpha - 2.0 * s) / r.powf(k);
            push(&mut t, "kelvin".into(), x, (lw.value - big_c * shape).abs(), lw.abs_error_estimate + big_c_err * shape);
        }
    }
    Ok(Output { table: t, plot: ("row".into(), "residual".into(), pts) })
}

fn cmd_pair(ctx: &Ctx) -> Result<Output, Failure> {
    let c = &ctx.cfg;
    let u = ctx.function_of_kind(c.raw("pairing.u"))?;
    let v = CatalogFunction::product(
        CatalogFunction::half_space_power(c.get("pairing.v_alpha")?)?,
        CatalogFunction::bump(c.vector_or_axis("pairing.v_center", ctx.n)?, c.get("pairing.v_r_in")?, c.get("pairing.v_r_out")?)?,
    );
    let pc = PairingConfig {
        order: c.get("pairing.order")?,
        grading_ratio: c.get("pairing.grading_ratio")?,
        min_graded_panels: c.get("pairing.min_graded_panels")?,
        support_panels: c.get("pairing.support_panels")?,
        truncation_tol: c.get("pairing.truncation_tol")?,
        max_box: c.get("pairing.max_box")?,
    };
    let r = pairing(&ctx.density, ctx.s, &u, &v, &pc, &ctx.quad)?;
    let mut t = Table::new(["I_uLv", "I_vLu", "residual"]);
    t.push(vec![r.i_uv.into(), r.i_vu.into(), r.residual.into()]);
    Ok(Output { table: t, plot: ("side".into(), "integral".into(), vec![(0.0, r.i_uv), (1.0, r.i_vu)]) })
}

fn cmd_certify(ctx: &Ctx) -> Result<Output, Failure> {
    let p: f64 = ctx.cfg.get("problem.p")?;
    let mirror = ctx.mode()? == ScanMode::Wholespace;
    let (u, eps) = match ctx.cfg.raw("problem.candidate") {
        "construction" => {
            let c = construct_for_density(&ctx.density, ctx.s, p, ctx.cfg.get_auto("problem.eps")?, &ctx.quad)?;
            (c.function, c.eps)
        }
        "function" => (ctx.function()?, ctx.f("function.scale")?),
        other => return Err(Failure::Config(format!("problem.candidate `{other}` is not construction or function"))),
    };
    let rep = certify(&ctx.density, ctx.s, p, &u, &ctx.sampler(mirror)?, ctx.tolerance()?, &ctx.quad)?;
    let mut t = Table::new(header(&["p", "eps", "min_margin"], coord_names("argmin", ctx.n), &["n_points", "certified"]));
    let mut row: Vec<Cell> = vec![p.into(), eps.into(), rep.min_margin.into()];
    row.extend(rep.argmin.iter().map(|v| Cell::from(*v)));
    row.extend([rep.n_points.into(), rep.certified.into()]);
    t.push(row);
    Ok(Output { table: t, plot: ("p".into(), "min_margin".into(), vec![(p, rep.min_margin)]) })
}

fn cmd_construct(ctx: &Ctx) -> Result<Output, Failure> {
    let p: f64 = ctx.cfg.get("problem.p")?;
    let c = construct_supersolution(ctx.n, ctx.s, p, ctx.cfg.get_auto("problem.eps")?, &ctx.quad)?;
    let mut t = Table::new(["N", "s", "p", "regime", "alpha", "C_alpha", "eps_max"]);
    t.push(vec![ctx.n.into(), ctx.s.into(), p.into(), c.regime.as_str().into(), c.alpha.into(), c.c_alpha.into(), c.eps_max.into()]);
    Ok(Output { table: t, plot: ("p".into(), "eps_max".into(), vec![(p, c.eps_max)]) })
}

fn cmd_gamma(ctx: &Ctx) -> Result<Output, Failure> {
    let axis = ctx.cfg.vector_or_axis("density.axis", ctx.n)?;
    let tau: f64 = ctx.cfg.get("density.aperture")?;
    let r = gamma_search(&axis, tau, &ctx.gamma_config()?, &ctx.quad)?;
    let mut t = Table::new(["gamma", "min_volume", "three_sigma", "verified"]);
    let mut pts = Vec::new();
    for p in &r.probes {
        t.push(vec![p.gamma.into(), p.min_volume.into(), p.three_sigma.into(), p.verified.into()]);
        pts.push((p.gamma, p.min_volume));
    }
    Ok(Output { table: t, plot: ("gamma".into(), "min_volume".into(), pts) })
}

fn cmd_stepone(ctx: &Ctx) -> Result<Output, Failure> {
    let gamma0 = ctx.gamma0()?;
    let alpha0: f64 = ctx.cfg.get("problem.alpha0")?;
    let r = step_one_m(&ctx.density, ctx.s, alpha0, gamma0, &ctx.stepone_config()?, &ctx.quad)?;
    let mut t = Table::new(header(&["region", "M_est"], coord_names("sup_x", ctx.n), &["stability"]));
    let row = |label: &str, m: f64, x: &[f64]| {
        let mut cells: Vec<Cell> = vec![label.into(), m.into()];
        if x.len() == ctx.n {
            cells.extend(x.iter().map(|v| Cell::from(*v)));
        } else {
            cells.extend((0..ctx.n).map(|_| Cell::Missing));
        }
        cells.push(r.stability.into());
        cells
    };
    let mut pts = Vec::new();
    for (i, reg) in r.regions.iter().enumerate() {
        t.push(row(reg.region.as_str(), reg.m_est, &reg.sup_x));
        pts.push((i as f64, reg.m_est));
    }
    t.push(row("overall", r.m_est, &r.sup_x));
    let worst_audit = r.audit.iter().max_by(|a, b| a.numerator.total_cmp(&b.numerator)).map(|p| p.x.clone()).unwrap_or_default();
    t.push(row("exterior_audit", r.audit_max, &worst_audit));
    Ok(Output { table: t, plot: ("region".into(), "M_est".into(), pts) })
}

fn cmd_rescaled(ctx: &Ctx) -> Result<Output, Failure> {
    let p: f64 = ctx.cfg.get("problem.p")?;
    let gamma0 = ctx.gamma0()?;
    let m = match ctx.cfg.get_auto::<f64>("problem.M")? {
        Some(m) => m,
        None => step_one_m(&ctx.density, ctx.s, ctx.f("problem.alpha0")?, gamma0, &ctx.stepone_config()?, &ctx.quad)?.m_est,
    };
    let u = construct_for_density(&ctx.density, ctx.s, p, ctx.cfg.get_auto("problem.eps")?, &ctx.quad)?.function;
    let c = &ctx.cfg;
    let rc = RescaledConfig {
        order: c.get("rescaled.order")?,
        radial_panels: c.get("rescaled.radial_panels")?,
        angular_end_panels: c.get("rescaled.angular_end_panels")?,
        angular_mid_panels: c.get("rescaled.angular_mid_panels")?,
    };
    let rows = rescaled_inequality_experiment(ctx.n, ctx.s, p, &u, m, gamma0, &c.list("problem.R_list")?, &rc)?;
    let mut t = Table::new(["R", "lhs", "rhs", "envelope_exponent"]);
    let mut pts = Vec::new();
    for r in rows {
        t.push(vec![r.r.into(), r.lhs.into(), r.rhs.into(), r.envelope_exponent.into()]);
        pts.push((r.r, r.lhs));
    }
    Ok(Output { table: t, plot: ("R".into(), "lhs".into(), pts) })
}

fn cmd_scan(ctx: &Ctx) -> Result<Output, Failure> {
    let mode = ctx.mode()?;
    let sc = ScanConfig {
        sampler: ctx.sampler(false)?,
        tolerance: ctx.tolerance()?,
        alpha_fractions: ctx.cfg.list("sampler.alpha_fractions")?,
        eps_grid: ctx.cfg.list("sampler.eps_grid")?,
    };
    let grid = ctx.cfg.list("problem.p_grid")?;
    let rows = liouville_scan(&ctx.density, ctx.s, &grid, mode, &sc, &ctx.quad)?;
    let mut t = Table::new(["p", "threshold", "regime", "alpha", "C_alpha", "eps_max", "min_margin", "certified"]);
    let mut pts = Vec::new();
    for r in rows {
        t.push(vec![
            r.p.into(),
            r.threshold.unwrap_or(f64::INFINITY).into(),
            r.regime.as_str().into(),
            r.alpha.into(),
            r.c_alpha.into(),
            r.eps_max.into(),
            r.min_margin.into(),
            r.certified.into(),
        ]);
        pts.push((r.p, r.min_margin.unwrap_or(f64::NAN)));
    }
    Ok(Output { table: t, plot: ("p".into(), "min_margin".into(), pts) })
}

/// `coherent`: every attempted row is certified exactly when `p` exceeds
/// the threshold. `column=value`: every row shows `value` in `column`.
fn check_expectation(table: &Table, expect: &str) -> Result<(), Failure> {
    if expect == "coherent" {
        let (Some(p), Some(th), Some(cert)) = (table.column("p"), table.column("threshold"), table.column("certified")) else {
            return Err(Failure::Config("`coherent` needs p, threshold and certified columns".into()));
        };
        for ((p, th), cert) in p.into_iter().zip(th).zip(cert) {
            let (Cell::Float(p), Cell::Float(th)) = (p, th) else { continue };
            match cert {
                Cell::Bool(c) if *c == (p > th) => {}
                Cell::Missing => {}
                other => {
                    return Err(Failure::Expect(format!("row p={p}: certified={} but threshold={th}", other.render())));
                }
            }
        }
        return Ok(());
    }
    let (col, want) = expect
        .split_once('=')
        .ok_or_else(|| Failure::Config(format!("--expect `{expect}` is neither `coherent` nor `column=value`")))?;
    let cells = table.column(col).ok_or_else(|| Failure::Config(format!("--expect: no column `{col}`")))?;
    for c in cells {
        let ok = match c {
            Cell::Float(v) => want.parse::<f64>().map(|w| w == *v).unwrap_or(false),
            other => other.render() == want,
        };
        if !ok {
            return Err(Failure::Expect(format!("{col}={} where {want} was expected", c.render())));
        }
    }
    Ok(())
}

fn execute(name: &str, args: &[String]) -> Result<(), Failure> {
    let (cfg, extras) = RunConfig::resolve(args, std::env::vars())?;
    let dir = PathBuf::from(cfg.raw("output.dir"));
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let write = |file: &str, body: &str| {
        let path = dir.join(file);
        std::fs::write(&path, body).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
    };
    write("resolved.cfg", &cfg.render())?;
    let svg: bool = cfg.get("output.svg")?;
    let ctx = Ctx::new(cfg)?;
    let out = match name {
        "calpha" => cmd_calpha(&ctx),
        "moment" => cmd_moment(&ctx),
        "eval" => cmd_eval(&ctx),
        "identity" => cmd_identity(&ctx),
        "pair" => cmd_pair(&ctx),
        "certify" => cmd_certify(&ctx),
        "construct" => cmd_construct(&ctx),
        "gamma" => cmd_gamma(&ctx),
        "stepone" => cmd_stepone(&ctx),
        "rescaled" => cmd_rescaled(&ctx),
        "scan" => cmd_scan(&ctx),
        _ => unreachable!("clap restricts subcommands"),
    }?;
    let body = out.table.render(ctx.quad.mc_seed);
    write(&format!("{name}.csv"), &body)?;
    if svg {
        let (xl, yl, pts) = &out.plot;
        write(&format!("{name}.svg"), &svg::line_chart(name, xl, yl, pts))?;
    }
    print!("{body}");
    for e in &extras.expect {
        check_expectation(&out.table, e)?;
    }
    Ok(())
}

/// Runs the CLI on the given arguments (program name first) and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, rest) = cli.command.parts();
    match execute(name, rest) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{}", f.line());
            f.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expectations() {
        let mut t = Table::new(["p", "threshold", "certified"]);
        t.push(vec![1.5.into(), (5.0 / 3.0).into(), false.into()]);
        t.push(vec![1.8.into(), (5.0 / 3.0).into(), true.into()]);
        assert!(check_expectation(&t, "coherent").is_ok());
        assert!(matches!(check_expectation(&t, "certified=true"), Err(Failure::Expect(_))));
        assert!(check_expectation(&t, "threshold=1.6666666666666667").is_ok());
        assert!(matches!(check_expectation(&t, "nope=1"), Err(Failure::Config(_))));
        t.push(vec![1.2.into(), (5.0 / 3.0).into(), true.into()]);
        assert_eq!(check_expectation(&t, "coherent").unwrap_err().code(), 3);
    }

    #[test]
    fn error_mapping() {
        assert_eq!(Failure::from(Error::Accuracy { value: 1.0, error: 1.0 }).code(), 4);
        assert_eq!(Failure::from(Error::DegenerateDensity("z".into())).code(), 2);
        assert_eq!(Failure::from(Error::SearchFailure("z".into())).code(), 1);
        assert!(!Failure::Config("a\nb".into()).line().contains('\n'));
    }
}
