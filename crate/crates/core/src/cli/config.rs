//! Flat `section.key = value` configuration with layered overrides:
//! defaults, then a config file, then `STABLE_CONE_<SECTION>__<KEY>`
//! environment variables, then `--section.key value` flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use thiserror::Error;

pub const ENV_PREFIX: &str = "STABLE_CONE_";

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("line {line}: expected `section.key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("key `{key}`: cannot parse `{value}`: {reason}")]
    Parse { key: String, value: String, reason: String },
    #[error("cannot read config `{path}`: {reason}")]
    Io { path: String, reason: String },
    #[error("flag `{0}` needs a value")]
    MissingValue(String),
    #[error("{0}")]
    Invalid(String),
}

/// Every recognised key with its default.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("density.aperture", "0.3"),
    ("density.axis", "auto"),
    ("density.inside", "1"),
    ("density.kind", "constant"),
    ("density.outside", "0"),
    ("density.value", "1"),
    ("function.alpha", "0.25"),
    ("function.center", "auto"),
    ("function.kind", "kelvin"),
    ("function.r_in", "0.25"),
    ("function.r_out", "0.5"),
    ("function.rescale", "1"),
    ("function.scale", "1"),
    ("function.value", "1"),
    ("gamma.boundary_points", "64"),
    ("gamma.grid", "0.5,0.25,0.1,0.05,0.025,0.01"),
    ("output.dir", "out"),
    ("output.svg", "false"),
    ("pairing.grading_ratio", "1.5"),
    ("pairing.max_box", "1e8"),
    ("pairing.min_graded_panels", "12"),
    ("pairing.order", "6"),
    ("pairing.support_panels", "8"),
    ("pairing.truncation_tol", "1e-5"),
    ("pairing.u", "kelvin_tt"),
    ("pairing.v_alpha", "0.4"),
    ("pairing.v_center", "auto"),
    ("pairing.v_r_in", "0.25"),
    ("pairing.v_r_out", "0.5"),
    ("problem.M", "auto"),
    ("problem.N", "2"),
    ("problem.R_list", "1,2,4,8"),
    ("problem.alpha", "0.25"),
    ("problem.alpha0", "0.75"),
    ("problem.candidate", "construction"),
    ("problem.check", "all"),
    ("problem.eps", "auto"),
    ("problem.gamma0", "auto"),
    ("problem.mode", "halfspace"),
    ("problem.p", "1.8"),
    ("problem.p_grid", "1.2,1.4,1.6,1.7,1.8,1.9"),
    ("problem.s", "0.5"),
    ("problem.x", "0.3,0.8;1.2,0.3"),
    ("quad.abs_tol", "1e-10"),
    ("quad.max_subdiv", "2000"),
    ("quad.mc_samples", "20000"),
    ("quad.mc_seed", "1592639710"),
    ("quad.rel_tol", "1e-8"),
    ("quad.sphere_nodes", "32"),
    ("quad.t0_factor", "0.5"),
    ("rescaled.angular_end_panels", "16"),
    ("rescaled.angular_mid_panels", "24"),
    ("rescaled.order", "8"),
    ("rescaled.radial_panels", "60"),
    ("sampler.alpha_fractions", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"),
    ("sampler.eps_grid", "1e-3,1e-2,0.1,1,10"),
    ("sampler.far_axis_decades", "100"),
    ("sampler.normal_count", "20"),
    ("sampler.normal_max", "10"),
    ("sampler.normal_min", "1e-2"),
    ("sampler.tangential_count", "5"),
    ("sampler.tangential_max", "10"),
    ("sampler.tangential_min", "1e-2"),
    ("sampler.tol_abs", "0"),
    ("sampler.tol_rel", "1e-6"),
    ("stepone.angular", "16"),
    ("stepone.flat_band", "0.1"),
    ("stepone.flat_layers", "6"),
    ("stepone.radial", "6"),
    ("stepone.refine", "true"),
];

/// Effective configuration: every key in [`DEFAULTS`] with its final value.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

/// Flags that are not configuration keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extras {
    pub config: Option<String>,
    pub expect: Vec<String>,
}

fn is_known(key: &str) -> bool {
    DEFAULTS.iter().any(|(k, _)| *k == key)
}

/// `--alpha` means `--problem.alpha`.
fn qualify(key: &str) -> String {
    if key.contains('.') {
        key.to_string()
    } else {
        format!("problem.{key}")
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { values: DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect() }
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = qualify(key.trim());
        if !is_known(&key) {
            return Err(ConfigError::UnknownKey(key));
        }
        self.values.insert(key, value.trim().to_string());
        Ok(())
    }

    pub fn merge_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax { line: i + 1, text: line.into() })?;
            if !k.contains('.') {
                return Err(ConfigError::Syntax { line: i + 1, text: line.into() });
            }
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Applies `STABLE_CONE_SECTION__KEY=value` pairs. Keys are matched
    /// case-insensitively against the known ones.
    pub fn merge_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) -> Result<(), ConfigError> {
        let mut found: Vec<(String, String)> = vars
            .into_iter()
            .filter_map(|(k, v)| k.strip_prefix(ENV_PREFIX).map(|rest| (rest.to_string(), v)))
            .collect();
        found.sort();
        for (rest, v) in found {
            let wanted = rest.replacen("__", ".", 1).to_lowercase();
            let key = DEFAULTS
                .iter()
                .map(|(k, _)| *k)
                .find(|k| k.to_lowercase() == wanted)
                .ok_or_else(|| ConfigError::UnknownKey(format!("{ENV_PREFIX}{rest}")))?;
            self.set(key, &v)?;
        }
        Ok(())
    }

    /// Resolves the full layering from raw command-line arguments (after the
    /// subcommand) and the process environment.
    pub fn resolve<I: IntoIterator<Item = (String, String)>>(args: &[String], env: I) -> Result<(Self, Extras), ConfigError> {
        let mut extras = Extras::default();
        let mut flags: Vec<(String, String)> = Vec::new();
        let mut i = 0;
        while i < args.len() {
            let arg = &args[i];
            let body = arg
                .strip_prefix("--")
                .ok_or_else(|| ConfigError::Invalid(format!("unexpected argument `{arg}`")))?;
            let (name, value) = match body.split_once('=') {
                Some((n, v)) => (n.to_string(), v.to_string()),
                None => {
                    i += 1;
                    let v = args.get(i).ok_or_else(|| ConfigError::MissingValue(arg.clone()))?;
                    (body.to_string(), v.clone())
                }
            };
            match name.as_str() {
                "config" => extras.config = Some(value),
                "expect" => extras.expect.push(value),
                _ => flags.push((name, value)),
            }
            i += 1;
        }
        let mut cfg = Self::default();
        if let Some(path) = &extras.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::Io { path: path.clone(), reason: e.to_string() })?;
            cfg.merge_text(&text)?;
        }
        cfg.merge_env(env)?;
        for (k, v) in flags {
            cfg.set(&k, &v)?;
        }
        Ok((cfg, extras))
    }

    /// `key = value` lines for every key, sorted.
    pub fn render(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_else(|| panic!("unregistered key {key}"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: Display,
    {
        let v = self.raw(key);
        v.parse::<T>().map_err(|e| ConfigError::Parse { key: key.into(), value: v.into(), reason: e.to_string() })
    }

    /// `None` for `auto`.
    pub fn get_auto<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: Display,
    {
        if self.raw(key) == "auto" {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        parse_list(self.raw(key)).map_err(|reason| ConfigError::Parse { key: key.into(), value: self.raw(key).into(), reason })
    }

    /// `;`-separated points of `,`-separated coordinates.
    pub fn points(&self, key: &str) -> Result<Vec<Vec<f64>>, ConfigError> {
        self.raw(key)
            .split(';')
            .filter(|p| !p.trim().is_empty())
            .map(|p| parse_list(p).map_err(|reason| ConfigError::Parse { key: key.into(), value: p.into(), reason }))
            .collect()
    }

    /// A vector of dimension `n`; `auto` gives `e_N`.
    pub fn vector_or_axis(&self, key: &str, n: usize) -> Result<Vec<f64>, ConfigError> {
        let v = match self.raw(key) {
            "auto" => {
                let mut e = vec![0.0; n];
                e[n - 1] = 1.0;
                e
            }
            _ => self.list(key)?,
        };
        if v.len() != n {
            return Err(ConfigError::Invalid(format!("`{key}` must have {n} components")));
        }
        Ok(v)
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn precedence() {
        let dir = std::env::temp_dir().join(format!("sc-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("a.cfg");
        std::fs::write(&path, "# comment\nproblem.s = 0.3\nproblem.p = 1.4\nquad.mc_seed = 7\n").unwrap();
        let env = vec![("STABLE_CONE_PROBLEM__P".to_string(), "1.5".to_string())];
        let (cfg, ex) = RunConfig::resolve(
            &args(&["--config", path.to_str().unwrap(), "--quad.mc_seed", "9", "--expect", "certified=true"]),
            env,
        )
        .unwrap();
        assert_eq!(cfg.raw("problem.s"), "0.3");
        assert_eq!(cfg.raw("problem.p"), "1.5");
        assert_eq!(cfg.get::<u64>("quad.mc_seed").unwrap(), 9);
        assert_eq!(ex.expect, vec!["certified=true"]);
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn bare_flags_and_errors() {
        let (cfg, _) = RunConfig::resolve(&args(&["--s", "0.7", "--alpha=0.1"]), vec![]).unwrap();
        assert_eq!(cfg.get::<f64>("problem.s").unwrap(), 0.7);
        assert_eq!(cfg.raw("problem.alpha"), "0.1");
        assert!(matches!(RunConfig::resolve(&args(&["--nope", "1"]), vec![]), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(RunConfig::resolve(&args(&["--s"]), vec![]), Err(ConfigError::MissingValue(_))));
        let mut c = RunConfig::default();
        assert!(matches!(c.merge_text("s = 1"), Err(ConfigError::Syntax { .. })));
        c.set("problem.s", "abc").unwrap();
        assert!(c.get::<f64>("problem.s").is_err());
    }

    #[test]
    fn render_round_trips() {
        let mut c = RunConfig::default();
        c.set("problem.x", "1,2;3,4").unwrap();
        let mut d = RunConfig::default();
        d.merge_text(&c.render()).unwrap();
        assert_eq!(c, d);
        assert_eq!(d.points("problem.x").unwrap(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(d.vector_or_axis("density.axis", 3).unwrap(), vec![0.0, 0.0, 1.0]);
    }
}
