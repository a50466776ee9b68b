use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stable-cone"));
    cmd.env_clear().args(args).arg("--output.dir").arg(dir);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(dir: &Path, name: &str) -> Vec<Vec<String>> {
    std::fs::read_to_string(dir.join(format!("{name}.csv")))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn calpha_quarter() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["calpha", "--alpha", "0.25", "--s", "0.5"], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(dir.path(), "calpha");
    assert_eq!(rows[0], ["alpha", "s", "c_alpha", "err"]);
    let v: f64 = rows[1][2].parse().unwrap();
    assert!((v + std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("alpha,s,c_alpha,err"));
    assert!(dir.path().join("resolved.cfg").exists());
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["calpha", "--s", "1.5"],
        vec!["calpha", "--problem.nonsense", "1"],
        vec!["moment", "--density.value", "0"],
        vec!["eval", "--density.kind", "cone", "--density.inside", "0", "--density.outside", "0"],
    ] {
        let o = run(dir.path(), &args, &[]);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains("error=invalid_config"), "{}", stderr(&o));
    }
}

#[test]
fn failed_expectation_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["construct", "--p", "1.8", "--expect", "regime=translate_truncate"], &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = run(dir.path(), &["construct", "--p", "1.8", "--expect", "regime=kelvin"], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn environment_overrides_defaults_and_flags_override_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["calpha", "--alpha", "0.3"], &[("STABLE_CONE_PROBLEM__S", "0.3")]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_rows(dir.path(), "calpha")[1][1].parse::<f64>().unwrap(), 0.3);
    let cfg = std::fs::read_to_string(dir.path().join("resolved.cfg")).unwrap();
    assert!(cfg.contains("problem.s = 0.3\n"));

    let o = run(dir.path(), &["calpha", "--alpha", "0.3", "--s", "0.7"], &[("STABLE_CONE_PROBLEM__S", "0.3")]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_rows(dir.path(), "calpha")[1][1].parse::<f64>().unwrap(), 0.7);
}

#[test]
fn svg_is_written_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["calpha", "--alpha", "0.1,0.3,0.5,0.7,0.9", "--output.svg", "true"], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let svg = std::fs::read_to_string(dir.path().join("calpha.svg")).unwrap();
    assert!(svg.contains("<svg") && svg.contains("<path") && svg.matches("<circle").count() == 5);
}

#[test]
fn small_scan_is_coherent() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "scan",
            "--problem.p_grid",
            "1.4,1.8",
            "--sampler.normal_count",
            "8",
            "--sampler.tangential_count",
            "3",
            "--sampler.far_axis_decades",
            "40",
            "--expect",
            "coherent",
        ],
        &[],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(dir.path(), "scan");
    let certified: Vec<&str> = rows[1..].iter().map(|r| r[7].as_str()).collect();
    assert_eq!(certified, ["false", "true"]);
}
