use std::path::Path;
use std::process::{Command, Output};

fn luttinger(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_luttinger"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, name)).unwrap()
}

#[test]
fn unknown_parameter_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = luttinger(&["kernel", "-p", "bogus=1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn malformed_values_are_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["kernel", "-p", "kernel=\"z\"", "-p", "alpha=[1,0]"][..],
        &["spectrum", "-p", "interval=[-1,2]"],
        &["classical", "-p", "m=-1"],
        &["scatter", "-p", "preset=\"nope\""],
        &["specfun", "--tol", "2"],
        &["specfun", "--threads", "0"],
        &["specfun", "-p", "novalue"],
        &["selftest", "-p", "criteria=[12]"],
    ] {
        let o = luttinger(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn config_file_and_flag_merge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"command": "specfun", "params": {"function": "j0", "range": {"start": 0, "stop": 1, "n": 3}}}"#).unwrap();
    let cfg_s = cfg.to_str().unwrap();

    let o = luttinger(&["--config", cfg_s, "-p", "function=\"i0\""], dir.path());
    assert!(o.status.success());
    let v = json(dir.path(), "specfun.json");
    assert_eq!(v["config"]["params"]["function"], "i0");
    assert_eq!(v["points"], 3);

    let o = luttinger(&["kernel", "--config", cfg_s], dir.path());
    assert_eq!(o.status.code(), Some(2));

    std::fs::write(&cfg, r#"{"command": "specfun", "extra": 1}"#).unwrap();
    assert_eq!(luttinger(&["--config", cfg_s], dir.path()).status.code(), Some(2));
}

#[test]
fn csv_outputs_carry_a_metadata_block() {
    let dir = tempfile::tempdir().unwrap();
    let grid = r#"grid={"kind":"uniform","start":-30,"stop":30,"n":12001}"#;
    assert!(luttinger(&["propagate", "-p", "operator=\"v\"", "-p", "theta=0.7", "-p", grid], dir.path()).status.success());
    let csv = read(dir.path(), "state.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,re,im"));
    let meta: Vec<&str> = csv.lines().filter(|l| l.starts_with('#')).collect();
    assert!(meta.iter().any(|l| l.starts_with("# config_hash: ")));
    // metadata only at the end
    let first_meta = csv.lines().position(|l| l.starts_with('#')).unwrap();
    assert!(csv.lines().skip(first_meta).all(|l| l.starts_with('#')));
    let v = json(dir.path(), "propagate.json");
    assert!(v["norm_gap"].as_f64().unwrap() < 1e-8);
    assert!(meta.contains(&format!("# config_hash: {}", v["config_hash"].as_str().unwrap()).as_str()));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["kernel", "-p", "kernel=\"u\"", "-p", "tau=0.7", "--seed", "9"];
    assert!(luttinger(&args, a.path()).status.success());
    // thread count must not change the output
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "4"]);
    assert!(luttinger(&threaded, b.path()).status.success());
    for f in ["kernel.csv", "kernel.json"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }

    for d in [a.path(), b.path()] {
        assert!(luttinger(&["classical", "-p", "preset=\"generic_3d\""], d).status.success());
    }
    assert_eq!(read(a.path(), "trajectory.csv"), read(b.path(), "trajectory.csv"));
}

#[test]
fn one_dimensional_trajectory_hits_minus_ell_at_critical_time() {
    let dir = tempfile::tempdir().unwrap();
    assert!(luttinger(&["classical", "-p", "preset=\"one_dimensional\""], dir.path()).status.success());
    let v = json(dir.path(), "classical.json");
    let ell = v["ell"].as_f64().unwrap();
    let t_c = v["critical_times"]["t_c"].as_f64().unwrap();
    let csv = read(dir.path(), "trajectory.csv");
    assert!(csv.starts_with("t,x0,p0,E,p_perp\n"));
    let row: Vec<f64> = csv
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect::<Vec<f64>>())
        .find(|r| r[0] == t_c)
        .expect("critical time sampled");
    assert!((row[1] + ell).abs() <= 1e-9, "x(t_c) = {}", row[1]);
    assert!(row[2].is_infinite());
}

#[test]
fn zero_potential_scatters_trivially() {
    let dir = tempfile::tempdir().unwrap();
    assert!(luttinger(&["scatter", "-p", "preset=\"zero\""], dir.path()).status.success());
    let v = json(dir.path(), "scatter.json");
    assert_eq!(v["s_closed"], serde_json::json!([1.0, 0.0]));
    assert_eq!(v["s_numeric"], serde_json::json!([1.0, 0.0]));
}

#[test]
fn nonintegrable_potential_fails_with_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let o = luttinger(&["scatter", "-p", "preset=\"linear_violating\"", "-p", "times=[25,50,100]"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let v = json(dir.path(), "scatter.json");
    assert!(v["s_closed"].is_null());
    assert!(v["s_numeric"].is_null());
}

#[test]
fn selftest_subset_reports_per_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let o = luttinger(&["selftest", "-p", "criteria=[1,5,11]"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 3);
    let v = json(dir.path(), "selftest.json");
    assert_eq!(v["passed"], true);
    let ids: Vec<u64> = v["criteria"].as_array().unwrap().iter().map(|c| c["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, [1, 5, 11]);
}
