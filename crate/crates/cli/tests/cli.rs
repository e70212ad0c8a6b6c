use std::path::Path;
use std::process::{Command, Output};

fn fuzzy(args: &[&str]) -> Output {
    fuzzy_env(args, None)
}

fn fuzzy_env(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fuzzy"));
    c.args(args).env_remove("FUZZY_OUT_DIR");
    if let Some(d) = out_dir {
        c.env("FUZZY_OUT_DIR", d);
    }
    c.output().expect("spawn fuzzy")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn structure_csv_has_header_and_unit_rows() {
    let o = fuzzy(&["structure", "--nmax", "1/2", "--eps", "1", "--k", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "point,n1,r1,m1,n2,r2,m2,n,r,m,coefficient,re,im");
    assert!(text.contains(",0,0,0,1/2,1/2,1/2,1/2,1/2,1/2,1,"));
}

#[test]
fn tables_are_deterministic_across_jobs() {
    let a = fuzzy(&["structure", "--nmax", "1", "--jobs", "1"]);
    let b = fuzzy(&["structure", "--nmax", "1", "--jobs", "4"]);
    let c = fuzzy(&["structure", "--nmax", "1", "--jobs", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
    let r1 = fuzzy(&["reduced", "--nmax", "1", "--jobs", "1"]);
    let r2 = fuzzy(&["reduced", "--nmax", "1", "--jobs", "3"]);
    assert!(r1.status.success());
    assert_eq!(r1.stdout, r2.stdout);
}

#[test]
fn json_mirrors_csv() {
    let csv = stdout(&fuzzy(&["norms", "--nmax", "1", "--k", "3/2"]));
    let json = stdout(&fuzzy(&["norms", "--nmax", "1", "--k", "3/2", "--format", "json"]));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
    assert_eq!(rows.len() + 1, csv.lines().count());
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    assert_eq!(keys, header);
}

#[test]
fn cap_needs_explicit_override() {
    let o = fuzzy(&["hahn", "--nmax", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hard cap"));
    let o = fuzzy(&["hahn", "--nmax", "5", "--override-cap", "5"]);
    assert!(o.status.success());
}

#[test]
fn verify_classical_runs_only_that_suite() {
    let o = fuzzy(&["verify", "--suite", "classical"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["pass"], true);
    let checks = r["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["suite"] == "classical"));
}

#[test]
fn verify_eps_zero_basis() {
    let o = fuzzy(&["verify", "--eps", "0", "--suite", "basis"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["parameters"].as_str().unwrap().contains("eps=0")));
    assert!(checks.iter().any(|c| c["property"] == "eps = 0 route agrees"));
}

#[test]
fn verify_default_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = fuzzy_env(&["verify", "--triples", "20"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
    assert_eq!(r["suites"].as_array().unwrap().len(), 12);
}

#[test]
fn unknown_suite_is_an_error() {
    let o = fuzzy(&["verify", "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small run\nnmax = 1/2\nformat = json\neps = 1\nk = 1\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let json = stdout(&fuzzy(&["--config", cfg, "cg"]));
    assert!(json.trim_start().starts_with('['));
    let csv = stdout(&fuzzy(&["--config", cfg, "cg", "--format", "csv"]));
    assert!(csv.starts_with("j1,j2,j,m1,m2,m,value,re"));
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "colour = blue\n").unwrap();
    assert_eq!(fuzzy(&["--config", bad.to_str().unwrap(), "cg"]).status.code(), Some(2));
}

#[test]
fn out_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    let o = fuzzy_env(&["norms", "--nmax", "1/2", "--out", "sub/norms.csv"], Some(dir.path()));
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("sub/norms.csv")).unwrap();
    assert!(text.starts_with("point,n,r,norm_sq"));
    let o = fuzzy_env(&["hahn", "--nmax", "1/2"], Some(dir.path()));
    assert!(o.status.success());
    assert!(dir.path().join("hahn.csv").exists());
}
