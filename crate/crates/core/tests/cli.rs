use std::process::{Command, Output};

use bernamp::sweep::read_csv;
use bernamp::{r_alpha, Alpha};

fn bernamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bernamp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_field(text: &str, name: &str) -> String {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    row[i].to_string()
}

const POINT: [&str; 8] = ["--c", "0.1", "--alpha", "50", "--d", "1", "--k", "1"];

#[test]
fn bounds_zero_budget_row() {
    let o = bernamp(&[&["bounds"], &POINT[..], &["--eps", "0"]].concat());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for f in ["epsilon", "lower", "ppi", "gap"] {
        assert_eq!(csv_field(&s, f).parse::<f64>().unwrap(), 0.0, "{f}");
    }
    assert_eq!(csv_field(&s, "regime"), "I");
}

#[test]
fn bounds_large_budget_json() {
    let o = bernamp(&[&["bounds"], &POINT[..], &["--eps", "1e6", "--format", "json"]].concat());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let lower = v["lower_two_point"].as_f64().unwrap();
    let asym = v["upper_asymptote"].as_f64().unwrap();
    assert!((lower - asym).abs() < 1e-6);
    assert_eq!(v["regime_hint"], "III");
}

#[test]
fn bad_flags_exit_two() {
    let o = bernamp(&["bounds", "--c", "0", "--alpha", "50", "--d", "1", "--eps", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("--c"), "{e}");
    assert_eq!(e.trim().lines().count(), 1);
    assert_eq!(bernamp(&["bounds", "--c", "0.1", "--alpha", "1", "--d", "1", "--eps", "1"]).status.code(), Some(2));
    assert_eq!(bernamp(&["sweep", "--eps-steps", "1", "--c", "0.1", "--alpha", "5", "--d", "1"]).status.code(), Some(2));
    assert_eq!(bernamp(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn exact_matches_asymptote() {
    let o = bernamp(&[&["exact"], &POINT[..], &["--eps", "1e3", "--format", "json"]].concat());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let value = v["value"].as_f64().unwrap();
    let asym = r_alpha(0.1, Alpha::new(50.0).unwrap()).unwrap();
    assert!((value - asym).abs() < 1e-3, "{value} vs {asym}");
    assert_eq!(v["argmax_p"].as_array().unwrap().len(), 2);
    assert_eq!(v["status"], "converged");
}

#[test]
fn exact_zero_budget() {
    let o = bernamp(&[&["exact"], &POINT[..], &["--eps", "0"]].concat());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_field(&stdout(&o), "value").parse::<f64>().unwrap(), 0.0);
}

#[test]
fn exact_capacity_guard() {
    let o = bernamp(&["exact", "--c", "0.1", "--alpha", "5", "--eps", "1", "--d", "4"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("--force"));
    let o = bernamp(&["exact", "--c", "0.1", "--alpha", "5", "--eps", "1", "--d", "11", "--force"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("solver dimension"));
    let o = bernamp(&["exact", "--c", "0.1", "--alpha", "5", "--eps", "1", "--d", "4", "--force", "--restarts", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn exact_iteration_exhaustion_exits_four_with_value() {
    let o = bernamp(&[
        "exact", "--c", "0.1", "--alpha", "5", "--eps", "1", "--d", "2", "--solver", "multistart", "--max-iters", "1",
        "--restarts", "2",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(csv_field(&stdout(&o), "status"), "max_iters");
    assert!(csv_field(&stdout(&o), "value").parse::<f64>().unwrap() > 0.0);
}

#[test]
fn sweep_structure_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let o = bernamp(&[
        "sweep", "--c", "0.1", "--alpha", "5", "--d", "1", "--eps-min", "0.1", "--eps-max", "10", "--eps-steps", "3",
        "--exact", "never", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
    assert!(text.lines().any(|l| l.starts_with("# seed=")));
    assert!(text.lines().any(|l| l.starts_with("# config_sha256=")));
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.exact.is_none() && r.solver_status.is_none()));
    assert!(rows.windows(2).all(|w| w[0].epsilon < w[1].epsilon));
}

#[test]
fn sweep_auto_policy_nulls_large_instances() {
    let o = bernamp(&[
        "sweep", "--c", "0.1", "--alpha", "5", "--d", "1,4", "--k", "1", "--eps-min", "0.5", "--eps-max", "1",
        "--eps-steps", "2", "--restarts", "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = read_csv(&o.stdout[..]).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(r.exact.is_some(), r.d == 1, "{r:?}");
        assert!(r.lower <= r.ppi.min(r.asymptote) + 1e-9);
        if let Some(e) = r.exact {
            assert!(e >= r.lower - 1e-3 && e <= r.ppi.min(r.asymptote) + 1e-3);
        }
    }
}

#[test]
fn sweep_always_degrades_failed_rows() {
    let o = bernamp(&[
        "sweep", "--c", "0.1", "--alpha", "5", "--d", "11", "--eps-min", "0.5", "--eps-max", "1", "--eps-steps", "2",
        "--exact", "always",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = read_csv(&o.stdout[..]).unwrap();
    assert!(rows.iter().all(|r| r.exact.is_none() && r.solver_status.as_deref().unwrap().starts_with("capacity")));
}

#[test]
fn sweep_json_output() {
    let o = bernamp(&[
        "sweep", "--preset", "paper-multik", "--exact", "never", "--eps-steps", "2", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 9 * 2);
    assert!(v["meta"]["config_sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn unwritable_output_exits_five() {
    let o = bernamp(&[
        "sweep", "--c", "0.1", "--alpha", "5", "--d", "1", "--exact", "never", "--out", "/nonexistent/dir/rows.csv",
    ]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn config_file_with_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.conf");
    std::fs::write(&path, "c = 0.1, 0.3\nalpha = 5\nd = 1\nexact = never\neps_steps = 3\n").unwrap();
    let p = path.to_str().unwrap();
    let o = bernamp(&["sweep", "--config", p]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read_csv(&o.stdout[..]).unwrap().len(), 6);
    let o = bernamp(&["sweep", "--config", p, "--c", "0.2"]);
    let rows = read_csv(&o.stdout[..]).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.c == 0.2));
}

#[test]
fn validate_canary_fails() {
    let o = bernamp(&["validate", "--canary"]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("FAIL r_alpha_convexity"));
    assert!(s.lines().last().unwrap().starts_with("failed:"));
}
