use std::collections::HashMap;
use std::path::PathBuf;
use std::process::{Command, Output};

use spinpair::dense_coding::capacity;
use spinpair::model::ModelParams;
use spinpair::numerics::c;
use spinpair::swap::{find_swap_times, purity_witness, ProductState, DEFAULT_SWAP_TOL};
use spinpair::sweep::format_float;

fn spinpair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinpair")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn key_values(text: &str) -> HashMap<String, String> {
    text.lines().filter_map(|l| l.split_once('=')).map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn capacity_matches_library() {
    let o = spinpair(&["capacity", "--J", "-1", "--beta0", "0.8", "--dbzeff", "0.5", "--T", "0.05"]);
    assert_eq!(o.status.code(), Some(0));
    let kv = key_values(&stdout(&o));
    let r = capacity(&ModelParams::new(-1.0, 0.8).with_dbzeff(0.5).with_temperature(0.05)).unwrap();
    for (key, value) in [
        ("chi", r.chi),
        ("S_rho", r.s_rho),
        ("S_avg", r.s_avg),
        ("holevo", r.holevo),
        ("chi_closed_form", r.chi_closed_form),
        ("A", r.a),
        ("B", r.b),
        ("log_Z", r.log_z),
    ] {
        assert_eq!(kv[key], format_float(value, 12), "{key}");
    }
    assert_eq!(kv["valid"], r.valid.to_string());
}

#[test]
fn capacity_precision_flag() {
    let o = spinpair(&["capacity", "--J", "1", "--T", "0.5", "--precision", "4"]);
    let kv = key_values(&stdout(&o));
    let r = capacity(&ModelParams::new(1.0, 0.0).with_temperature(0.5)).unwrap();
    assert_eq!(kv["chi"], format_float(r.chi, 4));
}

#[test]
fn evolve_matches_library() {
    let o = spinpair(&[
        "evolve", "--J", "1", "--beta0", "0.3", "--dbzeff", "0.4", "--Bz", "0.2", "--alpha1", "0.6", "--beta1",
        "0,0.8", "--alpha2", "0.8", "--beta2", "-0.6", "--t", "1.7",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let kv = key_values(&stdout(&o));
    let s = ProductState::new(c(0.6, 0.0), c(0.0, 0.8), c(0.8, 0.0), c(-0.6, 0.0)).unwrap();
    let p = ModelParams::new(1.0, 0.3).with_dbzeff(0.4).with_bz(0.2);
    let w = purity_witness(&p, &s, 1.7).unwrap();
    assert_eq!(kv["witness_abs"], format_float(w.value.norm(), 12));
    for key in ["a", "b", "c", "d", "witness", "witness_closed_form", "mu", "nu", "X", "Y"] {
        assert!(kv.contains_key(key), "{key}");
    }
}

#[test]
fn swap_find_reports_pi_solution() {
    let o = spinpair(&[
        "swap-find",
        "--J",
        "1",
        "--beta0",
        "2.8284271247461903",
        "--dbzeff",
        "0",
        "--kmax",
        "4",
        "--nmax",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("index\tt\tk\tn\tcase"));
    let pi = format_float(std::f64::consts::PI, 12);
    let row = lines.iter().find(|l| {
        let f: Vec<&str> = l.split('\t').collect();
        f[2] == "1" && f[3] == "0"
    });
    let f: Vec<&str> = row.expect("(k=1, n=0) row").split('\t').collect();
    assert_eq!(f[1], pi);
    assert_eq!(f[5], "swap");

    let sols = find_swap_times(&ModelParams::new(1.0, 8f64.sqrt()), 4, 4, DEFAULT_SWAP_TOL).unwrap();
    assert_eq!(lines.len(), sols.len() + 1);
}

#[test]
fn swap_verify_confirms_and_rejects() {
    let model = ["--J", "1", "--beta0", "2.8284271247461903", "--kmax", "4", "--nmax", "4"];
    let find = stdout(&spinpair(&[&["swap-find"][..], &model].concat()));
    let idx = find
        .lines()
        .skip(1)
        .find(|l| l.split('\t').nth(5) == Some("swap"))
        .and_then(|l| l.split('\t').next())
        .unwrap()
        .to_string();
    let mut args = [&["swap-verify"][..], &model].concat();
    args.extend(["--index", idx.as_str(), "--seed", "4"]);
    let o = spinpair(&args);
    assert_eq!(o.status.code(), Some(0));
    let kv = key_values(&stdout(&o));
    assert_eq!(kv["mapping"], "swap");
    assert_eq!(kv["states"], "32");

    let mut bad = [&["swap-verify"][..], &model].concat();
    bad.extend(["--index", "999"]);
    assert_eq!(spinpair(&bad).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["frobnicate"],
        vec!["capacity", "--J", "1"],
        vec!["capacity", "--J", "1", "--T", "0.1", "--bogus", "2"],
        vec!["capacity", "--J", "x", "--T", "0.1"],
        vec!["sweep", "--config", "/nonexistent/spinpair.sweep"],
    ] {
        let o = spinpair(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(spinpair(&["--help"]).status.code(), Some(0));
}

#[test]
fn numeric_errors_exit_two() {
    let o = spinpair(&["capacity", "--J", "1", "--T", "-0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("non_positive_temperature"));
    let o = spinpair(&["swap-find", "--J", "0", "--beta0", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn single_point_sweep_writes_two_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("point.csv");
    let cfg = configs_dir().join("point.sweep");
    let o = spinpair(&["sweep", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "T,chi,error");
    let chi = capacity(&ModelParams::new(-1.0, 0.8).with_dbzeff(0.5).with_temperature(0.05)).unwrap().chi;
    assert_eq!(lines[1], format!("0.05,{},", format_float(chi, 12)));

    let piped = spinpair(&["sweep", "--config", cfg.to_str().unwrap(), "--serial"]);
    assert_eq!(stdout(&piped), text);
}

#[test]
fn bad_config_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.sweep");
    std::fs::write(&cfg, "quantity = chi\naxis.T = 0.1, 1\n").unwrap();
    let o = spinpair(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn selftest_passes() {
    let o = spinpair(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("documented discrepancies"));
}
