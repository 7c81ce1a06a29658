use std::path::PathBuf;

use sha2::{Digest, Sha256};

use spinpair::dense_coding::capacity;
use spinpair::model::ModelParams;
use spinpair::sweep::{format_float, run_sweep_with, write_sweep, Parallelism, Param, Quantity, SweepConfig};

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> SweepConfig {
    SweepConfig::from_file(&configs_dir().join(name)).unwrap()
}

fn digest(bytes: &[u8]) -> Vec<u8> {
    Sha256::digest(bytes).to_vec()
}

#[test]
fn every_shipped_config_parses() {
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) == Some("sweep") {
            let cfg = SweepConfig::from_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.validate().unwrap();
        }
    }
}

#[test]
fn output_bytes_are_independent_of_concurrency() {
    let cfg = load("fig2_beta0_0.8.sweep");
    let serial = run_sweep_with(&cfg, Parallelism::Serial).unwrap().to_csv();
    let reference = digest(serial.as_bytes());
    for mode in [Parallelism::Parallel, Parallelism::Threads(1), Parallelism::Threads(3), Parallelism::Threads(8)] {
        assert_eq!(digest(run_sweep_with(&cfg, mode).unwrap().to_csv().as_bytes()), reference, "{mode:?}");
    }
}

#[test]
fn repeated_file_output_is_identical() {
    let cfg = load("witness.sweep");
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write_sweep(&cfg, Some(&a), Parallelism::Parallel).unwrap();
    write_sweep(&cfg, Some(&b), Parallelism::Threads(2)).unwrap();
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(digest(&x), digest(&y));
    let text = String::from_utf8(x).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 1 + 20 * 11);
    assert!(text.lines().all(|l| l.split(',').count() == 4));
}

#[test]
fn fig1_surface_is_mirror_symmetric() {
    let cfg = load("fig1.sweep");
    let r = run_sweep_with(&cfg, Parallelism::Parallel).unwrap();
    assert_eq!(r.header, ["J", "dBzeff", "chi", "error"]);
    assert_eq!(r.rows.len(), 101 * 101);
    for row in 0..101 {
        for i in 0..101 {
            let a = &r.rows[row * 101 + i];
            let b = &r.rows[row * 101 + 100 - i];
            assert_eq!(a.coords[0], b.coords[0]);
            assert_eq!(a.coords[1], -b.coords[1]);
            assert_eq!(a.value.unwrap().to_bits(), b.value.unwrap().to_bits());
        }
    }
}

#[test]
fn fig4_curves_are_non_increasing() {
    for name in ["fig4_fm.sweep", "fig4_afm.sweep"] {
        let r = run_sweep_with(&load(name), Parallelism::Parallel).unwrap();
        assert_eq!(r.rows.len(), 2 * 200);
        for curve in r.rows.chunks(200) {
            let chi: Vec<f64> = curve.iter().map(|row| row.value.unwrap()).collect();
            assert!(chi.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{name}");
        }
    }
}

#[test]
fn rows_agree_with_direct_calls() {
    let cfg = load("fig3_dbzeff_0.65.sweep");
    let r = run_sweep_with(&cfg, Parallelism::Parallel).unwrap();
    for (i, row) in r.rows.iter().enumerate().step_by(17) {
        let p = cfg.params_at(&[i]);
        assert_eq!(row.value.unwrap(), capacity(&p).unwrap().chi);
    }
}

#[test]
fn invalid_points_are_isolated() {
    // T = 0 is outside the thermal domain; its neighbours must be unaffected
    let cfg = SweepConfig::new(Quantity::Chi).fix(Param::J, 1.0).fix(Param::Beta0, 0.3).axis(Param::T, 0.0, 1.0, 5);
    let r = run_sweep_with(&cfg, Parallelism::Parallel).unwrap();
    assert_eq!(r.rows[0].value, None);
    assert_eq!(r.rows[0].error, Some("non_positive_temperature"));
    for row in &r.rows[1..] {
        let p = ModelParams::new(1.0, 0.3).with_temperature(row.coords[0]);
        assert_eq!(row.value.unwrap(), capacity(&p).unwrap().chi);
        assert_eq!(row.error, None);
    }
    let csv = r.to_csv();
    assert_eq!(csv.lines().nth(1).unwrap(), "0,,non_positive_temperature");

    // validity needs Bz = 0 at every point
    let v = SweepConfig::new(Quantity::Validity).fix(Param::J, 1.0).fix(Param::T, 0.1).axis(Param::Bz, 0.0, 0.2, 3);
    let rows = run_sweep_with(&v, Parallelism::Serial).unwrap().rows;
    assert!(rows[0].error.is_none());
    assert!(rows[1..].iter().all(|r| r.error == Some("out_of_domain")));
}

#[test]
fn float_formatting() {
    assert_eq!(format_float(0.05, 12), "0.05");
    assert_eq!(format_float(-0.0, 12), "0");
    assert_eq!(format_float(1.0 / 3.0, 5), "0.33333");
    assert_eq!(format_float(2.0, 12), "2");
    assert_eq!(format_float(4.7051465731989946e-08, 6), "4.70515e-8");
    assert_eq!(format_float(f64::NAN, 12), "NaN");
}
