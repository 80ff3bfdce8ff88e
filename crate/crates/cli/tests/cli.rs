use std::fs::{self, File};
use std::path::Path;
use std::process::{Command, Output};

use hookebook::io::{read_classify_csv, read_diagram_csv, read_monodromy_json, read_spectrum_json, read_theta_csv, read_trajectory_csv};
use hookebook::linearization::SpectrumClass;
use hookebook::momentum::{classify_fiber, inner_radius, FiberClass};
use hookebook::model::BookTable;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hookebook"))
        .args(args)
        .env("HOOKEBOOK_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn simulate_round_trip_confined_to_annulus() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate", "--h", "-0.25", "--f", "0.3", "--reflections", "40"]);
    let rows = read_trajectory_csv(File::open(dir.path().join("trajectory.csv")).unwrap()).unwrap();
    assert!(rows.len() >= 40 * 16);
    let r0 = inner_radius(-0.25, 0.3, -1.0).unwrap();
    for r in &rows {
        let rad = r.x.hypot(r.y);
        assert!(rad >= r0 - 1e-9 && rad <= 1.0 + 1e-12, "r = {rad}");
        assert!((r.h + 0.25).abs() < 1e-9 && (r.f - 0.3).abs() < 1e-9);
    }
    let svg = fs::read_to_string(dir.path().join("trajectory.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn diameter_orbit_passes_through_the_center() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate", "--h", "0.5", "--f", "0", "--reflections", "3", "--points", "201"]);
    let rows = read_trajectory_csv(File::open(dir.path().join("trajectory.csv")).unwrap()).unwrap();
    let closest = rows.iter().map(|r| r.x.hypot(r.y)).fold(f64::INFINITY, f64::min);
    assert!(closest < 1e-9, "closest approach {closest}");
}

#[test]
fn empty_stop_condition_prints_usage() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["simulate", "--h", "0.5", "--f", "0.2"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("stop condition") && err.contains("Usage: hookebook simulate"), "{err}");
    assert!(!dir.path().join("trajectory.csv").exists());
}

#[test]
fn same_seed_same_bytes() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let c = TempDir::new().unwrap();
    let args = ["--seed", "17", "-n", "3", "simulate", "--random", "1.2", "--reflections", "25"];
    ok(a.path(), &args);
    ok(b.path(), &args);
    let mut other = args;
    other[1] = "18";
    ok(c.path(), &other);
    let read = |d: &TempDir| fs::read(d.path().join("trajectory.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    for name in ["trajectory.svg", "simulate.config.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    }

    ok(a.path(), &["--seed", "5", "classify", "--random", "300"]);
    ok(b.path(), &["--seed", "5", "classify", "--random", "300"]);
    assert_eq!(fs::read(a.path().join("classify.csv")).unwrap(), fs::read(b.path().join("classify.csv")).unwrap());
}

#[test]
fn eigen_reports_focus_focus() {
    let dir = TempDir::new().unwrap();
    for (k, re) in [("-1", 1.0), ("-4", 2.0)] {
        ok(dir.path(), &["-k", k, "eigen"]);
        let report = read_spectrum_json(File::open(dir.path().join("spectrum.json")).unwrap()).unwrap();
        assert_eq!(report.classification, SpectrumClass::FocusFocus);
        for [a, b] in report.eigenvalues {
            assert!((a.abs() - re).abs() < 1e-12 && (b.abs() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["-k", "1", "eigen"])), 2);
    assert_eq!(code(&run(dir.path(), &["-n", "0", "diagram"])), 2);
    assert_eq!(code(&run(dir.path(), &["rotation", "--at", "-0.6,0"])), 2);
    // start outside the image of the momentum map
    assert_eq!(code(&run(dir.path(), &["simulate", "--h", "-0.6", "--f", "0", "--reflections", "2"])), 2);
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"sheets": 2}"#).unwrap();
    assert_eq!(code(&run(dir.path(), &["--config", cfg.to_str().unwrap(), "eigen"])), 2);
}

#[test]
fn numerical_failure_exits_with_three() {
    let dir = TempDir::new().unwrap();
    // on the stable manifold of the origin: the orbit never reaches the boundary
    let out = run(dir.path(), &["simulate", "--x", "0.5", "--y", "0", "--vx", "-0.5", "--vy", "0", "--reflections", "1"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    // rest at the origin is rejected as input instead
    let out = run(dir.path(), &["simulate", "--x", "0", "--y", "0", "--vx", "0", "--vy", "0", "--max-time", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn monodromy_round_trip_and_labels() {
    let dir = TempDir::new().unwrap();
    for n in [1usize, 3] {
        ok(dir.path(), &["-n", &n.to_string(), "monodromy"]);
        let report = read_monodromy_json(File::open(dir.path().join("monodromy.json")).unwrap()).unwrap();
        assert_eq!(report.m, n as i64);
        assert_eq!(report.monodromy_matrix, [[1, 0], [n as i64, 1]]);
        let theta = read_theta_csv(File::open(dir.path().join("theta.csv")).unwrap()).unwrap();
        assert_eq!(theta.len(), report.samples.len());
        for (a, b) in theta.iter().zip(&report.samples) {
            assert_eq!(a.theta_unwrapped.to_bits(), b.theta_unwrapped.to_bits());
        }
        let json = fs::read_to_string(dir.path().join("monodromy.json")).unwrap();
        assert!(json.contains("\"inf\""));
    }
}

#[test]
fn non_enclosing_loop_has_trivial_monodromy() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["-n", "2", "monodromy", "--vertex", "0.3,0.2", "--vertex", "0.6,0.2", "--vertex", "0.6,0.5"]);
    let report = read_monodromy_json(File::open(dir.path().join("monodromy.json")).unwrap()).unwrap();
    assert_eq!(report.m, 0);
    assert_eq!(report.monodromy_matrix, [[1, 0], [0, 1]]);
}

#[test]
fn diagram_overlay_matches_classifier() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["-n", "2", "diagram", "--overlay", "31", "--show-loop"]);
    let rows = read_diagram_csv(File::open(dir.path().join("diagram.csv")).unwrap()).unwrap();
    let vertex = rows.iter().filter(|r| !r.singular).min_by(|a, b| a.h.total_cmp(&b.h)).unwrap();
    assert!(vertex.f.abs() < 1e-12 && (vertex.h + 0.5).abs() < 1e-12);
    let isolated: Vec<_> = rows.iter().filter(|r| r.singular).collect();
    assert_eq!(isolated.len(), 1);
    assert_eq!((isolated[0].f, isolated[0].h), (0.0, 0.0));

    let table = BookTable::unit(-1.0, 2).unwrap();
    let overlay = read_classify_csv(File::open(dir.path().join("classify.csv")).unwrap()).unwrap();
    assert_eq!(overlay.len(), 31 * 31);
    for v in &overlay {
        assert_eq!(v.class, classify_fiber(&table, v.h, v.f));
    }
    assert!(overlay.iter().any(|v| v.class == FiberClass::PinchedTorus { pinches: 2 }));
    let svg = fs::read_to_string(dir.path().join("diagram.svg")).unwrap();
    assert!(svg.contains("r=\"4\""));
}

#[test]
fn flags_override_the_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"k": -4.0, "eigen": {"lambda": 2.0}}"#).unwrap();
    ok(dir.path(), &["--config", cfg.to_str().unwrap(), "eigen", "--mu", "3"]);
    let report = read_spectrum_json(File::open(dir.path().join("spectrum.json")).unwrap()).unwrap();
    assert_eq!((report.k, report.lambda, report.mu), (-4.0, 2.0, 3.0));
    let recorded: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("eigen.config.json")).unwrap()).unwrap();
    assert_eq!(recorded["eigen"]["mu"], 3.0);
    // untouched defaults are recorded too
    assert_eq!(recorded["radius"], 1.0);
    assert_eq!(recorded["seed"], 0);
}

#[test]
fn rotation_quadrature_agrees_with_simulation() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["-n", "3", "rotation", "--at", "0.5,0.3", "--at", "-0.2,-0.4"]);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("rotation.json")).unwrap()).unwrap();
    for row in report["rows"].as_array().unwrap() {
        for key in ["radial_period", "angular_advance"] {
            let q = row["quadrature"][key].as_f64().unwrap();
            let s = row["simulation"][key].as_f64().unwrap();
            assert!((q - s).abs() < 1e-6, "{key}: {q} vs {s}");
        }
    }
}

#[test]
fn plot_rerenders_each_artifact() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate", "--h", "0.2", "--f", "0.4", "--reflections", "10"]);
    ok(dir.path(), &["diagram", "--overlay", "11"]);
    ok(dir.path(), &["-n", "2", "monodromy", "--points-per-side", "24", "--no-svg"]);
    let again = dir.path().join("again.svg");
    ok(dir.path(), &["plot", dir.path().join("trajectory.csv").to_str().unwrap(), "-o", again.to_str().unwrap()]);
    assert_eq!(fs::read(&again).unwrap(), fs::read(dir.path().join("trajectory.svg")).unwrap());
    for name in ["diagram.csv", "classify.csv", "theta.csv"] {
        ok(dir.path(), &["plot", dir.path().join(name).to_str().unwrap()]);
        let svg = dir.path().join(name.replace(".csv", ".svg"));
        assert!(fs::read_to_string(svg).unwrap().starts_with("<svg"));
    }
    let junk = dir.path().join("junk.csv");
    fs::write(&junk, "a,b\n1,2\n").unwrap();
    assert_eq!(code(&run(dir.path(), &["plot", junk.to_str().unwrap()])), 2);
}
