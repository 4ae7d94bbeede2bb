use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64;
use resonance_core::scattering::{solve_scattering, PiecewisePotential};
use resonance_lab::output::parse_numeric_csv;

fn run(sub: &str, config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resonance-lab"))
        .args([sub, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("RESONANCE_LAB_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

const SCATTER_FIG5: &str = "[potential]\npreset = fig5_well\n[sweep]\nvariable = energy\nmin = 0.5\nmax = 60\npoints = 300\n";

#[test]
fn scatter_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.ini", SCATTER_FIG5);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run("scatter", &cfg, &a).status.success());
    assert!(run("scatter", &cfg, &b).status.success());
    for file in ["transmission.csv", "results.json", "transmission.svg"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn csv_round_trip_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.ini", SCATTER_FIG5);
    let out = dir.path().join("o");
    assert!(run("scatter", &cfg, &out).status.success());
    let (columns, rows) = parse_numeric_csv(&fs::read_to_string(out.join("transmission.csv")).unwrap()).unwrap();
    assert_eq!(columns, vec!["energy", "transmission", "reflection"]);
    assert_eq!(rows.len(), 300);
    let v = PiecewisePotential::fig5_well();
    for row in &rows {
        let sol = solve_scattering(&v, Complex64::new(row[0].sqrt(), 0.0)).unwrap();
        assert!((row[1] - sol.transmission()).abs() < 1e-10);
        assert!((row[2] - sol.reflection()).abs() < 1e-10);
    }
}

#[test]
fn free_potential_transmits_fully() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "free.ini",
        "[potential]\npreset = free\n[sweep]\nvariable = energy\nmin = 0.1\nmax = 10\npoints = 20\n[output]\nformats = csv\n",
    );
    let out = dir.path().join("o");
    assert!(run("scatter", &cfg, &out).status.success());
    let (_, rows) = parse_numeric_csv(&fs::read_to_string(out.join("transmission.csv")).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r[1] == 1.0));
    assert!(!out.join("results.json").exists());
}

#[test]
fn poles_lists_fourth_quadrant_resonances() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.ini", "[potential]\npreset = fig5_well\n[output]\nformats = csv\n");
    let out = dir.path().join("o");
    assert!(run("poles", &cfg, &out).status.success());
    let text = fs::read_to_string(out.join("poles.csv")).unwrap();
    let resonances: Vec<Vec<&str>> =
        text.lines().skip(1).map(|l| l.split(',').collect::<Vec<_>>()).filter(|c| c[4] == "resonance").collect();
    assert!(resonances.len() >= 5);
    for r in resonances {
        assert!(r[0].parse::<f64>().unwrap() > 0.0 && r[1].parse::<f64>().unwrap() < 0.0);
    }
}

#[test]
fn empty_pole_table_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.ini", "[potential]\npreset = free\n");
    let out = dir.path().join("o");
    let result = run("poles", &cfg, &out);
    assert!(result.status.success());
    assert_eq!(fs::read_to_string(out.join("poles.csv")).unwrap(), "re_k,im_k,re_eps,im_eps,kind,residual\n");
    assert!(String::from_utf8_lossy(&result.stderr).contains("empty"));
}

#[test]
fn fbw_fit_rms_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "f.ini", "[potential]\npreset = fig5_well\n[fbw]\nterms = 5\n[output]\nformats = csv\n");
    let out = dir.path().join("o");
    assert!(run("fbw-fit", &cfg, &out).status.success());
    let (_, rows) = parse_numeric_csv(&fs::read_to_string(out.join("fbw_rms.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");

    let bad_syntax = write_config(dir.path(), "bad.ini", "[potential]\npreset fig5_well\n");
    let r = run("scatter", &bad_syntax, &out);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("line 2"));

    let bad_preset = write_config(dir.path(), "preset.ini", "[potential]\npreset = nowhere\n");
    assert_eq!(run("scatter", &bad_preset, &out).status.code(), Some(2));

    let one_point = write_config(dir.path(), "sweep.ini", &SCATTER_FIG5.replace("points = 300", "points = 1"));
    assert_eq!(run("scatter", &one_point, &out).status.code(), Some(2));

    let missing = dir.path().join("absent.ini");
    assert_eq!(run("scatter", &missing, &out).status.code(), Some(2));

    // No resonances exist for the free particle, so the fit cannot be computed.
    let free = write_config(dir.path(), "free.ini", "[potential]\npreset = free\n");
    assert_eq!(run("fbw-fit", &free, &out).status.code(), Some(3));

    let threads = Command::new(env!("CARGO_BIN_EXE_resonance-lab"))
        .args(["scatter", "--config"])
        .arg(&bad_preset)
        .env("RESONANCE_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn formats_flag_overrides_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.ini", SCATTER_FIG5);
    let out = dir.path().join("o");
    let r = Command::new(env!("CARGO_BIN_EXE_resonance-lab"))
        .args(["scatter", "--formats", "svg", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(r.status.success());
    assert!(out.join("transmission.svg").exists());
    assert!(!out.join("transmission.csv").exists());
}
