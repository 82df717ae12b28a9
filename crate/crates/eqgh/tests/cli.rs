use std::path::Path;
use std::process::{Command, Output};

use eqgh::fixtures::three_point_pair;
use eqgh::io::{write_json, MeasureFile, SpaceFile, DATA_DIR_ENV};
use eqgh_core::metric::{gh_exact, FiniteMetricSpace};
use eqgh_core::wasserstein::DiscreteMeasure;

fn eqgh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqgh")).args(args).output().expect("binary runs")
}

fn csv_cell(text: &str, row: usize, col: usize) -> String {
    text.lines().nth(2 + row).unwrap().split(',').nth(col).unwrap().to_string()
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn identical_runs_write_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in [
        vec!["ot", "--seed", "3", "--p", "2"],
        vec!["shadow", "--seed", "5", "--delta", "0.001", "--window", "20"],
        vec!["folner", "--mesh", "32", "--n", "16"],
        vec!["gh", "--seed", "1"],
    ] {
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        for out in [&a, &b] {
            let mut args = cmd.clone();
            args.extend(["--out", out.to_str().unwrap()]);
            assert!(eqgh(&args).status.success(), "{cmd:?}");
        }
        assert_eq!(read(&a), read(&b), "{cmd:?}");
        assert!(String::from_utf8(read(&a)).unwrap().starts_with("# eqgh."));
    }
}

#[test]
fn ot_on_identical_measures_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let space = FiniteMetricSpace::line(&[0.0, 1.0, 2.5, 4.0]).unwrap();
    let mu = DiscreteMeasure::new(vec![0.25, 0.25, 0.5, 0.0]).unwrap();
    let (sp, mp) = (dir.path().join("x.json"), dir.path().join("mu.json"));
    write_json(&sp, &SpaceFile::from_space(&space)).unwrap();
    write_json(&mp, &MeasureFile::from_measure(&mu)).unwrap();
    let out = eqgh(&["ot", "--x", sp.to_str().unwrap(), "--mu", mp.to_str().unwrap(), "--nu", mp.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.ends_with("# value,0.0\n"), "{text}");
}

#[test]
fn gh_on_bundled_pair_matches_exact() {
    let (x, y) = three_point_pair();
    let want = gh_exact(&x, &y, None).unwrap().exact().unwrap();
    let out = eqgh(&["gh"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let got: f64 = csv_cell(&text, 0, 2).parse().unwrap();
    assert_eq!(got, want);
}

#[test]
fn gh_reads_space_files() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = three_point_pair();
    let (px, py) = (dir.path().join("x.json"), dir.path().join("y.json"));
    write_json(&px, &SpaceFile::from_space(&x)).unwrap();
    write_json(&py, &SpaceFile::from_space(&y)).unwrap();
    let out = eqgh(&["gh", "--x", px.to_str().unwrap(), "--y", py.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    let got: f64 = csv_cell(&text, 0, 2).parse().unwrap();
    assert_eq!(got, gh_exact(&x, &y, None).unwrap().exact().unwrap());
}

#[test]
fn usage_errors_exit_nonzero() {
    assert!(!eqgh(&["frobnicate"]).status.success());
    assert!(!eqgh(&["gh", "--x", "only-one.json"]).status.success());
    assert!(!eqgh(&["scenario", "--scenario", "no_such_thing"]).status.success());
    assert!(!eqgh(&["ot", "--p", "0.5"]).status.success());
}

#[test]
fn scenario_goes_to_data_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_eqgh"))
        .args(["scenario", "--scenario", "cat_map", "--mesh", "8"])
        .env(DATA_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let bundle: serde_json::Value = serde_json::from_slice(&read(&dir.path().join("cat_map.json"))).unwrap();
    assert_eq!(bundle["schema"], "eqgh.scenario/1");
    assert_eq!(bundle["spaces"][0]["points"], 64);
    assert_eq!(bundle["actions"][0]["mode"], "group");
}

#[test]
fn egh_reports_isometry_family() {
    let out = eqgh(&["egh", "--scenario", "isometry_family", "--n", "4", "--mesh", "12"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let eps: f64 = csv_cell(&text, 0, 3).parse().unwrap();
    let bound: f64 = csv_cell(&text, 1, 3).parse().unwrap();
    assert!(eps <= bound + 1e-9);
}

#[test]
fn shadow_sweeps_delta_within_bound() {
    let out = eqgh(&["shadow", "--delta", "0.01,0.001", "--window", "30"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4, "{text}");
    for row in 0..2 {
        assert_eq!(csv_cell(&text, row, 4), "true");
        let eps: f64 = csv_cell(&text, row, 1).parse().unwrap();
        let bound: f64 = csv_cell(&text, row, 3).parse().unwrap();
        assert!(eps <= bound + 1e-9);
    }
}

#[test]
fn shadow_reads_system_spec_and_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let (sys, cert) = (dir.path().join("sys.json"), dir.path().join("cert.json"));
    std::fs::write(&sys, r#"{"family": "toral_matrix", "mesh": 8, "matrix": [[3, 1], [2, 1]]}"#).unwrap();
    let out = eqgh(&["shadow", "--system", sys.to_str().unwrap(), "--cert", cert.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&read(&cert)).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 3);
    std::fs::write(&sys, r#"{"family": "torus", "mesh": 8}"#).unwrap();
    assert!(!eqgh(&["shadow", "--system", sys.to_str().unwrap()]).status.success());
}

#[test]
fn gh_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("gh.json");
    assert!(eqgh(&["gh", "--cert", cert.to_str().unwrap()]).status.success());
    let v: serde_json::Value = serde_json::from_slice(&read(&cert)).unwrap();
    assert!(v["search"]["forward"].is_object());
}
