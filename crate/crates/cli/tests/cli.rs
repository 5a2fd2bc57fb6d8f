//! End-to-end runs of the `mzient` binary.

use std::path::Path;
use std::process::{Command, Output};

fn mzient(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzient")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn resonant_single_photon_table() {
    let o = mzient(&["run", "--n", "1", "--m", "0", "--delta", "0", "--omega-at", "resonance"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("(1,0)            0.500000000000       1.000000000000"), "{text}");
    assert!(text.contains("(0,1)            0.500000000000       1.000000000000"), "{text}");
    assert!(text.contains("C_avg = 1.000000000000"), "{text}");
}

#[test]
fn pair_at_the_midpoint_is_maximally_entangling() {
    let o = mzient(&["run", "--n", "1", "--m", "1", "--delta-over-gamma", "1", "--omega-at", "midpoint"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("C_avg = 1.000000000000"));
}

#[test]
fn lossy_click_detectors_give_four_outcomes_summing_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = mzient(&[
        "run", "--n", "1", "--m", "1", "--beta", "0.9", "--detector", "nnr", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["p", "q", "probability", "concurrence"]);
    assert_eq!(rows.len(), 4);
    let total: f64 = rows.iter().map(|r| num(&r[2])).sum();
    assert!((total - 1.0).abs() < 1e-12, "sum {total}");

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["parameters"]["detector"], "nnr");
    assert_eq!(meta["parameters"]["beta2"], 0.9);
    assert!(meta["parameters"]["c_avg"].as_f64().unwrap() < 1.0);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pair.toml");
    std::fs::write(
        &cfg,
        "[system]\ngamma1 = 1.0\ndelta = 1.0\n\n[input]\nn = 1\nm = 1\n\n[photon]\nomega_at = \"midpoint\"\n",
    )
    .unwrap();
    let base = mzient(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(base.status.code(), Some(0), "{}", stderr(&base));
    assert!(stdout(&base).contains("C_avg = 1.000000000000"));

    let moved = mzient(&["run", "--config", cfg.to_str().unwrap(), "--omega", "0"]);
    assert_eq!(moved.status.code(), Some(0));
    assert!(!stdout(&moved).contains("C_avg = 1.000000000000"));
}

#[test]
fn sweep_41_by_41_has_1681_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let o = mzient(&["sweep", "--n", "1", "--m", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["delta_over_g1", "g2_over_g1", "c_avg_max", "omega_opt"]);
    assert_eq!(rows.len(), 1681);
    for r in &rows {
        let c = num(&r[2]);
        assert!((0.0..=1.0 + 1e-12).contains(&c));
        // 12 significant digits: d.ddddddddddde±x
        assert_eq!(r[2].split('e').next().unwrap().trim_start_matches('-').len(), 13, "{}", r[2]);
    }
    assert!(dir.path().join("grid.meta.json").exists());
}

#[test]
fn repeated_sweeps_are_byte_identical() {
    let args = [
        "sweep", "--n", "2", "--m", "2", "--delta-points", "9", "--g2-points", "7",
    ];
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_mzient"))
            .args(args)
            .env("MZIENT_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        o.stdout
    };
    let first = run("1");
    assert_eq!(first, run("1"));
    assert_eq!(first, run("3"));
    assert_eq!(String::from_utf8(first).unwrap().lines().count(), 1 + 63);
}

#[test]
fn optimum_on_the_window_edge_is_flagged() {
    let o = mzient(&["optimize", "--gamma", "3", "--delta", "0.5", "--lo", "10", "--hi", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning: the optimum lies on the edge"), "{}", stderr(&o));
    assert!(stdout(&o).contains("omega_opt = 10.000000000000"));

    let inside = mzient(&["optimize", "--n", "1", "--m", "1"]);
    assert!(!stderr(&inside).contains("warning"));
    assert!(stdout(&inside).contains("C_avg max = 1.0000000"), "{}", stdout(&inside));
}

#[test]
fn figure_3a_schema_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = mzient(&["figure", "3a", "--samples", "11", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = read_csv(&dir.path().join("fig3a.csv"));
    assert_eq!(header, ["omega_minus_E1_ueV", "gamma_ueV", "c_avg"]);
    assert_eq!(rows.len(), 33);
    let mut series: Vec<f64> = rows.iter().map(|r| num(&r[1])).collect();
    series.dedup();
    assert_eq!(series, [0.66, 1.0, 2.0]);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig3a.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["parameters"]["figure"], "3a");
    assert_eq!(meta["parameters"]["delta_ueV"], 1.0);
    assert_eq!(meta["columns"][2], "c_avg");
}

#[test]
fn figure_grids_share_one_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = mzient(&["figure", "4b", "--grid", "5", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = read_csv(&dir.path().join("fig4b.csv"));
    assert_eq!(header, ["delta_over_g1", "g2_over_g1", "c_avg_max", "omega_opt"]);
    assert_eq!(rows.len(), 25);

    let o = mzient(&["figure", "S1", "--grid", "3", "--max-photons", "3", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["S1_n1_m0", "S1_n2_m0", "S1_n1_m1", "S1_n3_m0", "S1_n2_m1"] {
        let (header, rows) = read_csv(&dir.path().join(format!("fig{name}.csv")));
        assert_eq!(header[2], "c_avg_max");
        assert_eq!(rows.len(), 9);
    }
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[system]\ngamma_one = 1.0\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["figure", "5z"],
        vec!["run", "--n", "2", "--m", "1", "--beta", "0.9"],
        vec!["run", "--gamma1", "-1"],
        vec!["run", "--envelope", "gaussian"],
        vec!["run", "--n", "2", "--m", "2", "--envelope", "square", "--sigma", "1"],
        vec!["run", "--config", bad.to_str().unwrap()],
        vec!["run", "--config", "/nonexistent/config.toml"],
        vec!["sweep", "--delta-min", "2", "--delta-max", "1"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = mzient(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let o = mzient(&["run", "--n", "2", "--m", "1", "--beta", "0.9"]);
    assert!(stderr(&o).contains("protocols"), "error should name the module: {}", stderr(&o));

    let o = Command::new(env!("CARGO_BIN_EXE_mzient")).args(["run"]).env("MZIENT_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
