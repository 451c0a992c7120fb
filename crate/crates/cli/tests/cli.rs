use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn gareg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gareg")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn trace_best(dir: &Path) -> Vec<f64> {
    let text = fs::read_to_string(dir.join("trace.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("generation,best_fitness,accepted"));
    lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect()
}

/// Noiseless two-break joinpoint data on x = 1..40.
fn joinpoint_csv(dir: &Path) -> PathBuf {
    let mut text = String::from("x,y\n");
    for i in 1..=40 {
        let x = f64::from(i);
        let y = 0.5 * x - 1.5 * (x - 14.0).max(0.0) + 2.0 * (x - 27.0).max(0.0);
        text.push_str(&format!("{x},{y}\n"));
    }
    write(dir, "joinpoint.csv", &text)
}

#[test]
fn knots_run_writes_all_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let data = joinpoint_csv(tmp.path());
    let out = tmp.path().join("out");
    let o = gareg(&[
        "knots", "--input", p(&data), "--type", "bs", "--degree", "1", "--pop-size", "30", "--max-gen", "60", "--seed", "1",
        "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&out);
    assert_eq!(r["mode"], "knots");
    assert_eq!(r["seed"], 1);
    assert_eq!(r["ic_kind"], "BIC");
    assert!(r.get("wall_time_secs").is_none());
    let best = &r["best"]["knots"];
    let values: Vec<f64> = best["knot_values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let indices: Vec<u64> = best["knot_indices"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    // 1-based grid positions coincide with x on this grid.
    assert_eq!(values.iter().map(|&v| v as u64).collect::<Vec<_>>(), indices);
    assert_eq!(best["free_params"].as_u64().unwrap() as usize, values.len() + 2);

    let trace = trace_best(&out);
    assert_eq!(trace.len(), r["generations"].as_u64().unwrap() as usize);
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*trace.last().unwrap(), r["best_fitness"].as_f64().unwrap());

    let fit = fs::read_to_string(out.join("fit.csv")).unwrap();
    let mut lines = fit.lines();
    assert_eq!(lines.next(), Some("x,y,fitted,source"));
    assert_eq!(lines.filter(|l| l.ends_with("observed")).count(), 40);
}

#[test]
fn knots_oracle_report() {
    let tmp = tempfile::tempdir().unwrap();
    let data = joinpoint_csv(tmp.path());
    let out = tmp.path().join("out");
    let o = gareg(&[
        "knots", "--input", p(&data), "--type", "bs", "--degree", "1", "--fixed-knots", "2", "--pop-size", "40",
        "--max-gen", "200", "--seed", "2", "--oracle", "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&out);
    let oracle = &r["oracle"];
    assert_eq!(oracle["best_configurations"], serde_json::json!([[14, 27]]));
    assert_eq!(oracle["ga_attains_optimum"], true);
    assert_eq!(r["best"]["knots"]["knot_indices"], serde_json::json!([14, 27]));
    assert!(oracle["evaluated_count"].as_u64().unwrap() > 0);
}

#[test]
fn report_time_is_opt_in() {
    let tmp = tempfile::tempdir().unwrap();
    let data = joinpoint_csv(tmp.path());
    let out = tmp.path().join("out");
    let o = gareg(&[
        "knots", "--input", p(&data), "--fixed-knots", "1", "--pop-size", "10", "--max-gen", "3", "--seed", "3",
        "--report-time", "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(report(&out)["wall_time_secs"].as_f64().unwrap() >= 0.0);
}

#[test]
fn ns_with_degree_warns() {
    let tmp = tempfile::tempdir().unwrap();
    let data = joinpoint_csv(tmp.path());
    let out = tmp.path().join("out");
    let o = gareg(&[
        "knots", "--input", p(&data), "--type", "ns", "--degree", "2", "--fixed-knots", "1", "--pop-size", "10",
        "--max-gen", "3", "--seed", "5", "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("ignored for ns"), "{}", stderr(&o));
    assert_eq!(report(&out)["best"]["knots"]["free_params"], 3);

    let quiet = gareg(&[
        "knots", "--input", p(&data), "--type", "ns", "--fixed-knots", "1", "--pop-size", "10", "--max-gen", "3",
        "--seed", "5", "--out", p(&out),
    ]);
    assert!(!stderr(&quiet).contains("ignored for ns"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let data = joinpoint_csv(tmp.path());
    let out = tmp.path().join("out");
    let base = ["--pop-size", "10", "--max-gen", "2", "--seed", "1", "--out", p(&out)];

    let run = |extra: &[&str]| {
        let mut a = vec!["knots"];
        a.extend_from_slice(extra);
        a.extend_from_slice(&base);
        gareg(&a)
    };
    assert_eq!(run(&["--input", p(&data), "--fixed-knots", "1"]).status.code(), Some(0));

    let missing = run(&["--input", p(&data), "--y-col", "nope"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).contains("nope"));

    let bad = write(tmp.path(), "bad.csv", "x,y\n1,2\n2,abc\n");
    let o = run(&["--input", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("row 2"), "{}", stderr(&o));

    let o = run(&["--input", p(&data), "--fixed-knots", "20"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    assert_eq!(run(&["--input", p(&tmp.path().join("absent.csv"))]).status.code(), Some(1));
    assert_eq!(gareg(&["knots", "--bogus"]).status.code(), Some(1));
    assert_eq!(gareg(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_subset_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let o = gareg(&["simulate", "--seed", "123", "--out", p(tmp.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let data = fs::read_to_string(tmp.path().join("data.csv")).unwrap();
    let mut lines = data.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 51);
    assert_eq!(header[0], "y");
    assert_eq!(header[50], "x50");
    assert_eq!(lines.count(), 100);
    let truth: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("truth.json")).unwrap()).unwrap();
    assert_eq!(truth["true_idx"].as_array().unwrap().len(), 25);
}

#[test]
fn simulate_rho_changes_errors_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let dirs: Vec<PathBuf> = ["a", "b", "c"].iter().map(|d| tmp.path().join(d)).collect();
    for (dir, rho) in dirs.iter().zip(["0.6", "0.6", "0"]) {
        let o = gareg(&["simulate", "--n", "40", "--p", "8", "--s0", "2", "--rho", rho, "--seed", "9", "--out", p(dir)]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let read = |d: &PathBuf| fs::read(d.join("data.csv")).unwrap();
    assert_eq!(read(&dirs[0]), read(&dirs[1]));
    assert_ne!(read(&dirs[0]), read(&dirs[2]));
}

#[test]
fn subset_trace_is_non_decreasing_and_names_predictors() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    assert!(gareg(&["simulate", "--n", "80", "--p", "8", "--s0", "3", "--seed", "4", "--out", p(&sim)]).status.success());
    let out = tmp.path().join("out");
    let o = gareg(&[
        "subset", "--input", p(&sim.join("data.csv")), "--max-gen", "400", "--stall", "200", "--seed", "4", "--oracle",
        "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&out);
    assert_eq!(r["mode"], "subset");
    let best = &r["best"]["subset"];
    let selected = best["selected"].as_array().unwrap();
    let names = best["selected_names"].as_array().unwrap();
    assert_eq!(selected.len(), names.len());
    for (i, n) in selected.iter().zip(names) {
        assert_eq!(n.as_str().unwrap(), format!("x{}", i.as_u64().unwrap()));
    }
    assert_eq!(best["coefficients"].as_array().unwrap().len(), selected.len());
    let trace = trace_best(&out);
    assert!(trace.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(r["oracle"]["evaluated_count"], 256);
}

#[test]
fn subset_oracle_refuses_wide_data() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    assert!(gareg(&["simulate", "--n", "60", "--p", "21", "--s0", "3", "--seed", "4", "--out", p(&sim)]).status.success());
    let o = gareg(&["subset", "--input", p(&sim.join("data.csv")), "--max-gen", "2", "--oracle", "--seed", "1", "--out", p(tmp.path())]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn island_runs_ignore_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    let data = joinpoint_csv(tmp.path());
    let run = |workers: &str| {
        let out = tmp.path().join(format!("w{workers}"));
        let o = gareg(&[
            "knots", "--input", p(&data), "--method", "island", "--islands", "4", "--migration-interval", "2",
            "--max-mig", "5", "--pop-size", "10", "--workers", workers, "--seed", "8", "--out", p(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        (fs::read(out.join("report.json")).unwrap(), fs::read(out.join("trace.csv")).unwrap())
    };
    let one = run("1");
    assert_eq!(one, run("2"));
    assert_eq!(one, run("4"));
}

#[test]
fn seed_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gareg"))
        .args(["simulate", "--kind", "knots", "--n", "30", "--out", p(tmp.path())])
        .env("GAREG_SEED", "77")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let truth: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("truth.json")).unwrap()).unwrap();
    assert_eq!(truth["seed"], 77);
}
