use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_fusionsim");

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("FUSIONSIM_WORKERS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p
}

fn rows(path: &Path) -> Vec<HashMap<String, String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    rdr.records()
        .map(|r| header.iter().cloned().zip(r.unwrap().iter().map(String::from)).collect())
        .collect()
}

fn without_wall(mut row: HashMap<String, String>) -> HashMap<String, String> {
    row.remove("wall_seconds");
    row
}

fn num(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("{key} = {:?}", row[key]))
}

const SMALL: &str = r#"{
  "rho": 0.9,
  "delay": {"kind": "binary", "p": 0.95, "y_max": 20},
  "scheduler": "maf",
  "sampler": {"kind": "wf", "T": "auto"},
  "n_epochs": 2000,
  "replications": 6,
  "seed": 3,
  "solver": {"tune_epochs": 20000}
}"#;

fn simulate(dir: &Path, cfg: &Path, out: &str, envs: &[(&str, &str)]) -> PathBuf {
    let out = dir.join(out);
    let res = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], envs);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    out
}

#[test]
fn invalid_configs_exit_with_status_two() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o.csv");
    let cases = [
        (SMALL.replace("0.95", "1.5"), "delay.p"),
        (SMALL.replace("\"rho\": 0.9", "\"rho\": -0.1"), "rho"),
        (SMALL.replace("\"auto\"", "-2"), "sampler.T"),
        (SMALL.replace("\"seed\": 3", "\"seed\": 3, \"colour\": 1"), "colour"),
        (String::from("{not json"), "parse"),
    ];
    for (i, (json, field)) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{i}.json"), json);
        let res = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
        let stderr = String::from_utf8_lossy(&res.stderr);
        assert_eq!(code(&res), 2, "case {i}: {stderr}");
        assert!(stderr.contains(field), "case {i}: {stderr}");
    }
    let res = run(&["simulate", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(code(&res), 2);
    assert!(!out.exists());
}

#[test]
fn solver_non_convergence_exits_with_status_four() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", &SMALL.replace("\"tune_epochs\": 20000", "\"tune_epochs\": 20000, \"rvi_max_iter\": 3"));
    let out = dir.path().join("s.csv");
    let res = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert_eq!(code(&res), 4, "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn simulate_echoes_moments_and_appends_under_one_header() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", SMALL);
    let out = simulate(dir.path(), &cfg, "sim.csv", &[]);
    simulate(dir.path(), &cfg, "sim.csv", &[]);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("experiment,")).count(), 1);
    let rows = rows(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!((num(&rows[0], "mu_y"), num(&rows[0], "sigma_y")), (1.0, 20.0));
    assert!(num(&rows[0], "sampler_param") > 0.0);
    assert_eq!(without_wall(rows[0].clone()), without_wall(rows[1].clone()));
}

#[test]
fn echoed_config_reproduces_the_row() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", SMALL);
    let first = rows(&simulate(dir.path(), &cfg, "a.csv", &[])).remove(0);
    let echoed: serde_json::Value = serde_json::from_str(&first["config"]).unwrap();
    assert!(echoed["sampler"]["T"].is_number());
    let cfg2 = write_config(dir.path(), "echo.json", &first["config"]);
    let second = rows(&simulate(dir.path(), &cfg2, "b.csv", &[])).remove(0);
    for key in ["avg_mse_analytic", "avg_aoi", "horizon_time", "sampler_param"] {
        assert_eq!(first[key], second[key], "{key}");
    }
}

#[test]
fn output_independent_of_worker_count() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", SMALL);
    let one = rows(&simulate(dir.path(), &cfg, "w1.csv", &[("FUSIONSIM_WORKERS", "1")])).remove(0);
    let three = rows(&simulate(dir.path(), &cfg, "w3.csv", &[("FUSIONSIM_WORKERS", "3")])).remove(0);
    assert_eq!(without_wall(one), without_wall(three));
}

#[test]
fn water_filling_beats_zero_wait_under_long_delays() {
    let dir = TempDir::new().unwrap();
    let wf = SMALL.replace("\"y_max\": 20", "\"y_max\": 25");
    let zw = wf.replace(r#"{"kind": "wf", "T": "auto"}"#, r#"{"kind": "zero-wait"}"#);
    let out = simulate(dir.path(), &write_config(dir.path(), "wf.json", &wf), "cmp.csv", &[]);
    simulate(dir.path(), &write_config(dir.path(), "zw.json", &zw), "cmp.csv", &[]);
    let rows = rows(&out);
    assert_eq!((rows[0]["sampler"].as_str(), rows[1]["sampler"].as_str()), ("wf", "zero-wait"));
    assert!(num(&rows[0], "avg_mse_analytic") < num(&rows[1], "avg_mse_analytic"));
}

#[test]
fn mismatched_header_is_rejected_untouched() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", SMALL);
    let out = dir.path().join("other.csv");
    fs::write(&out, "experiment,something,else\n").unwrap();
    let res = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert_ne!(code(&res), 0);
    assert_eq!(fs::read_to_string(&out).unwrap(), "experiment,something,else\n");
}

#[test]
fn fig3_without_correlation_has_equal_columns() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", &SMALL.replace("\"rho\": 0.9", "\"rho\": 0.0"));
    let out = dir.path().join("f3.csv");
    let res = run(&["fig3", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let rows = rows(&out);
    assert!(rows.len() >= 3);
    for r in &rows {
        assert_eq!(r["avg_mse"], r["avg_aoi"]);
        assert_eq!(num(r, "relative_gap"), 0.0);
    }
}

#[test]
fn solve_is_deterministic_and_table_drives_the_tabular_sampler() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", SMALL);
    let out = dir.path().join("solve.csv");
    let table = dir.path().join("policy.tsv");
    let args = ["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--table", table.to_str().unwrap()];
    assert_eq!(code(&run(&args, &[])), 0);
    let first = fs::read(&table).unwrap();
    assert_eq!(code(&run(&args, &[])), 0);
    assert_eq!(first, fs::read(&table).unwrap());
    assert!(first.starts_with(b"gamma\ty\taction\trelative_value\n"));

    let summary = rows(&out);
    let lambda = num(&summary[0], "lambda_star");
    assert!(num(&summary[0], "theta").abs() <= num(&summary[0], "tol_lambda"));
    assert!(lambda > 0.0);

    let tab = SMALL.replace(
        r#"{"kind": "wf", "T": "auto"}"#,
        &format!(r#"{{"kind": "tabular", "table_path": {}}}"#, serde_json::to_string(&table).unwrap()),
    );
    let sim = simulate(dir.path(), &write_config(dir.path(), "tab.json", &tab), "tab.csv", &[]);
    assert_eq!(rows(&sim)[0]["sampler"], "tabular");

    fs::write(&table, "gamma\ty\taction\trelative_value\n0\t0\toops\t0\n").unwrap();
    let res = run(&["simulate", "--config", dir.path().join("tab.json").to_str().unwrap(), "--out", sim.to_str().unwrap()], &[]);
    assert_eq!(code(&res), 2, "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn verify_reports_every_check() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v.csv");
    let res = run(&["verify", "--suite", "estimator", "--suite", "equivalence", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let rows = rows(&out);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["passed"] == "true"));
    assert!(rows.iter().any(|r| r["suite"] == "estimator"));
    assert!(rows.iter().any(|r| r["suite"] == "equivalence"));
}
