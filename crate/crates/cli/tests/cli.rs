use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn dualmcl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualmcl")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
        .parse()
        .unwrap()
}

fn write_preset(dir: &Path, name: &str, steps: usize) -> String {
    let out = dualmcl(&["preset", name]);
    assert!(out.status.success());
    let mut cfg: Value = serde_json::from_slice(&out.stdout).unwrap();
    cfg["n_steps"] = json!(steps);
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, cfg.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_trace_and_replay_reproduces_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_preset(dir.path(), "case1", 50);
    let trace = dir.path().join("trace.csv");
    let trace = trace.to_str().unwrap();

    let sim = dualmcl(&["simulate", &cfg, "--trace", trace, "--seed", "3", "--skip-transient", "10"]);
    assert!(sim.status.success(), "{}", String::from_utf8_lossy(&sim.stderr));
    let text = stdout(&sim);
    assert_eq!(field(&text, "steps"), 50.0);
    assert_eq!(field(&text, "seed"), 3.0);

    let csv = fs::read_to_string(trace).unwrap();
    assert!(csv.starts_with("k,t,r_x,r_y,rhat_x,rhat_y,d1,d2,d3,rmeas_x,rmeas_y,v0x_cmd,v0y_cmd,err\n"));
    assert_eq!(csv.lines().count(), 51);

    // same estimator, config and seed gives the same estimates
    let rep = dualmcl(&["replay", trace, "--estimator", "dual_mcl", "--config", &cfg, "--seed", "3", "--skip-transient", "10"]);
    assert!(rep.status.success(), "{}", String::from_utf8_lossy(&rep.stderr));
    assert_eq!(field(&stdout(&rep), "rmse"), field(&text, "rmse"));

    let out = dir.path().join("ekf.csv");
    let rep = dualmcl(&["replay", trace, "--estimator", "ekf", "--config", &cfg, "--steps", "20", "--out", out.to_str().unwrap()]);
    assert!(rep.status.success());
    assert_eq!(field(&stdout(&rep), "steps"), 20.0);
    assert!(field(&stdout(&rep), "rmse").is_finite());
    assert_eq!(fs::read_to_string(out).unwrap().lines().count(), 21);
}

#[test]
fn steps_override_and_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_preset(dir.path(), "static", 30);
    let sim = dualmcl(&["simulate", &cfg, "--steps", "12"]);
    assert!(sim.status.success());
    assert_eq!(field(&stdout(&sim), "steps"), 12.0);

    assert!(!dualmcl(&["simulate", "/nonexistent/config.json"]).status.success());
    // skipping every step leaves nothing to average
    assert!(!dualmcl(&["simulate", &cfg, "--skip-transient", "30"]).status.success());

    let mut bad: Value = serde_json::from_str(&fs::read_to_string(&cfg).unwrap()).unwrap();
    bad["foo"] = json!(1);
    let bad_path = dir.path().join("bad.json");
    fs::write(&bad_path, bad.to_string()).unwrap();
    let out = dualmcl(&["simulate", bad_path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("foo"));

    assert!(!dualmcl(&["preset", "nope"]).status.success());
}

#[test]
fn sweep_tables_agree() {
    let dir = tempfile::tempdir().unwrap();
    let preset = dualmcl(&["preset", "case1"]);
    let mut base: Value = serde_json::from_slice(&preset.stdout).unwrap();
    base["n_steps"] = json!(30);
    let spec = json!({ "base": base, "axis": { "particle_count": [50, 100] }, "repeats": 3 });
    let spec_path = dir.path().join("sweep.json");
    fs::write(&spec_path, spec.to_string()).unwrap();
    let raw = dir.path().join("raw.csv");

    let out = dualmcl(&["sweep", spec_path.to_str().unwrap(), "--out", raw.to_str().unwrap(), "--seed", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let raw = fs::read_to_string(raw).unwrap();
    let rows: Vec<Vec<&str>> = raw.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    let seeds: Vec<&str> = rows.iter().filter(|r| r[0] == "50").map(|r| r[1]).collect();
    assert_eq!(seeds, ["10", "11", "12"]);

    let summary = stdout(&out);
    assert_eq!(summary.lines().next(), Some("value,runs,mean_rmse,std_rmse"));
    for line in summary.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let vals: Vec<f64> = rows.iter().filter(|r| r[0] == cols[0]).map(|r| r[2].parse().unwrap()).collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let std = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert_eq!(cols[1], "3");
        assert!((cols[2].parse::<f64>().unwrap() - mean).abs() < 1e-9);
        assert!((cols[3].parse::<f64>().unwrap() - std).abs() < 1e-9);
    }
}

#[test]
fn calibrate_recovers_bias_and_spread() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.csv");
    let mut text = String::from("anchor_id,measured_m,truth_m\n");
    // residuals per anchor: {b - s, b + s}, so mean b and sample std s * sqrt(2)
    for (id, b, s) in [(1, 0.1, 0.02), (2, -0.05, 0.01), (3, 0.0, 0.03)] {
        for sign in [-1.0, 1.0] {
            text += &format!("{id},{},2.0\n", 2.0 + b + sign * s);
        }
    }
    fs::write(&path, text).unwrap();
    let out = dualmcl(&["calibrate", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = stdout(&out);
    let lines: Vec<Vec<f64>> = body
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    for (row, (b, s)) in lines.iter().zip([(0.1, 0.02), (-0.05, 0.01), (0.0, 0.03)]) {
        assert_eq!(row[1], 2.0);
        assert!((row[2] - b).abs() < 1e-6);
        assert!((row[3] - s * 2f64.sqrt()).abs() < 1e-6);
    }

    fs::write(&path, "anchor_id,measured_m,truth_m\n1,2.0,2.0\n").unwrap();
    assert!(!dualmcl(&["calibrate", path.to_str().unwrap()]).status.success());
}
