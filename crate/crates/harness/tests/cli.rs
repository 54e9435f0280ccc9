use std::path::Path;
use std::process::{Command, Output};

use fragstoch::report::Report;
use fragstoch::Config;

const SMALL: &str = "
[tagged]
n = 100
grid_points = 2049
pd_sticks = 400

[bijection]
n = 20
grid_points = 2049

[obliteration]
n = 100
grid_points = 2049
";

fn fragstoch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fragstoch")).args(args).output().expect("binary runs")
}

fn small_config(dir: &Path) -> String {
    let p = dir.join("small.toml");
    std::fs::write(&p, SMALL).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn config_prints_parseable_defaults() {
    let out = fragstoch(&["config"]);
    assert!(out.status.success());
    let cfg = Config::from_toml(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cfg, Config::default());
}

#[test]
fn simulate_writes_csv_and_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = fragstoch(&["simulate", "limit-hm", "--n", "20", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("H,M\n"));
    assert_eq!(text.lines().count(), 21);
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let other = fragstoch(&["simulate", "limit-hm", "--n", "20", "--seed", "8"]);
    assert_ne!(String::from_utf8(other.stdout).unwrap(), text);
}

#[test]
fn simulate_json_to_stdout() {
    let out = fragstoch(&["simulate", "height-fragmentation", "--n", "513"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sets"].as_array().unwrap().len(), v["levels"].as_array().unwrap().len());
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(fragstoch(&["simulate", "no-such-target"]).status.code(), Some(2));
    assert_eq!(fragstoch(&["verify", "--filter", "no-such-suite"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "[tagged]\nnn = 3\n").unwrap();
    assert_eq!(fragstoch(&["--config", p.to_str().unwrap(), "config"]).status.code(), Some(2));
}

#[test]
fn verify_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let json = dir.path().join("out.json");
    let out = fragstoch(&[
        "--config",
        &cfg,
        "verify",
        "--filter",
        "thm1-beta-half,bijection,obliteration",
        "--seed",
        "3",
        "--workers",
        "2",
        "--report",
        json.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("thm1-beta-half") && stdout.contains("obliteration-masses"), "{stdout}");
    let report = Report::read(&json).unwrap();
    assert_eq!(report.cases.len(), 3);
    assert_eq!(out.status.code(), Some(if report.passed { 0 } else { 1 }));

    let plots = dir.path().join("plots");
    let out = fragstoch(&["report", "--in", json.to_str().unwrap(), "--plots", plots.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(plots.join("pvalues.gp").exists());
    assert!(plots.join("obliteration-masses__pick-means.csv").exists());
    assert!(plots.join("obliteration-masses__pick-means.gp").exists());
}

#[test]
fn tampered_reports_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let json = dir.path().join("out.json");
    fragstoch(&["--config", &cfg, "verify", "--filter", "bijection", "--report", json.to_str().unwrap()]);
    let text = std::fs::read_to_string(&json).unwrap();
    std::fs::write(&json, text.replacen("\"mismatches\": 0", "\"mismatches\": 4", 1)).unwrap();
    assert_eq!(fragstoch(&["report", "--in", json.to_str().unwrap()]).status.code(), Some(2));
}
