use std::process::{Command, Output};

use motzkin::path::MotzkinPath;
use motzkin::sampler::{sample_many, SamplerConfig, SamplerMode};

fn motzkin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_motzkin"))
        .args(args)
        .env_remove("MOTZKIN_SEED")
        .env_remove("MOTZKIN_WORKERS")
        .output()
        .expect("run binary")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

#[test]
fn count_ten() {
    let o = motzkin(&["count", "--n", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2188\n");
}

#[test]
fn count_all_and_catalan() {
    let o = motzkin(&["count", "--n", "5", "--all"]);
    assert_eq!(stdout(&o), "1\n1\n2\n4\n9\n21\n");
    let o = motzkin(&["count", "--n", "4", "--kind", "catalan"]);
    assert_eq!(stdout(&o), "14\n");
}

#[test]
fn enumerate_zero_prints_one_empty_line() {
    let o = motzkin(&["enumerate", "--n", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "\n");
}

#[test]
fn enumerate_lists_every_path_once() {
    let o = motzkin(&["enumerate", "--n", "6"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 51);
    let mut unique = lines.clone();
    unique.sort();
    unique.dedup();
    assert_eq!(unique.len(), 51);
    for l in lines {
        l.parse::<MotzkinPath>().unwrap();
    }
}

#[test]
fn sample_is_reproducible_and_matches_library() {
    let args = ["sample", "--n", "40", "--samples", "25", "--seed", "9", "--workers", "3", "--mode", "dp"];
    let a = motzkin(&args);
    let b = motzkin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let expected: Vec<String> = sample_many(&SamplerConfig::new(40, SamplerMode::DpExact, 9), 25, 3)
        .iter()
        .map(|p| p.to_text())
        .collect();
    assert_eq!(stdout(&a).lines().collect::<Vec<_>>(), expected);
}

#[test]
fn seed_environment_variable_sets_default() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_motzkin"))
        .args(["sample", "--n", "30", "--samples", "5", "--workers", "1"])
        .env("MOTZKIN_SEED", "42")
        .output()
        .unwrap();
    let with_flag = motzkin(&["sample", "--n", "30", "--samples", "5", "--workers", "1", "--seed", "42"]);
    assert_eq!(with_env.stdout, with_flag.stdout);
}

#[test]
fn verify_identities_example() {
    let o = motzkin(&["verify-identities", "--max-n", "8", "--trials", "20", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["pass"], true);
    let records = v["records"].as_array().unwrap();
    for suite in ["GenF0", "up2fBM"] {
        let rs: Vec<_> = records.iter().filter(|r| r["identity"] == suite).collect();
        assert!(!rs.is_empty());
        assert!(rs.iter().all(|r| r["pass"] == true));
    }
    for key in ["identity", "n", "max_rel_err", "pass"] {
        assert!(records[0].get(key).is_some(), "{key}");
    }
}

#[test]
fn sulanke_point_and_coefficients() {
    let o = motzkin(&["sulanke", "--n", "6", "--t", "1", "--format", "text"]);
    assert_eq!(stdout(&o).trim().parse::<f64>().unwrap(), 51.0);
    let o = motzkin(&["sulanke", "--n", "4", "--coeffs", "--format", "text"]);
    let sum: u64 = stdout(&o).split_whitespace().map(|c| c.parse::<u64>().unwrap()).sum();
    assert_eq!(sum, 9);
}

#[test]
fn laplace_and_density_values_round_trip() {
    let o = motzkin(&["laplace", "--n", "1000", "--w=0.6", "--centered", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 0.18f64.exp()).abs() < 0.03, "{v}");

    let o = motzkin(&["density", "--kind", "fbm", "--t", "1", "--x", "0"]);
    let v = json(&o);
    assert_eq!(v["value"].as_f64().unwrap(), 1.0 / std::f64::consts::PI);

    let o = motzkin(&["laplace", "--limit", "--grid", "0.5", "--z", "0.2,0.5"]);
    assert!(json(&o)["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn text_floats_carry_17_significant_digits() {
    let o = motzkin(&["density", "--kind", "fbm", "--t", "1", "--x", "0.3", "--format", "text"]);
    let s = stdout(&o);
    let mantissa = s.trim().split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{s}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["count"][..],
        &["count", "--n", "x"],
        &["nonsense"],
        &["laplace", "--grid", "0.5"],
        &["density", "--kind", "fbm", "--t", "-1", "--x", "0"],
        &["sample", "--n", "3", "--mode", "bogus"],
        &["mc", "--n", "10", "--samples", "5"],
    ] {
        let o = motzkin(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(motzkin(&["--help"]).status.code(), Some(0));
}

#[test]
fn mc_report_schema_and_csv() {
    let dir = std::env::temp_dir().join(format!("motzkin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let report = dir.join("report.json");
    let csv = dir.join("samples.csv");
    let o = motzkin(&[
        "mc",
        "--n",
        "200",
        "--samples",
        "2000",
        "--grid",
        "0.5",
        "--seed",
        "3",
        "--workers",
        "2",
        "--out",
        report.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(matches!(o.status.code(), Some(0 | 1)));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["n"], 200);
    assert_eq!(v["samples"], 2000);
    assert_eq!(v["workers"], 2);
    assert_eq!(v["pass"].as_bool(), Some(o.status.code() == Some(0)));
    for key in ["per_time", "reference", "bands", "checks", "triple_sum_max_abs", "sampler", "grid", "seed"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 2001);
    std::fs::remove_dir_all(&dir).unwrap();
}
