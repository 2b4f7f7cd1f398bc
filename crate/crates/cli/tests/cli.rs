use std::process::{Command, Output};

use serde_json::Value;

const POWER2: &str = r#"{"kind":"Power","p":2}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_campanato")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn necessity_slope_matches_the_scaling_exponent() {
    let out = run(&["verify", "--experiment", "necessity", "--k", "0", "--s", "1.5", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json_of(&out);
    let slope = doc["result"]["slope"].as_f64().unwrap();
    assert!((slope + 1.5).abs() < 0.1, "slope {slope}");
    assert_eq!(doc["config"]["experiment"]["scales"], serde_json::json!([2, 64]));
}

#[test]
fn lemma_experiment_reports_its_band() {
    let out = run(&["verify", "--experiment", "lemma45", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json_of(&out);
    assert_eq!(doc["result"]["band"], serde_json::json!([1.0, 3.0]));
    assert_eq!(doc["result"]["all_within_band"], Value::Bool(true));
}

#[test]
fn conjugate_of_square_is_quarter_square() {
    let out = run(&["conjugate", "--young", POWER2, "--check-duality", "--points", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["result"]["duality"]["within_band"], Value::Bool(true));
    let out =
        run(&["conjugate", "--young", POWER2, "--points", "3", "--rmin", "1", "--rmax", "100", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    for row in rows {
        let (t, v) = row.split_once(',').unwrap();
        let (t, v): (f64, f64) = (t.parse().unwrap(), v.parse().unwrap());
        assert!((v - t * t / 4.0).abs() <= 1e-9 * v, "t={t} value={v}");
    }
}

#[test]
fn non_convex_table_names_the_knot() {
    let out = run(&["conjugate", "--young", r#"{"kind":"Tabulated","knots":[0,1,2,3],"values":[0,1,5,6]}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("knot 2"), "{}", stderr(&out));
}

#[test]
fn failed_gauge_precondition_is_named() {
    let out = run(&["gauge", "--young", POWER2, "--n", "1", "--s", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("integral near 0 of (t/A(t))"), "{}", stderr(&out));
}

#[test]
fn undecidable_indices_exit_three() {
    let out = run(&["indices", "--young", r#"{"kind":"LinearCap","t0":1}"#]);
    assert_eq!(out.status.code(), Some(3));
    assert!(json_of(&out)["result"]["index_at_zero"].is_object());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["gauge"]).status.code(), Some(2));
    assert_eq!(run(&["gauge", "--young", POWER2, "--rmin", "2", "--rmax", "1"]).status.code(), Some(2));
}

#[test]
fn borderline_power_is_bmo_but_not_vmo() {
    let out = run(&["check", "--young", r#"{"kind":"Power","p":4}"#, "--n", "2", "--s", "0.5", "--alphas", "2.5,4,5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json_of(&out);
    assert_eq!(doc["result"]["bmo_vmo"]["bmo"], "yes");
    assert_eq!(doc["result"]["bmo_vmo"]["vmo"], "no");
    let gap = doc["result"]["continuity_gap"].as_array().unwrap();
    let verdicts: Vec<(&str, &str)> =
        gap.iter().map(|r| (r["inverse_tail"].as_str().unwrap(), r["sharp_condition"].as_str().unwrap())).collect();
    assert_eq!(verdicts, [("divergent", "divergent"), ("divergent", "convergent"), ("convergent", "convergent")]);
}

#[test]
fn output_is_reproducible_and_embeds_the_config() {
    let dir = std::env::temp_dir().join(format!("campanato-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    std::fs::write(&cfg, r#"{"young": {"kind":"Power","p":4}, "n": 3, "s": 1.5, "points": 9, "format": "csv"}"#)
        .unwrap();
    let first = run(&["gauge", "--config", cfg.to_str().unwrap()]);
    let second = run(&[
        "gauge",
        "--young",
        r#"{"kind":"Power","p":4}"#,
        "--n",
        "3",
        "--s",
        "1.5",
        "--points",
        "9",
        "--format",
        "csv",
    ]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    let header = text.lines().next().unwrap();
    let embedded: Value = serde_json::from_str(header.strip_prefix("# config: ").unwrap()).unwrap();
    assert_eq!(embedded["grids"]["points"], 9);
    assert_eq!(embedded["params"]["n"], 3);
    // Flags override the file.
    let out = run(&["gauge", "--config", cfg.to_str().unwrap(), "--points", "5", "--format", "json"]);
    assert_eq!(json_of(&out)["config"]["grids"]["points"], 5);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn rearrange_and_norm_accept_step_data() {
    let data = r#"{"values":[1,3,2],"weights":[1,0.5,2]}"#;
    let out = run(&["rearrange", "--input", data]);
    let doc = json_of(&out);
    assert_eq!(doc["result"]["values"], serde_json::json!([3.0, 2.0, 1.0]));
    let out = run(&["norm", "--young", POWER2, "--input", data]);
    let norm = json_of(&out)["result"]["luxemburg_norm"].as_f64().unwrap();
    assert!((norm - 13.5f64.sqrt()).abs() < 1e-8, "norm {norm}");
}
