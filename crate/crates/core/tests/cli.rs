use std::path::PathBuf;
use std::process::Command;

use ltbounds::cli::{self, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["ltbounds"];
    argv.extend_from_slice(args);
    let code = cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json_lines(text: &str) -> Vec<Value> {
    text.lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

fn config(name: &str) -> String {
    format!("{}/configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("ltbounds-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn bound_momentum_optimal() {
    let (code, out, _) = run(&[
        "bound",
        "--d",
        "1",
        "--sigma",
        "1",
        "--method",
        "momentum-optimal",
    ]);
    assert_eq!(code, EXIT_OK);
    let v = &json_lines(&out)[0];
    assert!((v["l_ratio"].as_f64().unwrap() - 1.618435).abs() < 1e-5);
    assert_eq!(v["method"], "momentum_optimal");
}

#[test]
fn bound_from_c_value() {
    let (code, out, _) = run(&[
        "bound",
        "--d",
        "1",
        "--sigma",
        "1",
        "--method",
        "from-c",
        "--c-value",
        "0.373556",
    ]);
    assert_eq!(code, EXIT_OK);
    let v = &json_lines(&out)[0];
    assert!((v["l_ratio"].as_f64().unwrap() - 1.455786).abs() < 1e-5);
    assert_eq!(v["c_value"].as_f64(), Some(0.373556));
}

#[test]
fn bound_best_of_fractional() {
    let (code, out, _) = run(&[
        "bound",
        "--d",
        "3",
        "--sigma",
        "0.5",
        "--method",
        "best-of",
        "--c-value",
        "0.046736",
    ]);
    assert_eq!(code, EXIT_OK);
    let v = &json_lines(&out)[0];
    assert!((v["k_ratio"].as_f64().unwrap() - 0.826297).abs() < 1e-4);
    assert_eq!(v["method"], "best_of");
}

#[test]
fn bound_with_optimizer_attaches_trial() {
    let (code, out, _) = run(&[
        "bound",
        "--d",
        "3",
        "--sigma",
        "0.5",
        "--method",
        "from-c",
        "--optimize",
    ]);
    assert_eq!(code, EXIT_OK);
    let v = &json_lines(&out)[0];
    assert!(v["c_value"].as_f64().unwrap() <= 0.046737 + 2e-6);
    assert_eq!(v["trial"]["phi"]["kind"], "bump_power");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["bound", "--d", "1", "--sigma", "1", "--method", "from-c"],
        vec!["bound", "--d", "0", "--sigma", "1", "--method", "best-of"],
        vec!["bound", "--d", "1", "--sigma", "-1", "--method", "best-of"],
        vec![
            "bound",
            "--d",
            "2",
            "--sigma",
            "0.5",
            "--method",
            "rumin-original",
        ],
        vec!["bound", "--d", "1", "--sigma", "1", "--method", "nonsense"],
        vec![
            "bound",
            "--d",
            "1",
            "--sigma",
            "1",
            "--method",
            "from-c",
            "--c-value",
            "0.4",
            "--optimize",
        ],
        vec![
            "bound",
            "--d",
            "1",
            "--sigma",
            "1",
            "--method",
            "best-of",
            "--quad-abs-tol",
            "-1",
        ],
        vec!["table"],
        vec!["frobnicate"],
        vec!["optimize", "/nonexistent/config.json"],
    ] {
        let (code, _, err) = run(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn csv_matches_json() {
    let base = ["bound", "--d", "3", "--sigma", "1", "--method", "best-of"];
    let (_, json, _) = run(&[&base[..], &["--format", "json"]].concat());
    let (_, csv, _) = run(&[&base[..], &["--format", "csv"]].concat());
    let v = &json_lines(&json)[0];
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    for key in ["k_ratio", "l_ratio", "sigma"] {
        let i = header.iter().position(|h| *h == key).unwrap();
        assert_eq!(
            row[i].parse::<f64>().unwrap(),
            v[key].as_f64().unwrap(),
            "{key}"
        );
    }
}

#[test]
fn output_is_deterministic_and_out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("ltbounds-{}-table.json", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["table", "--paper", "--out", p]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let first = std::fs::read_to_string(&path).unwrap();
    run(&["table", "--paper", "--out", p]);
    assert_eq!(first, std::fs::read_to_string(&path).unwrap());
    let rows = json_lines(&first);
    let c1 = rows.iter().find(|r| r["quantity"] == "C_1 upper").unwrap();
    assert!((c1["computed_value"].as_f64().unwrap() - 0.373556).abs() <= 1e-5);
    let probe = rows
        .iter()
        .find(|r| r["quantity"] == "limit probe d=1000")
        .unwrap();
    assert!(probe["computed_value"].as_f64().unwrap() <= std::f64::consts::E);
    std::fs::remove_file(path).ok();
}

#[test]
fn text_table_uses_six_decimals() {
    let (code, out, _) = run(&["table", "--paper", "--format", "text"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("quantity"));
    assert!(out.contains("1.618435"));
}

#[test]
fn optimize_empty_and_malformed() {
    let (code, out, _) = run(&["optimize", &config("optimize_empty.json")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());

    let bad = temp_file("bad.json", r#"[{"d": 1, "sigma": 1, "bogus": true}]"#);
    let (code, _, err) = run(&["optimize", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("bogus"));

    let bad_seed = temp_file(
        "seed.json",
        r#"[{"d": 1, "sigma": 1, "config": {"seed_params": {"a": 50, "p": 1}}}]"#,
    );
    assert_eq!(run(&["optimize", bad_seed.to_str().unwrap()]).0, EXIT_USAGE);
}

#[test]
fn optimize_seeds_seeds() {
    let (code, out, _) = run(&["optimize", &config("optimize_seeds.json")]);
    assert_eq!(code, EXIT_OK);
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 3);
    assert!(lines[0]["result"]["best_value"].as_f64().unwrap() <= 0.373566);
    assert!(lines[1]["result"]["best_value"].as_f64().unwrap() <= 0.046739);
    let summary = lines[2]["summary"].as_array().unwrap();
    assert_eq!(summary.len(), 2);
}

#[test]
fn optimize_failure_is_recorded_not_fatal() {
    // a seed whose simplex sits entirely in the inadmissible corner 2pa <= 1
    let path = temp_file(
        "fail.json",
        r#"[{"d": 1, "sigma": 1, "config": {"seed_params": {"a": 1.1, "p": 0.05}, "max_iters": 5}}]"#,
    );
    let (code, out, _) = run(&["optimize", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let lines = json_lines(&out);
    assert!(lines[0]["error"]
        .as_str()
        .unwrap()
        .contains("initial simplex"));
    assert_eq!(lines[1]["summary"], serde_json::json!([]));
}

#[test]
fn verify_suites() {
    let (code, out, _) = run(&["verify"]);
    assert_eq!(code, EXIT_OK);
    assert!(json_lines(&out).iter().all(|r| r["holds"] == true));

    let (code, out, _) = run(&["verify", &config("verify_default.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json_lines(&out).len(), 10);

    let (code, out, _) = run(&["verify", &config("verify_weyl.json")]);
    assert_eq!(code, EXIT_OK);
    let nu2 = json_lines(&out)
        .into_iter()
        .find(|r| r["name"] == "poschl_teller_nu2")
        .unwrap();
    assert_eq!(nu2["holds"], false);

    let empty = temp_file("empty-verify.json", r#"{"cases": []}"#);
    let (code, out, _) = run(&["verify", empty.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (EXIT_OK, ""));

    let failing = temp_file(
        "failing-verify.json",
        r#"{"l_ratio": 1.5, "cases": [{"name": "pt", "potential": {"kind": "poschl_teller", "nu": 2}}]}"#,
    );
    assert_eq!(run(&["verify", failing.to_str().unwrap()]).0, EXIT_OK);

    let bad = temp_file(
        "bad-verify.json",
        r#"{"cases": [{"name": "x", "potential": {"kind": "harmonic"}}]}"#,
    );
    assert_eq!(run(&["verify", bad.to_str().unwrap()]).0, EXIT_USAGE);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ltbounds");
    let ok = Command::new(bin)
        .args([
            "bound",
            "--d",
            "1",
            "--sigma",
            "1",
            "--method",
            "rumin-original",
        ])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert!((v["l_ratio"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-12);

    let usage = Command::new(bin)
        .args(["bound", "--d", "1"])
        .output()
        .unwrap();
    assert_eq!(usage.status.code(), Some(2));
    assert!(!usage.stderr.is_empty());

    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}
