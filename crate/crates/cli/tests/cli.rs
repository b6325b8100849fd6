use std::process::{Command, Output};

fn qde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qde"))
        .args(args)
        .env_remove("QDE_PRECISION")
        .env_remove("QDE_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = qde(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn bad_value_names_the_flag() {
    let out = qde(&["dmod", "irr", "--operator", "d4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--operator"));
    let out = qde(&["jfun", "coeff", "--space", "klein", "--d", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--space"));
}

#[test]
fn precision_env_override_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_qde"))
        .args(["mzv", "expand", "--sym", "1"])
        .env("QDE_PRECISION", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_qde"))
        .args(["mzv", "eval", "--index", "3", "--d", "10"])
        .env("QDE_PRECISION", "30")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["value"]["precision"], 30);
}

#[test]
fn failed_check_exits_one() {
    // n = 10 is far from the limit, so the verdict table fails.
    let out = qde(&["gamma", "verify", "--space", "twistor", "--n", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["schema"], "qde-report/1");
    assert!(v["result"]["rows"].as_array().unwrap().iter().any(|r| r["pass"] == false));
}

#[test]
fn jfun_coefficients_are_fraction_strings() {
    let out = qde(&["jfun", "coeff", "--space", "twistor", "--d", "1", "--normalized"]);
    assert!(out.status.success());
    let v = json(&out);
    let c: Vec<&str> = v["result"]["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["value"].as_str().unwrap())
        .collect();
    assert_eq!(c, ["1/1", "-1/1", "1/1", "-1/1", "-1/1", "-5/1", "5/2", "0/1"]);
}

#[test]
fn mzv_expand_matches_example() {
    let out = qde(&["mzv", "expand", "--sym", "2,1,1"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["result"]["expansion"], "ζ(2,1,1) + ζ(2,2) + ζ(3,1) + ζ(4)");
}

#[test]
fn peaks_scan_emits_csv() {
    let out = qde(&[
        "--format", "csv", "peaks", "scan", "--betas", "1,1", "--b", "1,1", "--x", "1e3,1e4", "--nu", "0.4", "--k", "1",
        "--bseq", "harmonic",
    ]);
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "x,head,tail,defect,stokes");
    assert_eq!(lines.len(), 3);
}

#[test]
fn dmod_irr_of_printed_operator() {
    let out = qde(&["dmod", "irr", "--operator", "d4:1; d2:-8/u^2; d1:16/u^2; d0:16/u^4-16/u^2"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["result"]["irregularity"], 4);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        &["dmod", "report", "--space", "twistor", "--block", "y", "--q", "1"][..],
        &["qh", "dump", "--space", "twistor"][..],
        &["verify-all", "--criteria", "9"][..],
    ] {
        let a = qde(args);
        let b = qde(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn verify_all_lists_criteria_with_anchors() {
    let out = qde(&["verify-all", "--criteria", "3,9"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let crit = v["result"]["criteria"].as_array().unwrap();
    assert_eq!(crit.len(), 2);
    for c in crit {
        for row in c["rows"].as_array().unwrap() {
            assert!(!row["anchor"].as_str().unwrap().is_empty());
        }
    }
    let out = qde(&["verify-all", "--criteria", "12"]);
    assert_eq!(out.status.code(), Some(2));
}
