use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_p2sheaf"))
        .args(args)
        .env_remove("P2SHEAF_SEED")
        .env_remove("P2SHEAF_TRIALS")
        .env_remove("P2SHEAF_JSON")
        .env_remove("P2SHEAF_TIMING")
        .env_remove("P2SHEAF_STRICT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn char_reports_chi_and_dlp() {
    let o = run(&["char", "3", "2/3", "17/9"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("chi = 1"), "{s}");
    assert!(s.contains("DLP: above"), "{s}");
    assert!(s.contains("ch (r, c1, ch2)    = (3, 2, -5)"), "{s}");

    let o = run(&["--json", "char", "1", "0", "6"]);
    assert_eq!(json_lines(&o)[0]["chi"], "-5");
}

#[test]
fn char_in_chern_coordinates_and_negative_values() {
    let o = run(&["--json", "char", "--ch", "2", "-1", "-1/4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["log"]["mu"], "-1/2");
    // chi = 2 - 3/2 - 1/4
    assert_eq!(v["chi"], "1/4");
}

#[test]
fn malformed_input_exits_2() {
    assert_eq!(run(&["char", "3", "2/x", "1"]).status.code(), Some(2));
    assert_eq!(run(&["char", "3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--prime", "32004", "verify", "qk", "--s", "2"]).status.code(), Some(2));
}

#[test]
fn unsupported_input_exits_3() {
    assert_eq!(run(&["table", "7"]).status.code(), Some(3));
    assert_eq!(run(&["gaeta", "0", "0", "1"]).status.code(), Some(3));
    assert_eq!(run(&["exceptional", "1/3"]).status.code(), Some(3));
    assert_eq!(run(&["verify", "interp-tri", "--r", "40"]).status.code(), Some(3));
}

#[test]
fn gaeta_worked_example_and_dual() {
    let o = run(&["--json", "gaeta", "3", "2/3", "17/9"]);
    let v = &json_lines(&o)[0];
    assert_eq!(v["resolution"], "O(-2)^4 -> O + O(-1)^6");
    assert_eq!(v["case"], "positive");
    assert_eq!(v["controlling_slope"], "0");

    let o = run(&["--json", "gaeta", "3", "-11/3", "17/9"]);
    let v = &json_lines(&o)[0];
    assert_eq!(v["resolution"], "O(-6)^2 + O(-7) -> O(-5)^6");
    assert_eq!(v["controlling_slope"], "22/5");
    let p = &v["decomposition"]["parts"];
    let got: Vec<i64> = ["n1", "n2", "l1", "l2", "j1", "j2"].iter().map(|k| p[k].as_i64().unwrap()).collect();
    assert_eq!(got, vec![0, 6, 0, -2, 1, 0]);
}

#[test]
fn cones_twelve() {
    let o = run(&["--json", "cones", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["eff"], "7/2 H - 1/2 B");
    assert_eq!(v["mov"], "25/7 H - 1/2 B");
    assert_eq!(v["dual_curve"]["h_deg"], "7");
    assert_eq!(v["dual_curve"]["b_half_deg"], "25");
    assert_eq!(v["pairing"], "0");
}

#[test]
fn table_five_rows() {
    let o = run(&["--json", "table", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    let rows: Vec<&Value> = lines.iter().filter(|v| v.get("row").is_some()).collect();
    assert_eq!(rows.len(), 5);
    let patterns: Vec<Option<&str>> = rows.iter().map(|v| v["row"]["map_pattern"].as_str()).collect();
    assert_eq!(patterns[2..], [Some("g(5)''"), Some("g(5)'"), None]);
    assert!(rows[2..].iter().all(|v| v["row"]["betti_id"] == "G(5)"));
    assert_eq!(lines.last().unwrap()["pass"], true);
}

#[test]
fn verify_tangential_s2() {
    let o = run(&["verify", "interp-tan", "--s", "2", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_betti_general_six() {
    let o = run(&["--json", "verify", "betti", "--n", "6", "--stratum", "general", "--trials", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["matches"], 20);
    assert_eq!(v["expected"], "O(-4)^3 -> O(-3)^4");
}

#[test]
fn verify_qk_and_zero_locus() {
    let o = run(&["verify", "qk", "--s", "2", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 15);
    let o = run(&["--json", "verify", "zero-locus", "--s", "2", "--trials", "1"]);
    assert_eq!(json_lines(&o)[0]["length"], 13);
}

#[test]
fn conjecture_failures_exit_1_with_partial_results() {
    let o = run(&["--json", "verify", "conjecture", "--max-rank", "6", "--d-hi", "20"]);
    assert_eq!(o.status.code(), Some(1));
    let lines = json_lines(&o);
    let summary = lines.last().unwrap();
    assert_eq!(summary["check"], "conjecture-summary");
    assert!(lines.iter().any(|v| v["pass"] == true));
    assert!(lines.iter().any(|v| v["pass"] == false && v["n"] == 4));
}

#[test]
fn json_output_is_deterministic() {
    let args = ["--json", "--seed", "9", "verify", "betti", "--n", "5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn environment_overrides_flags() {
    let o = Command::new(env!("CARGO_BIN_EXE_p2sheaf"))
        .args(["verify", "qk", "--s", "2", "--k", "1"])
        .env("P2SHEAF_TRIALS", "2")
        .env("P2SHEAF_JSON", "true")
        .output()
        .unwrap();
    let lines = json_lines(&o);
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1]["seed"], 1);
}

#[test]
fn exceptional_lookup_and_enumeration() {
    let o = run(&["--json", "exceptional", "12/5"]);
    let v = &json_lines(&o)[0]["exceptional"];
    assert_eq!(v["rank"], 5);
    assert_eq!(v["discriminant"], "12/25");
    let o = run(&["exceptional", "--max-rank", "6"]);
    assert_eq!(stdout(&o).lines().count(), 5);
}

#[test]
fn controlling_for_twelve_points() {
    let o = run(&["--json", "controlling", "1", "0", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["controlling"]["gamma"], "7/2");
}
