use std::process::{Command, Output};

use serde_json::Value;

fn ghom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghom"))
        .args(args)
        .env_remove("GHOM_JOBS")
        .env_remove("GHOM_CONFIG")
        .output()
        .expect("spawn ghom")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn table2_small_orders() {
    let o = ghom(&["table2", "--max-N", "9"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,permanent,value");
    assert_eq!(lines[1], "2,0,0");
    assert_eq!(lines[2], "3,-3,-3");
    assert_eq!(lines[6], "7,-105,-105");
    assert_eq!(lines[8], "9,81,81");
}

#[test]
fn hong_ou_mandel_dip() {
    let v = json(&ghom(&["amplitude", "--N", "2", "--in", "1,1", "--out", "1,1", "--numeric"]));
    assert_eq!(v["probability"].as_f64(), Some(0.0));
    assert!(v.get("permanent").is_none());
}

#[test]
fn both_methods_agree() {
    let o = ghom(&[
        "amplitude", "--N", "3", "--in", "0,1,5", "--out", "2,2,2", "--method", "both", "--exact",
    ]);
    let v = json(&o);
    assert_eq!(v["is_zero"], Value::Bool(true));
    assert!(v.get("amplitude").is_none());
}

#[test]
fn predict_reports_phase() {
    let v = json(&ghom(&["predict", "--N", "3", "--in", "0,0,6"]));
    assert_eq!(v["verdict"]["p_tilde"], 0);
    assert_eq!(v["verdict"]["status"], "Inconclusive");

    let v = json(&ghom(&["predict", "--N", "4", "--in", "0,0,2,6", "--confirm-exact"]));
    assert_eq!(v["verdict"]["status"], "ProvenZero");
    assert_eq!(v["amplitude_zero"], Value::Bool(true));
}

#[test]
fn jkn_three_numbers() {
    let v = json(&ghom(&["jkn", "--N", "4", "--in", "1,2,2,3", "--out", "2,2,2,2"]));
    for key in ["omega_nm", "omega_mn", "omega_sym"] {
        assert!(v[key].is_u64(), "{key}");
    }
}

#[test]
fn enumerate_counts_permutations() {
    let v = json(&ghom(&["enumerate", "--N", "3", "--in", "1,1,1", "--out", "1,1,1", "--count-only"]));
    assert_eq!(v["valid_count"], 6);

    let o = ghom(&["enumerate", "--N", "3", "--in", "1,1,1", "--out", "1,1,1"]);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("[[")).collect();
    assert_eq!(rows.len(), 6);
}

#[test]
fn groups_csv_header() {
    let o = ghom(&["groups", "--N", "3", "--in", "0,3,3", "--out", "2,2,2", "--format", "csv"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("coefficient,p,count"));
}

#[test]
fn cnl_family_is_dark() {
    let v = json(&ghom(&["cnl", "--N", "3", "--kmax", "3", "--confirm-exact"]));
    let members = v["members"].as_array().unwrap();
    assert_eq!(members.len(), 4);
    assert!(members.iter().all(|m| m["amplitude_zero"] == Value::Bool(true)));
}

#[test]
fn scan_independent_of_jobs() {
    let a = ghom(&["--jobs", "1", "scan", "--N", "4", "--n", "8", "--confirm-exact"]);
    let b = ghom(&["--jobs", "4", "scan", "--N", "4", "--n", "8", "--confirm-exact"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let c = Command::new(env!("CARGO_BIN_EXE_ghom"))
        .args(["scan", "--N", "4", "--n", "8", "--confirm-exact"])
        .env("GHOM_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn scan_summary_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.json");
    let o = ghom(&[
        "scan", "--N", "3", "--n", "6", "--confirm-exact", "--summary", path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(s["inputs"], s["scanned"]);
    assert!(s["unsound"].as_array().unwrap().is_empty());
}

#[test]
fn dist_from_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    std::fs::write(&state, r#"{"N": 2, "terms": [{"c": [1, 0], "n": [1, 1]}]}"#).unwrap();
    let s = state.to_str().unwrap();

    let v = json(&ghom(&["dist", "--N", "2", "--state", s]));
    let total: f64 = v["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["p"].as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);

    let o = ghom(&["dist", "--state", s, "--plot-data"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 4);

    let o = ghom(&["dist", "--N", "3", "--state", s]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(ghom(&["nonsense"]).status.code(), Some(1));
    assert_eq!(ghom(&["amplitude", "--N", "2", "--in", "1,1"]).status.code(), Some(1));
    assert_eq!(
        ghom(&["amplitude", "--N", "2", "--in", "1,1", "--out", "2,1"]).status.code(),
        Some(1)
    );
    assert_eq!(ghom(&["--help"]).status.code(), Some(0));
    // 21 photons is past the default permanent limit
    assert_eq!(
        ghom(&["amplitude", "--N", "1", "--in", "21", "--out", "21"]).status.code(),
        Some(2)
    );
}

#[test]
fn config_file_limits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ghom.toml");
    std::fs::write(&cfg, "[permanent]\nmax_side = 4\n\n[enumeration]\nmax_visits = 3\n").unwrap();
    let c = cfg.to_str().unwrap();

    let o = ghom(&["--config", c, "amplitude", "--N", "3", "--in", "1,2,2", "--out", "2,2,1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ghom(&[
        "--config", c, "enumerate", "--N", "3", "--in", "1,1,1", "--out", "1,1,1", "--count-only",
    ]);
    assert_eq!(o.status.code(), Some(2));

    std::fs::write(&cfg, "[permanent]\nmax_sid = 4\n").unwrap();
    let o = ghom(&["--config", c, "table2", "--max-N", "3"]);
    assert_eq!(o.status.code(), Some(1));
}
