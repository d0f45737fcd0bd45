use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rankcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankcone"))
        .args(args)
        .env_remove("RANKCONE_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SQUARE: &str = r#"{"constant":"0","terms":[{"coeff":"1","exponent":"2","flavor":"plain"}]}"#;

#[test]
fn classify_square_preserves_then_violates() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "poly.json", SQUARE);
    let o = rankcone(&["classify", "-f", &f, "-n", "6", "-l", "2", "-k", "3", "--interval", "0:inf", "--psd"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["verdict"], "preserves");

    let w = dir.path().join("w.json");
    let o = rankcone(&[
        "classify", "-f", &f, "-n", "6", "-l", "2", "-k", "2", "--interval", "0:inf", "--psd",
        "--witness-out", w.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let report = json(&o);
    assert_eq!(report["verdict"], "violates");
    assert!(report["witness"].is_object());
    assert_eq!(report["config"]["seed"], 0);

    let o = rankcone(&["verify", w.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["valid"], true);
    assert_eq!(v["verified_rank"], 3);
}

#[test]
fn corank_one_gap_is_undetermined() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"pieces":[
        {"from":null,"function":{"constant":"0","terms":[{"coeff":"1","exponent":"1","flavor":"plain"}]}},
        {"from":"-1/2","function":{"constant":"0"}}]}"#;
    let f = write(dir.path(), "pw.json", body);
    let o = rankcone(&["classify", "-f", &f, "-n", "3", "-l", "2", "-k", "2", "--interval", "sym:1"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["verdict"], "undetermined");
}

#[test]
fn witness_commands() {
    let o = rankcone(&["witness", "canned", "A4"]);
    assert_eq!(code(&o), 0);
    let w = json(&o);
    assert_eq!(w["claimed_rank"], 2);
    let claims = w["claims"].as_array().unwrap();
    assert!(claims.iter().any(|c| c["name"] == "matrix_psd" && c["value"] == true));
    assert!(String::from_utf8_lossy(&o.stderr).contains("verified rank 2"));

    let o = rankcone(&["witness", "vandermonde", "-f", "poly:1,2,0,3", "-n", "5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["claimed_rank"], 3);

    let o = rankcone(&["witness", "search", "-f", "phi:2.5", "-a", "1", "-n", "4", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let w = json(&o);
    assert_eq!(w["claimed_rank"], 4);
    assert_eq!(w["matrix"]["n"], 4);

    let o = rankcone(&["witness", "canned", "b_x0", "-n", "3", "--params", r#"{"x0":"-1/4"}"#]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["matrix"]["entries"][0][0], "1/2");
}

#[test]
fn tampered_witness_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = rankcone(&["witness", "canned", "a6"]);
    let mut w = json(&o);
    w["claimed_rank"] = 5.into();
    let p = write(dir.path(), "bad.json", &w.to_string());
    let o = rankcone(&["verify", &p]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["valid"], false);
}

#[test]
fn exit_codes_for_errors() {
    assert_eq!(code(&rankcone(&["classify", "-f", "cos:1", "-n", "3", "-k", "1"])), 64);
    assert_eq!(code(&rankcone(&["no-such-command"])), 64);
    assert_eq!(code(&rankcone(&["classify", "-f", "plain:1/2", "-n", "3", "-k", "1", "--interval", "sym:1"])), 65);
    assert_eq!(code(&rankcone(&["classify", "-f", "poly:1", "-n", "3", "-k", "4"])), 65);
    assert_eq!(code(&rankcone(&["verify", "/nonexistent/witness.json"])), 66);
    assert_eq!(code(&rankcone(&["--help"])), 0);
}

#[test]
fn sweeps_pass_and_write_versioned_csv() {
    for check in ["schur", "eboyd"] {
        let o = rankcone(&["sweep", "--check", check, "--trials", "100", "-n", "5"]);
        assert_eq!(code(&o), 0, "{check}");
        let text = String::from_utf8(o.stdout).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("schema,trial,seed,check,pass,detail"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 100);
        assert!(rows.iter().all(|r| r.starts_with("v1,") && r.contains(",true,")));
    }
    let o = rankcone(&[
        "sweep", "--check", "soundness", "-f", "poly:0,2,0,0,3", "-n", "5", "-l", "1", "-k", "2", "--psd", "--trials",
        "500",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn replay_is_byte_identical() {
    let args = ["classify", "-f", "poly:0,0,1", "-n", "8", "-l", "3", "-k", "5", "--seed", "11"];
    let (a, b) = (rankcone(&args), rankcone(&args));
    assert_eq!(a.stdout, b.stdout);
    let args = ["sweep", "--check", "rank-minors", "--trials", "20", "--seed", "5", "--format", "json"];
    let (a, b) = (rankcone(&args), rankcone(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["config"]["seed"], 5);
}

#[test]
fn seed_falls_back_to_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_rankcone"))
        .args(["sweep", "--check", "schur", "--trials", "3", "--format", "json"])
        .env("RANKCONE_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(json(&o)["config"]["seed"], 99);
    assert_eq!(json(&o)["rows"][0]["seed"], 99);
}

#[test]
fn probes() {
    let o = rankcone(&["probe", "--test", "abs-monotone", "-f", "poly:0,1,0,-1", "--order", "2"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["failures"][0]["params"]["m"], 1);
    let o = rankcone(&["probe", "--test", "loewner", "-f", "poly:0,0,0,1", "-n", "5", "--interval", "0:1"]);
    assert_eq!(code(&o), 0);
    let o = rankcone(&["probe", "--test", "two-by-two", "-f", "poly:2,-1", "--interval", "0:1"]);
    assert_eq!(code(&o), 2);
    let o = rankcone(&["probe", "--test", "continuity", "-f", "poly:1,1"]);
    assert_eq!(code(&o), 0);
}
