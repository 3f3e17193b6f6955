use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn twoblock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twoblock")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn toric(dir: &TempDir, l: u32) -> String {
    write(dir, &format!("toric{l}.json"), &format!(r#"{{"group":[{l},{l}],"a":[[0,0],[1,0]],"b":[[0,0],[0,1]]}}"#))
}

#[test]
fn params_of_toric_three() {
    let dir = TempDir::new().unwrap();
    let v = json_of(&twoblock(&["params", "--spec", &toric(&dir, 3)]));
    assert_eq!(v["N"], 18);
    assert_eq!(v["k"], 2);
    assert_eq!(v["d"], 3);
    assert_eq!(v["format_version"], 1);
}

#[test]
fn params_of_identity_code() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "e.json", r#"{"group":[7],"a":[[0]],"b":[[0]]}"#);
    let v = json_of(&twoblock(&["params", "--spec", &spec]));
    assert_eq!(v["N"], 14);
    assert_eq!(v["k"], 0);
    assert!(v["d"].is_null());
}

#[test]
fn malformed_exponent_names_the_field() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bad.json", r#"{"group":[3,3],"a":[[0,0],[1]],"b":[[0,0]]}"#);
    let out = twoblock(&["params", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("a[1]"));
}

#[test]
fn unreadable_input_exits_two() {
    let out = twoblock(&["params", "--spec", "/nonexistent/code.json"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "junk.json", r#"{"group":[3],"a":[[0]],"b":[[0]],"colour":1}"#);
    assert_eq!(twoblock(&["certify", "--spec", &spec]).status.code(), Some(2));
    assert_eq!(twoblock(&["bound", "--dim", "0", "--n", "5"]).status.code(), Some(2));
    assert_eq!(twoblock(&["bound", "--dim", "2", "--n", "5", "--rho", "one"]).status.code(), Some(2));
    assert_eq!(twoblock(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn certify_toric_nine() {
    let dir = TempDir::new().unwrap();
    let v = json_of(&twoblock(&["certify", "--spec", &toric(&dir, 9)]));
    let c = &v["components"][0];
    assert_eq!(c["bound"]["applicable"], true);
    let bound = c["bound"]["bound_value"].as_f64().unwrap();
    assert!((bound - 104.72).abs() < 0.01);
    let counts: Vec<u64> = c["partition"]["slab_counts"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(counts.iter().sum::<u64>(), 81);
    let weight = c["localized"]["weight"].as_u64().unwrap();
    assert!(weight <= 2 * counts.iter().max().unwrap());
    assert!(weight as f64 <= bound);
    assert_eq!(v["params"]["d"], 9);
    assert!(weight >= 9);
}

#[test]
fn certify_small_toric_reports_inapplicability() {
    let dir = TempDir::new().unwrap();
    let v = json_of(&twoblock(&["certify", "--spec", &toric(&dir, 3)]));
    let c = &v["components"][0];
    assert_eq!(c["verdicts"]["applicable"], false);
    assert!(c["partition"].is_null());
    assert!(c["notes"][0].as_str().unwrap().contains("not applicable"));
    assert_eq!(v["params"]["N"], 18);
}

#[test]
fn certify_decomposable_code() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "z4.json", r#"{"group":[4],"a":[[0],[2]],"b":[[0],[2]]}"#);
    let v = json_of(&twoblock(&["certify", "--spec", &spec]));
    assert_eq!(v["decomposition_index"], 2);
    assert_eq!(v["components"].as_array().unwrap().len(), 2);
}

fn csv_rows(bytes: &[u8]) -> Vec<Vec<String>> {
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    text.lines().map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn scan_is_reproducible() {
    let args = ["scan", "--rank", "1", "--min-order", "2", "--max-order", "30", "--weight", "4", "--count", "100", "--seed", "7"];
    let first = twoblock(&args);
    assert!(first.status.success());
    let second = twoblock(&args);
    assert_eq!(first.stdout, second.stdout);
    let rows = csv_rows(&first.stdout);
    assert_eq!(rows.len(), 101);
    let header = &rows[0];
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for r in &rows[1..] {
        // Supports are space separated, so commas only split fields.
        assert_eq!(r.len(), header.len());
        let k: usize = r[col("k")].parse().unwrap();
        assert_eq!(k % 2, 0);
        if !r[col("d_x")].is_empty() && !r[col("d_z")].is_empty() {
            assert_eq!(r[col("d_x")], r[col("d_z")]);
        }
    }
}

#[test]
fn empty_scan_has_only_a_header() {
    let out = twoblock(&["scan", "--count", "0"]);
    assert!(out.status.success());
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "format_version");
}

#[test]
fn lattice_and_bound_commands() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "l.json", r#"{"basis":[[24,0],[0,24]],"rho":"1"}"#);
    let v = json_of(&twoblock(&["lattice", "--spec", &spec]));
    assert_eq!(v["partition"]["mu"], 12);
    assert_eq!(v["partition"]["lambda_sq"], "4");
    assert_eq!(v["applicable"], true);

    let v = json_of(&twoblock(&["bound", "--m", "2", "--rho", "1", "--dim", "2", "--n", "9"]));
    assert_eq!(v["applicable"], false);
    assert_eq!(v["format_version"], 1);
}

#[test]
fn out_flag_writes_a_file() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("p.json");
    let out = twoblock(&["params", "--spec", &toric(&dir, 4), "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(Path::new(&out_path)).unwrap()).unwrap();
    assert_eq!(v["d"], 4);
    let csv_json = twoblock(&["params", "--spec", &toric(&dir, 3), "--format", "csv"]);
    assert_eq!(csv_json.status.code(), Some(2));
}
