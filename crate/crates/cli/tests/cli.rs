use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn morita(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morita")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Writes catalog entry `name` to `name.json` in `dir`.
fn dump(dir: &Path, name: &str) {
    let o = morita(&["catalog", name, "--out", &format!("{name}.json")], dir);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn certify_and_check_round_trip() {
    let dir = TempDir::new().unwrap();
    for name in ["I1", "I2", "atlas-1-2"] {
        dump(dir.path(), name);
    }
    let o = morita(&["certify", "I1.json", "I2.json", "atlas-1-2.json", "--out", "cert.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cert: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("cert.json")).unwrap()).unwrap();
    assert_eq!(cert["u_size"], 34);
    let o = morita(&["check", "cert.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    // A certificate whose enlargement table was altered no longer checks.
    let mut tampered = cert.clone();
    let row = &mut tampered["u"]["mult"][1][1];
    *row = serde_json::json!(if row == 0 { 1 } else { 0 });
    std::fs::write(dir.path().join("bad.json"), tampered.to_string()).unwrap();
    let o = morita(&["check", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn non_associative_table_fails_verification() {
    let dir = TempDir::new().unwrap();
    // (1·2)·2 = 1 but 1·(2·2) = 0.
    std::fs::write(dir.path().join("t.json"), r#"{"n": 3, "mult": [[0,0,0],[0,0,1],[0,1,1]]}"#).unwrap();
    let o = morita(&["validate", "t.json"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let report = stdout(&o) + &stderr(&o);
    assert!(report.contains("not associative: (1*2)*2 = 1 but 1*(2*2) = 0"), "{report}");
}

#[test]
fn malformed_input_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("t.json"), "{\"n\": 2, \"mult\": [[0, 1], [1 0]]}").unwrap();
    let o = morita(&["validate", "t.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("t.json:1:"), "{}", stderr(&o));
    let o = morita(&["validate", "missing.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invariants_of_i3() {
    let dir = TempDir::new().unwrap();
    dump(dir.path(), "I3");
    let o = morita(&["invariants", "I3.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    for line in ["0-simplifying: true", "fundamental: true", "idempotents: 8", "D-classes: 4"] {
        assert!(text.contains(line), "{text}");
    }
}

#[test]
fn brandt_is_not_a_pseudogroup() {
    let dir = TempDir::new().unwrap();
    dump(dir.path(), "brandt2");
    let o = morita(&["validate", "brandt2.json"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn enlarge_then_extract() {
    let dir = TempDir::new().unwrap();
    dump(dir.path(), "atlas-1-2");
    let o = morita(&["enlarge", "atlas-1-2.json", "--out", "u.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let u: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("u.json")).unwrap()).unwrap();
    assert_eq!(u["n"], 34, "{u}");
    let o = morita(&["enlarge", "atlas-1-2.json", "--max-size", "10"], dir.path());
    assert_ne!(o.status.code(), Some(0));
}
