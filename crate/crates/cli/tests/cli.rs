use std::path::PathBuf;
use std::process::{Command, Output};

fn dashlang(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dashlang")).args(args).output().unwrap()
}

fn sample() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures/sample_dashboard.json")
        .to_string_lossy()
        .into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn validate_accepts_sample() {
    let o = dashlang(&["validate", &sample()]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn validate_reports_rules() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = std::fs::read_to_string(sample()).unwrap().replace("\"#", "\"#zz");
    std::fs::write(&path, text).unwrap();
    let o = dashlang(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).lines().any(|l| l.starts_with("BAD_COLOUR ")), "{}", stderr(&o));
}

#[test]
fn missing_file_and_malformed_input() {
    assert_eq!(dashlang(&["validate", "/no/such/file.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    std::fs::write(&path, "{").unwrap();
    assert_eq!(dashlang(&["validate", path.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(dashlang(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn render_writes_html() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("page.html");
    let o = dashlang(&["render", &sample(), "-o", out.to_str().unwrap(), "--mode", "pure", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let html = std::fs::read_to_string(&out).unwrap();
    assert!(html.starts_with("<!DOCTYPE html>"));
    assert!(html.contains("pie-slice"));

    let o = dashlang(&["render", &sample(), "-o", out.to_str().unwrap(), "--page", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn edit_then_diff() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("edits.json");
    std::fs::write(
        &script,
        r#"[{"kind": "setVisType", "target": "p0-i1", "payload": {"vistype": "ring"}},
            {"kind": "setTheme", "target": "dashboard", "payload": {"theme": "dark"}}]"#,
    )
    .unwrap();
    let out = dir.path().join("edited.json");
    let o = dashlang(&["edit", &sample(), "--script", script.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));

    let o = dashlang(&["diff", &sample(), out.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["major"]["matchedCount"], 1);
    assert_eq!(report["major"]["originalCount"], 2);

    let o = dashlang(&["diff", &sample(), &sample()]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("overall"));
}

#[test]
fn rejected_edit_names_rule() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("edits.json");
    std::fs::write(&script, r#"[{"kind": "setTheme", "target": "dashboard", "payload": {"theme": "neon"}}]"#).unwrap();
    let out = dir.path().join("o.json");
    let o = dashlang(&["edit", &sample(), "--script", script.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("BAD_THEME"));
    assert!(!out.exists());
}

#[test]
fn new_and_gen_data() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("new.json");
    assert!(dashlang(&["new", "-o", model.to_str().unwrap()]).status.success());
    assert!(dashlang(&["validate", model.to_str().unwrap()]).status.success());

    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = dashlang(&["gen-data", "--seed", "9", "--kind", "timeSeries", "--n", "12", "-o", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(dashlang(&["gen-data", "--n", "0", "-o", a.to_str().unwrap()]).status.code(), Some(2));
}
