use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holderfract")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("holderfract-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

#[test]
fn dim_koch() {
    let o = run(&["dim", "--gallery", "koch"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("s = 1.26186"), "{}", stdout(&o));
}

#[test]
fn carpet_fig2_reports_similarity_dimension() {
    let o = run(&["carpet", "--gallery", "fig2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let s = v["dimensions"]["similarity"].as_f64().unwrap();
    assert!((s - 5f64.log2()).abs() < 1e-9);
    assert_eq!(v["connectivity"]["verdict"], "Connected");
}

#[test]
fn cantor_pair_is_certified_disconnected() {
    let o = run(&["connect", "--gallery", "cantor-pair"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Disconnected (certified"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["dim"]).status.code(), Some(1));
    assert_eq!(run(&["dim", "--gallery", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["param", "--gallery", "gasket", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["arc", "--gallery", "gasket"]).status.code(), Some(2));
    assert_eq!(run(&["path", "--gallery", "gasket", "--from", "0,0", "--to", "1"]).status.code(), Some(2));
    assert_eq!(run(&["dim", "/nonexistent/ifs.json"]).status.code(), Some(2));
}

#[test]
fn remes_rejects_oversized_tau() {
    let o = run(&["remes", "--gallery", "square", "--N", "1", "--v", "0.5,0.5", "--tau", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("separation"));
}

#[test]
fn snowflake_file_round_trips_through_arc() {
    let dir = scratch("snowflake");
    let d = dir.to_str().unwrap();
    assert_eq!(run(&["snowflake", "--gallery", "fig3", "--out", d]).status.code(), Some(0));
    let file = dir.join("snowflake.json");
    let from_file = dir.join("file");
    let in_process = dir.join("gallery");
    let a = run(&["arc", file.to_str().unwrap(), "--oracle", "arc-chain", "--depth", "2", "--out", from_file.to_str().unwrap()]);
    let b = run(&["arc", "--gallery", "fig3-snowflake", "--depth", "2", "--out", in_process.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let ca = fs::read(from_file.join("arc.csv")).unwrap();
    let cb = fs::read(in_process.join("arc.csv")).unwrap();
    assert!(ca == cb, "arc CSVs differ");
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn out_dir_receives_curve_files() {
    let dir = scratch("param");
    let o = run(&["param", "--gallery", "gasket", "--alpha", "1.7", "--depth", "2", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.join("param.csv")).unwrap();
    assert!(csv.lines().count() > 10);
    assert!(fs::read_to_string(dir.join("param.svg")).unwrap().starts_with("<svg"));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn gallery_lists_every_system() {
    let o = run(&["gallery"]);
    let text = stdout(&o);
    for name in ["segment", "cantor-pair", "koch", "gasket", "square", "sierpinski-carpet", "fig2-carpet", "fig4-carpet", "fig3-snowflake", "sponge-235"] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn file_input_matches_gallery() {
    let dir = scratch("koch");
    fs::create_dir_all(&dir).unwrap();
    let o = run(&["gallery", "koch", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let koch = r#"{"dim": 2, "metric": "euclidean", "maps": [
        {"matrix": [0.3333333333333333, 0, 0, 0.3333333333333333], "offset": [0, 0]},
        {"matrix": [0.16666666666666666, -0.28867513459481287, 0.28867513459481287, 0.16666666666666666], "offset": [0.3333333333333333, 0]},
        {"matrix": [0.16666666666666666, 0.28867513459481287, -0.28867513459481287, 0.16666666666666666], "offset": [0.5, 0.28867513459481287]},
        {"matrix": [0.3333333333333333, 0, 0, 0.3333333333333333], "offset": [0.6666666666666666, 0]}]}"#;
    let path = dir.join("koch-file.json");
    fs::write(&path, koch).unwrap();
    let o = run(&["dim", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("s = 1.26186"));
    let _ = fs::remove_dir_all(&dir);
}
