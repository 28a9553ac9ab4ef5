//! End-to-end tests of the binary: exit codes, report determinism, the
//! atlas dump, manifest round-trips and the corruption hooks.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use flatglue_cli::corpus;
use flatglue_cli::manifest::Manifest;

fn flatglue(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatglue"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_example(dir: &Path, name: &str) -> std::path::PathBuf {
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, corpus::find(name).unwrap().text).unwrap();
    path
}

#[test]
fn verify_exits_zero_on_every_example() {
    for example in &corpus::EXAMPLES {
        let out = flatglue(&["verify", "--example", example.name]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}: {}",
            example.name,
            stdout_of(&out)
        );
        assert!(stdout_of(&out).contains("overall: VERIFIED"));
    }
}

#[test]
fn verify_accepts_manifest_files_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_example(dir.path(), "a1-two-lifts");
    let first = flatglue(&["verify", path.to_str().unwrap()]);
    let second = flatglue(&["verify", path.to_str().unwrap()]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(
        first.stdout, second.stdout,
        "reports must be byte-identical"
    );

    // JSON format is deterministic too
    let j1 = flatglue(&["verify", path.to_str().unwrap(), "--format", "json"]);
    let j2 = flatglue(&["verify", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(j1.stdout, j2.stdout);
    let parsed: serde_json::Value = serde_json::from_slice(&j1.stdout).unwrap();
    assert_eq!(parsed["overall"], "VERIFIED");
    assert_eq!(parsed["manifest"], "a1-two-lifts");
}

#[test]
fn report_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report.json");
    let out = flatglue(&[
        "verify",
        "--example",
        "a2-rank2",
        "--report",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&report_path).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["failed"], 0);
    assert!(parsed["records"].as_array().unwrap().len() > 10);
}

#[test]
fn missing_file_and_unknown_example_exit_two() {
    let out = flatglue(&["verify", "/nonexistent/manifest.json"]);
    assert_eq!(out.status.code(), Some(2));

    let out = flatglue(&["verify", "--example", "unknown"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("a1-two-lifts"),
        "error lists available names: {err}"
    );

    let out = flatglue(&["example", "unknown"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exponent_bound_and_bad_lift_exit_two() {
    let dir = tempfile::tempdir().unwrap();

    // exponent = p is rejected by validation
    let mut manifest = Manifest::parse(corpus::find("a1-two-lifts").unwrap().text).unwrap();
    manifest.exponent = 5;
    let path = dir.path().join("exp.json");
    fs::write(&path, manifest.emit()).unwrap();
    let out = flatglue(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout_of(&out));
    assert!(stdout_of(&out).contains("exponent-bound"));

    // a lift that does not reduce to the p-th power map
    let mut manifest = Manifest::parse(corpus::find("a1-two-lifts").unwrap().text).unwrap();
    manifest.patches[1].lift[0] = "t1^5 + t1".to_string();
    let path = dir.path().join("lift.json");
    fs::write(&path, manifest.emit()).unwrap();
    let out = flatglue(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout_of(&out));
    assert!(stdout_of(&out).contains("lift-t1"));

    // syntax error in a polynomial reports its field path
    let mut manifest = Manifest::parse(corpus::find("a1-two-lifts").unwrap().text).unwrap();
    manifest.patches[0].lift[0] = "t1^^5".to_string();
    let path = dir.path().join("syn.json");
    fs::write(&path, manifest.emit()).unwrap();
    let out = flatglue(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("lift[0]"), "field path in {err}");
}

#[test]
fn corrupt_hook_drives_exit_one() {
    let out = flatglue(&["verify", "--example", "a1-two-lifts", "--corrupt", "G:0"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_of(&out);
    assert!(text.contains("[FAIL] ThmStep1"));
    assert!(!text.contains("[FAIL] ThmStep2"));

    let out = flatglue(&[
        "verify",
        "--example",
        "a1-two-lifts",
        "--corrupt",
        "bogus:0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn checks_subset_filters_kinds() {
    let out = flatglue(&[
        "verify",
        "--example",
        "a1-two-lifts",
        "--checks",
        "Prop1,Lemma2i",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("Prop1"));
    assert!(text.contains("Lemma2i"));
    assert!(!text.contains("ThmStep1"));
    assert!(!text.contains("Prop4"));
}

#[test]
fn twist_writes_the_worked_gluing_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("atlas.txt");
    let out = flatglue(&[
        "twist",
        "--example",
        "a1-two-lifts",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let atlas = fs::read_to_string(&out_path).unwrap();
    assert!(
        atlas.contains("G[alpha|beta] = [[1, 4*t1^2], [0, 1]]"),
        "{atlas}"
    );
    assert!(atlas.contains("A[alpha] = [[0, t1^4], [0, 0]] dt1"));

    // two runs are byte-identical
    let out_path2 = dir.path().join("atlas2.txt");
    flatglue(&[
        "twist",
        "--example",
        "a1-two-lifts",
        "--out",
        out_path2.to_str().unwrap(),
    ]);
    assert_eq!(atlas, fs::read_to_string(&out_path2).unwrap());
}

#[test]
fn twist_single_patch_has_no_gluing_block() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("atlas.txt");
    let out = flatglue(&[
        "twist",
        "--example",
        "a1-single",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let atlas = fs::read_to_string(&out_path).unwrap();
    assert!(atlas.contains("A[alpha]"));
    assert!(!atlas.contains("G["));
}

#[test]
fn twist_rejects_invalid_manifest_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = Manifest::parse(corpus::find("a1-two-lifts").unwrap().text).unwrap();
    manifest.patches[1].lift[0] = "t1^5 + t1".to_string();
    let path = dir.path().join("bad.json");
    fs::write(&path, manifest.emit()).unwrap();
    let out_path = dir.path().join("atlas.txt");
    let out = flatglue(&[
        "twist",
        path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
}

#[test]
fn example_output_parses_and_round_trips() {
    for example in &corpus::EXAMPLES {
        let out = flatglue(&["example", example.name]);
        assert_eq!(out.status.code(), Some(0));
        let text = stdout_of(&out);
        let parsed = Manifest::parse(&text).unwrap();
        // canonical emit is a fixed point of parse . emit
        let emitted = parsed.emit();
        let reparsed = Manifest::parse(&emitted).unwrap();
        assert_eq!(parsed, reparsed, "{} round-trips", example.name);
        assert_eq!(emitted, reparsed.emit());
        parsed.to_inputs().unwrap();
    }
}

#[test]
fn list_examples_names_all() {
    let out = flatglue(&["list-examples"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    for example in &corpus::EXAMPLES {
        assert!(text.contains(example.name));
    }
}
