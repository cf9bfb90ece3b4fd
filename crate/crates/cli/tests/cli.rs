//! Black-box tests of the command-line interface: exit codes, the JSON-lines
//! protocol, and run-to-run determinism of the daemon.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fimparse")
}

fn write_file(dir: &tempfile::TempDir, name: &str, content: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, content).unwrap();
    p
}

fn check(left: &str, middle: &str, right: &str) -> (i32, String) {
    let dir = tempfile::tempdir().unwrap();
    let l = write_file(&dir, "l", left);
    let m = write_file(&dir, "m", middle);
    let r = write_file(&dir, "r", right);
    let out = Command::new(bin())
        .args(["check", "--left", l.to_str().unwrap(), "--middle", m.to_str().unwrap(), "--right", r.to_str().unwrap()])
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    let (code, out) = check("if x:\n", "    y = 1", "\nz = 2\n");
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("may_stop=true"));

    // Replay dies mid-middle: an unopened bracket can never be closed by
    // this right context.
    let (code, out) = check("x = 1\n", "y = )", "\n");
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("rejected at offset"));

    // Unreadable input file.
    let out = Command::new(bin())
        .args(["check", "--left", "/nonexistent", "--middle", "/nonexistent", "--right", "/nonexistent"])
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 2);
}

#[test]
fn check_rejects_a_dead_left_context() {
    let (code, out) = check("x = )", "", "\n");
    assert_eq!(code, 1);
    assert!(out.contains("left context rejected"), "{out}");
}

fn serve_script(lines: &[&str]) -> String {
    let mut child = Command::new(bin())
        .arg("serve")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let stdin = child.stdin.as_mut().unwrap();
        for line in lines {
            writeln!(stdin, "{line}").unwrap();
        }
    }
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn serve_protocol_assigns_sequential_ids_and_is_deterministic() {
    let script = [
        r#"{"op":"open","left":"if x:\n","right":"\nz = 2\n"}"#,
        r#"{"op":"advance","id":1,"text":"    y = 1"}"#,
        r#"{"op":"may_stop","id":1}"#,
        r#"{"op":"fork","id":1}"#,
        r#"{"op":"advance","id":2,"text":" +"}"#,
        r#"{"op":"mask","id":1,"tokens":["","\n","pass","    ",")"],"eos":0}"#,
        r#"{"op":"mask","id":2}"#,
        r#"{"op":"close","id":1}"#,
        r#"{"op":"may_stop","id":1}"#,
    ];
    let first = serve_script(&script);
    let second = serve_script(&script);
    assert_eq!(first, second, "daemon output must be deterministic");

    let lines: Vec<serde_json::Value> =
        first.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), script.len());
    assert_eq!(lines[0]["id"], 1);
    assert_eq!(lines[0]["alive"], true);
    assert_eq!(lines[2]["may_stop"], true);
    assert_eq!(lines[3]["id"], 2, "fork takes the next id");
    assert_eq!(lines[4]["alive"], true);
    assert!(lines[5]["mask"].as_array().unwrap().contains(&serde_json::json!(0)));
    // The vocabulary persists across requests; the fork ends on a dangling
    // operator, so stopping is illegal and its mask lacks the end token.
    assert!(!lines[6]["mask"].as_array().unwrap().contains(&serde_json::json!(0)));
    assert_eq!(lines[8]["error"], "no such session");
}

#[test]
fn serve_reports_errors_without_dying() {
    let out = serve_script(&[
        "not json",
        r#"{"op":"advance","id":9,"text":"x"}"#,
        r#"{"op":"frobnicate","id":1}"#,
        r#"{"op":"open","left":"","right":""}"#,
    ]);
    let lines: Vec<serde_json::Value> =
        out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(lines[0]["error"].as_str().unwrap().contains("bad json"));
    assert_eq!(lines[1]["error"], "no such session");
    assert!(lines[2]["error"].as_str().unwrap().contains("unknown op"));
    assert_eq!(lines[3]["id"], 1);
}

#[test]
fn quotient_lists_sublanguages_for_a_generic_grammar() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_file(&dir, "g.bnf", "S: ASEQ ; S: BSEQ CSEQ ;\n");
    let l = write_file(&dir, "l.lex", "ASEQ 1 /a+/\nBSEQ 2 /b+/\nCSEQ 3 /c+/\n");
    let r = write_file(&dir, "r.txt", "c");
    let out = Command::new(bin())
        .args([
            "quotient",
            "--grammar",
            g.to_str().unwrap(),
            "--lexemes",
            l.to_str().unwrap(),
            "--right",
            r.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("boundary indices: [1]"), "{text}");
    assert!(text.contains("sublanguages:"), "{text}");
}
