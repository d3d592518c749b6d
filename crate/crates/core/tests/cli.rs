//! The `cogbasic` binary, driven as a subprocess.

mod common;

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::time::Duration;

use cogbasic::lang::CONFLICT_RESOLUTION_PROGRAM;
use common::{StubServer, Tripwire};

const SKY: &str = "The sky is clear. The sky is not clear.";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cogbasic"));
    for var in ["COGBASIC_LLM_URL", "COGBASIC_LLM_MODEL", "COGBASIC_LLM_KEY", "RUST_LOG"] {
        c.env_remove(var);
    }
    c
}

fn cogbasic(args: &[&str]) -> Output {
    bin().args(args).stdin(Stdio::null()).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_prints_the_trace_and_exits_zero() {
    let o = cogbasic(&["run", "--text", SKY]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("LINE 70: IF CONFLICTS_COUNT() > 0 THEN 90\n"));
    assert!(out.contains("NEXT: 90\n"));
    assert!(out.contains("FINAL MEMORY\n"));
    assert!(!out.contains("LINE 80:"));
}

#[test]
fn quiet_run_prints_only_final_memory() {
    let o = cogbasic(&["-q", "run", "--text", "Cats purr."]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("FINAL MEMORY\n"));
}

#[test]
fn run_reads_program_and_scenario_files() {
    let dir = tempfile::tempdir().unwrap();
    let program = write(dir.path(), "p.cb", CONFLICT_RESOLUTION_PROGRAM);
    let scenario = write(dir.path(), "s.txt", "The shop opens at 9am. The shop opens at 10am.\n");
    let o = cogbasic(&["-q", "run", "--program", &program, "--scenario", &scenario]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("resolution: "));
}

#[test]
fn parse_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let dup = write(dir.path(), "dup.cb", "10 END\n10 END\n");
    let o = cogbasic(&["run", "--program", &dup]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("10"));

    let bad = write(dir.path(), "bad.cb", "10 PRINT\n20 FOO\n");
    let o = cogbasic(&["run", "--program", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("line 1") || err.contains("1:"), "{err}");
}

#[test]
fn missing_endpoint_exits_one() {
    let o = cogbasic(&["run", "--provider", "llm", "--text", SKY]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("COGBASIC_LLM_URL"));
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.cb", "10 GOTO 99\n");
    assert_eq!(cogbasic(&["run", "--program", &p]).status.code(), Some(2));
    let p = write(dir.path(), "q.cb", "10 PRINT nothing\n20 END\n");
    assert_eq!(cogbasic(&["run", "--program", &p]).status.code(), Some(2));
}

#[test]
fn step_limit_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "loop.cb", "10 GOTO 10\n");
    let o = cogbasic(&["run", "--program", &p, "--step-limit", "25"]);
    assert_eq!(o.status.code(), Some(3));
    let out = stdout(&o);
    assert_eq!(out.matches("LINE 10: GOTO 10").count(), 25);
    assert!(out.contains("OUTCOME: step-limit-exceeded"));
}

#[test]
fn check_trace_accepts_interpreter_output() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&cogbasic(&["run", "--text", SKY]));
    let trace = write(dir.path(), "t.txt", &text);
    let o = cogbasic(&["check-trace", &trace]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("no violations"));

    let jsonl = dir.path().join("t.jsonl");
    let o = cogbasic(&["-q", "run", "--text", SKY, "--trace-out", jsonl.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(cogbasic(&["check-trace", jsonl.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn check_trace_flags_a_tampered_trace() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&cogbasic(&["run", "--text", SKY])).replacen("NEXT: 90", "NEXT: 80", 1);
    let trace = write(dir.path(), "t.txt", &text);
    let o = cogbasic(&["check-trace", &trace]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("violation"));
}

#[test]
fn fmt_rewrites_then_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.cb", "20   END\n10 LET x=INPUT( )\n");
    assert_eq!(cogbasic(&["fmt", "--check", &p]).status.code(), Some(2));
    assert_eq!(cogbasic(&["fmt", &p]).status.code(), Some(0));
    let once = std::fs::read_to_string(&p).unwrap();
    assert_eq!(once, "10 LET x = INPUT()\n20 END\n");
    assert_eq!(cogbasic(&["fmt", "--check", &p]).status.code(), Some(0));
    assert_eq!(cogbasic(&["fmt", &p]).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&p).unwrap(), once);
}

#[test]
fn bench_prints_the_table() {
    let o = cogbasic(&["bench"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let header = out.lines().find(|l| l.starts_with("Model")).expect("table header");
    for col in ["D", "C", "R", "Full Chain"] {
        assert!(header.contains(col));
    }
}

#[test]
fn step_mode_reads_commands_from_stdin() {
    let mut child = bin()
        .args(["step", "--text", SKY])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"\n\nm\nq\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("LINE 10:"));
    assert!(out.contains("LINE 20:"));
    assert!(!out.contains("LINE 40:"));
    assert!(out.contains("OUTCOME: interrupted"));
    assert!(out.contains("FINAL MEMORY"));
}

#[test]
fn rules_provider_never_touches_the_network() {
    let wire = Tripwire::start();
    let o = bin()
        .args(["run", "--provider", "rules", "--text", SKY])
        .env("COGBASIC_LLM_URL", &wire.url)
        .env("COGBASIC_LLM_MODEL", "unused")
        .stdin(Stdio::null())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    std::thread::sleep(Duration::from_millis(50));
    assert_eq!(wire.hits(), 0);
}

#[test]
fn llm_provider_uses_the_configured_endpoint() {
    let stub = StubServer::completions(&[
        "- The sky is clear.\n- The sky is not clear.",
        "- The sky is clear. || The sky is not clear.",
        "- The sky is usually clear, but sometimes it is not.",
    ]);
    let o = bin()
        .args(["-q", "run", "--provider", "llm", "--text", SKY])
        .env("COGBASIC_LLM_URL", &stub.url)
        .env("COGBASIC_LLM_MODEL", "stub-model")
        .stdin(Stdio::null())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("resolution: The sky is usually clear, but sometimes it is not."));
    assert_eq!(stub.captured().len(), 3);
}
