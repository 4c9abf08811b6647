use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_decaystream"));
    c.env_remove("DECAYSTREAM_SEED");
    c
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn write_stream(dir: &Path) {
    let mut text = String::new();
    for i in 0..400 {
        let c = if i % 2 == 0 { 0.0 } else { 60.0 };
        text.push_str(&format!("{},{}\n", c + (i % 7) as f64, c - (i % 5) as f64));
    }
    std::fs::write(dir.join("pts.csv"), text).unwrap();
}

#[test]
fn poly_then_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    write_stream(dir.path());
    let out = run_in(dir.path(), &["poly", "--s", "1", "--k", "2", "--input", "pts.csv", "--output", "c.jsonl"]);
    assert!(out.status.success());
    let v = run_in(dir.path(), &["verify", "--coreset", "c.jsonl", "--s", "1", "--k", "2", "--input", "pts.csv"]);
    assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stdout));
    assert!(String::from_utf8_lossy(&v.stdout).contains("\"pass\":true"));
}

#[test]
fn corrupted_coreset_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    write_stream(dir.path());
    let out = run_in(dir.path(), &["poly", "--s", "1", "--k", "2", "--input", "pts.csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let last = lines.pop().unwrap();
    lines.push(last.replace("\"weight\":1.0", "\"weight\":50.0"));
    std::fs::write(dir.path().join("bad.jsonl"), lines.join("\n")).unwrap();
    let v = run_in(dir.path(), &["verify", "--coreset", "bad.jsonl", "--s", "1", "--k", "2", "--epsilon", "0.1", "--input", "pts.csv"]);
    assert_eq!(v.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&v.stdout).contains("max_rel_error"));
}

#[test]
fn reads_jsonl_from_stdin() {
    let mut child = bin()
        .args(["exp", "--h", "4", "--delta-aspect", "16", "--k", "1", "--format", "jsonl"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"{\"coords\":[1.0]}\n{\"coords\":[2.0]}\n{\"coords\":[2.0]}\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["centers"], serde_json::json!([[2.0]]));
    assert_eq!(v["n"], 3);
}

#[test]
fn env_seed_matches_flag() {
    let dir = tempfile::tempdir().unwrap();
    write_stream(dir.path());
    let args = ["exp", "--h", "4", "--delta-aspect", "128", "--k", "2", "--input", "pts.csv"];
    let via_env = bin().args(args).env("DECAYSTREAM_SEED", "9").current_dir(dir.path()).output().unwrap();
    let via_flag = run_in(dir.path(), &[&args[..], &["--seed", "9"]].concat());
    let env_wins = bin().args([&args[..], &["--seed", "1"]].concat()).env("DECAYSTREAM_SEED", "9").current_dir(dir.path()).output().unwrap();
    assert_eq!(via_env.stdout, via_flag.stdout);
    assert_eq!(via_env.stdout, env_wins.stdout);
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    write_stream(dir.path());
    let usage = run_in(dir.path(), &["exp", "--gamma", "5"]);
    assert_eq!(usage.status.code(), Some(64));
    let missing = run_in(dir.path(), &["poly", "--s", "1", "--k", "1", "--input", "nope.csv"]);
    assert_eq!(missing.status.code(), Some(1));
    let unwritable = run_in(dir.path(), &["poly", "--s", "1", "--k", "1", "--input", "pts.csv", "--output", "no/such/dir/out.jsonl"]);
    assert_eq!(unwritable.status.code(), Some(1));
    std::fs::write(dir.path().join("bad.csv"), "1,2\n3\n").unwrap();
    let bad = run_in(dir.path(), &["poly", "--s", "1", "--k", "1", "--input", "bad.csv"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 2"));
    let aspect = run_in(dir.path(), &["exp", "--h", "4", "--delta-aspect", "2", "--k", "1", "--input", "pts.csv"]);
    assert_eq!(aspect.status.code(), Some(1));
}

#[test]
fn empty_input_is_an_empty_coreset_but_not_a_clustering() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.csv"), "").unwrap();
    let poly = run_in(dir.path(), &["poly", "--s", "1", "--k", "1", "--input", "empty.csv"]);
    assert!(poly.status.success());
    assert!(poly.stdout.is_empty());
    let exp = run_in(dir.path(), &["exp", "--h", "4", "--delta-aspect", "8", "--k", "1", "--input", "empty.csv"]);
    assert_eq!(exp.status.code(), Some(1));
}

#[test]
fn bench_writes_metrics_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["bench", "--algo", "exp", "--k", "2", "--h", "4", "--delta-aspect", "64", "--n", "150", "--runs", "2", "--oracle", "--output", "m.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("m.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("seed,n,stored_points"));
}
