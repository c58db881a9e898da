use std::io::Write;
use std::process::{Command, Output, Stdio};

fn wonder(args: &[&str], stdin: &[u8]) -> Output {
    wonder_env(args, stdin, &[])
}

fn wonder_env(args: &[&str], stdin: &[u8], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wonder"));
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    cmd.env_remove("WONDER_MAX_REWRITES");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("spawn wonder");
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: &[u8]) -> Vec<u8> {
    let out = wonder(args, stdin);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn text(b: Vec<u8>) -> String {
    String::from_utf8(b).unwrap()
}

#[test]
fn fm_pipeline_prints_betti_numbers() {
    let d = ok(&["model", "fm-p1", "--n", "3"], b"");
    let r = ok(&["build"], &d);
    assert_eq!(text(ok(&["betti"], &r)), "1 4 4 1\n");
}

#[test]
fn keel_pipeline_prints_pd_line() {
    let d = ok(&["model", "keel", "--n", "2"], b"");
    let r = ok(&["build"], &d);
    assert_eq!(text(ok(&["pd"], &r)), "PD: yes; discrepancies: 0 0 0\n");
}

#[test]
fn truncated_file_is_a_parse_error() {
    let d = ok(&["model", "fm-p1", "--n", "3"], b"");
    let out = wonder(&["validate"], &d[..d.len() / 2]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
}

#[test]
fn unknown_flags_print_usage() {
    for args in [&["betti", "--frobnicate"][..], &["nonsense"][..], &["model", "fm-p9"][..]] {
        let out = wonder(args, b"");
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"), "{args:?}");
    }
}

#[test]
fn rewrite_cap_from_flag_and_environment() {
    let d = ok(&["model", "fm-p1", "--n", "3"], b"");
    let out = wonder(&["--max-rewrites", "0", "build"], &d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
    let out = wonder_env(&["build"], &d, &[("WONDER_MAX_REWRITES", "0")]);
    assert_eq!(out.status.code(), Some(2));
    let out = wonder_env(&["build", "--max-rewrites", "100"], &d, &[("WONDER_MAX_REWRITES", "0")]);
    assert!(out.status.success());
}

#[test]
fn written_files_are_readable_and_stable() {
    let dir = tempfile::tempdir().unwrap();
    let dpath = dir.path().join("d.wd");
    let rpath = dir.path().join("r.wr");
    let opath = dir.path().join("o.json");
    let (dp, rp, op) = (dpath.to_str().unwrap(), rpath.to_str().unwrap(), opath.to_str().unwrap());
    ok(&["model", "keel", "--n", "2", "--out", dp], b"");
    ok(&["build", dp, "--out", rp], b"");
    assert!(text(ok(&["validate", dp], b"")).starts_with("diagram ok"));
    assert_eq!(text(ok(&["validate", rp], b"")), "ring ok: dims 1 5 1\n");
    ok(&["oracle", "keel-2", "--out", op], b"");
    assert!(text(ok(&["validate", op], b"")).starts_with("oracle ok"));
    let first = std::fs::read(&rpath).unwrap();
    assert_eq!(ok(&["build", dp], b""), first);
    let diagram = std::fs::read(&dpath).unwrap();
    assert_eq!(ok(&["model", "keel", "--n", "2"], b""), diagram);
}

#[test]
fn decompose_lines() {
    let d = ok(&["model", "fm-p1", "--n", "3"], b"");
    assert_eq!(
        text(ok(&["decompose"], &d)),
        "nest={} mu={} burrow=Y shift=0 dims=1,3,3,1\nnest={D123} mu={D123:1} burrow=D123 shift=1 dims=1,1\ntotal 1 4 4 1\n"
    );
}

#[test]
fn compare_and_oracle_commands() {
    let dir = tempfile::tempdir().unwrap();
    let dpath = dir.path().join("d.wd");
    let dp = dpath.to_str().unwrap();
    ok(&["model", "fm-p1", "--n", "3", "--out", dp], b"");
    assert_eq!(text(ok(&["compare", dp, "fm-p1-3"], b"")), "agree: dims [1, 4, 4, 1]\n");
    let run = text(ok(&["oracle", "keel-2", "--run"], b""));
    assert!(run.starts_with("dims: 1 5 1\nPD: yes"));
    let out = wonder(&["compare", dp, "keel-2"], b"");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn broken_synthetic_center() {
    let d = ok(&["model", "synth", "--dims", "1,2,1", "--break", "1", "--seed", "7"], b"");
    let pd = text(ok(&["pd"], &d));
    assert!(pd.starts_with("PD: no"));
    assert!(pd.contains("equivalence: holds"));
    let out = wonder(&["model", "synth", "--dims", "1,2,1", "--break", "2"], b"");
    assert_eq!(out.status.code(), Some(1));
    let t = text(ok(&["discrepancy"], &ok(&["model", "broken", "--count", "1"], b"")));
    assert!(t.contains("ring: 0 0 2 0 0") && t.contains("sums match: yes"), "{t}");
}

#[test]
fn presentation_and_blocks() {
    let d = ok(&["model", "fm-curve", "--n", "3"], b"");
    let p = text(ok(&["presentation"], &d));
    assert!(!p.contains("nonzero"), "{p}");
    let b = text(ok(&["blocks", "--json"], &d));
    let v: serde_json::Value = serde_json::from_str(&b).unwrap();
    assert!(v["violations"].as_array().unwrap().is_empty());
}
