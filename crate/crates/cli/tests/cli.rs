use std::process::{Command, Output};

fn lfg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lfg")).args(args).output().expect("spawn lfg")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn unknown_suite_exits_2() {
    let o = lfg(&["suite", "run", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
}

#[test]
fn bad_flag_exits_2() {
    assert_eq!(lfg(&["group", "check"]).status.code(), Some(2));
}

#[test]
fn group_check_and_show() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("z2.mtable");
    std::fs::write(&good, "mtable 2\n0 1\n1 0\n").unwrap();
    let o = lfg(&["group", "check", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok: order 2"));

    let bad = dir.path().join("bad.mtable");
    std::fs::write(&bad, "mtable 2\n0 1\n1 1\n").unwrap();
    assert_eq!(lfg(&["group", "check", bad.to_str().unwrap()]).status.code(), Some(2));

    let o = lfg(&["group", "show", "Z3"]);
    assert_eq!(stdout(&o), "mtable 3\n0 1 2\n1 2 0\n2 0 1\n");
}

#[test]
fn amalgam_run_prints_table_and_embeddings() {
    let o = lfg(&["amalgam", "run", "Z1", "Z2", "Z2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("mtable 4\n"), "{s}");
    assert!(s.contains("j1: 0 ") && s.contains("j2: 0 "));
}

#[test]
fn amalgam_laws_pass() {
    let o = lfg(&["amalgam", "laws", "Z2", "Z4", "S3", "--emb1", "0,2", "--emb2", "0,3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn tries_sample_is_seeded() {
    let a = lfg(&["tries", "sample", "Z2", "S3", "Z4", "--emb1", "0,1", "--emb2", "0,2", "--seed", "7", "--count", "4"]);
    let b = lfg(&["tries", "sample", "Z2", "S3", "Z4", "--emb1", "0,1", "--emb2", "0,2", "--seed", "7", "--count", "4"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 4);
    assert_eq!(stdout(&a).lines().next(), Some("i1: 0 2 3; i2: 0 3"));
}

#[test]
fn scheme_apply_cg_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = lfg(&["scheme", "apply", "cg", "Z3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("extension.txt")).unwrap();
    assert!(text.starts_with("mtable "));
    assert!(text.contains("\nj0: ") && text.contains("\ntuple: "));
}

#[test]
fn split_check_exit_codes() {
    let o = lfg(&["split", "check", "S3", "--tuple", "3", "--g", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = lfg(&["split", "check", "S3", "--tuple", "4", "--g", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "splits: m=1 b1: 4 b2: 5 term=x0 c4\n");
}

#[test]
fn closure_run_then_certify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = lfg(&["closure", "run", "--steps", "2", "--bound", "2", "--out", d]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = lfg(&["closure", "certify", d, "--bound", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn suite_report_is_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let o = lfg(&["suite", "run", "types", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("types.jsonl")).unwrap();
    for l in text.lines() {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["suite"], "types");
        assert!(v.get("wall_ms").is_none());
    }
}
