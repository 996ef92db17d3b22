use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn pdx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdx")).args(args).output().expect("pdx runs")
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_file(rel: &str) -> String {
    corpus().join(rel).to_string_lossy().into_owned()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

#[test]
fn find_on_the_boundary_succeeds() {
    let out = pdx(&[
        "paradox",
        "find",
        "--action",
        "@f2-boundary",
        "--set",
        &corpus_file("sets/full.json"),
        "-r",
        "1",
        "-p",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["schema"], "pdx/1");
    assert_eq!(v["pieces"].as_array().unwrap().len(), 4);
    assert_eq!(v["verification"]["verdict"]["valid"], true);
    assert_eq!(v["inputs_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn integer_measure_is_feasible() {
    let out = pdx(&["measure", "lp", "--action", &corpus_file("actions/z-self.json"), "--window", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["outcome"], "feasible");
}

#[test]
fn integers_are_not_properly_infinite_within_bounds() {
    let out = pdx(&["tsg", "propinf", "--action", "@z-self", "--set", &corpus_file("sets/full.json"), "-r", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["found"], false);
}

#[test]
fn errors_exit_with_one_and_a_code() {
    let out = pdx(&["paradox", "find", "--action", "@f2-boundary", "--set", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[E_IO]"));

    let out = pdx(&["grp", "partition", "--group", "@z3", "--t", "s", "--colors", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[E_PRECONDITION]"));

    let out = pdx(&["grp", "reduce", "--group", "@f2", "a c"]);
    assert_eq!(out.status.code(), Some(1));

    let out = pdx(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tampered_certificate_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(corpus().join("paradox/f2-boundary-full.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["split"] = Value::from(1);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let out = pdx(&["paradox", "verify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E_VERIFY"));
    assert_eq!(stdout_json(&out)["verdict"]["valid"], false);
}

#[test]
fn corpus_reverifies() {
    let index: Value = serde_json::from_str(&fs::read_to_string(corpus().join("index.json")).unwrap()).unwrap();
    let docs = index["documents"].as_array().unwrap();
    assert!(docs.len() >= 25);
    for d in docs {
        let path = corpus_file(d["path"].as_str().unwrap());
        let out = match d["kind"].as_str().unwrap() {
            "paradox-cert" => pdx(&["paradox", "verify", &path]),
            "lp-result" => pdx(&["measure", "check", &path]),
            other => panic!("unexpected kind {other}"),
        };
        assert_eq!(out.status.code(), Some(0), "{path}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn corpus_regenerates_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = pdx(&["--jobs", "3", "demo", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let committed = files_under(&corpus());
    assert_eq!(files_under(dir.path()), committed);
    for rel in committed {
        let a = fs::read(corpus().join(&rel)).unwrap();
        let b = fs::read(dir.path().join(&rel)).unwrap();
        assert!(a == b, "{} differs", rel.display());
    }
}

#[test]
fn witness_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let cert = corpus_file("paradox/f2-self-classical.json");
    assert_eq!(pdx(&["cp", "witness-build", &cert, "-o", w.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(pdx(&["cp", "witness-verify", w.to_str().unwrap()]).status.code(), Some(0));
    let back = pdx(&["cp", "witness-extract", w.to_str().unwrap()]);
    assert_eq!(back.status.code(), Some(0));
    assert_eq!(stdout_json(&back)["verification"]["verdict"]["valid"], true);
}

#[test]
fn conversions_roundtrip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let p = dir.path().join("p.json");
    let cert = corpus_file("paradox/f2-boundary-full.json");
    assert_eq!(pdx(&["tsg", "convert", &cert, "-o", t.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(pdx(&["tsg", "verify", t.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(pdx(&["tsg", "convert", t.to_str().unwrap(), "-o", p.to_str().unwrap()]).status.code(), Some(0));
    let a: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let b: Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(a["pieces"], b["pieces"]);
}

#[test]
fn lemma_run_is_seeded() {
    let a = pdx(&["--seed", "9", "cp", "lemma52", "--random", "15"]);
    let b = pdx(&["--seed", "9", "--jobs", "4", "cp", "lemma52", "--random", "15"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
