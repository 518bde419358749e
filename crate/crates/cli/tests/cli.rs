use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sml2gallina"))
}

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(rel)
}

fn write_input(dir: &Path, src: &str) -> PathBuf {
    let p = dir.join("in.sml");
    fs::write(&p, src).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn contract_writes_theorem() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/out.v");
    let o = bin().arg(data("golden/contract.sml")).arg("-o").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("Require Import intSml."), "{text}");
    assert!(text.contains("Theorem posAdd_THM:"), "{text}");
    assert!(text.contains("Admitted."));
}

#[test]
fn bind_failure_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "val x::l = []\n");
    let out = dir.path().join("out.v");
    let o = bin().arg(&input).arg("-o").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("evaluate: bind failure"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn raise_is_unsupported() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.v");
    let o = bin().arg(data("unsupported/raise.sml")).arg("-o").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unsupported"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn parse_and_type_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    for (src, stage) in [("val x = (1", "parse"), ("val x = 1 + true", "elaborate")] {
        let input = write_input(dir.path(), src);
        let o = bin().arg(&input).output().unwrap();
        assert_eq!(o.status.code(), Some(1), "{src}");
        assert!(stderr(&o).contains(&format!(": {stage}: ")), "{src}: {}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn missing_input_exits_1() {
    let o = bin().arg("/nonexistent/file.sml").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fuel_flag_controls_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "fun count 0 = 0\n  | count n = 1 + count (n - 1)\nval c = count 50\n");
    let o = bin().arg(&input).args(["--fuel", "10"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fuel exhausted"), "{}", stderr(&o));
    assert_eq!(bin().arg(&input).args(["--fuel", "1000"]).output().unwrap().status.code(), Some(0));
    assert_eq!(bin().arg(&input).args(["--fuel", "10", "--no-eval"]).output().unwrap().status.code(), Some(0));
    let zero = bin().arg(&input).args(["--fuel", "0"]).output().unwrap();
    assert_ne!(zero.status.code(), Some(0));
}

#[test]
fn no_eval_output_is_identical() {
    let input = data("golden/modules.sml");
    let a = bin().arg(&input).output().unwrap();
    let b = bin().arg(&input).arg("--no-eval").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn header_and_normalization_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "val L = []\n");
    let o = bin().arg(&input).args(["--no-header", "--normalize-names"]).output().unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text, "Definition L {_'1 : Type} := ([] : @list _'1).\n");
    let o = bin().arg(&input).output().unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("From Equations Require Import Equations."));
    assert!(text.contains("Generalizable All Variables."));
}

#[test]
fn shim_dir_receives_support_files() {
    let dir = tempfile::tempdir().unwrap();
    let shims = dir.path().join("lib");
    let o = bin().arg(data("golden/records.sml")).arg("--shim-dir").arg(&shims).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    for name in ["intSml", "listSml", "notationsSml", "listPairSml"] {
        assert!(shims.join(format!("{name}.v")).is_file(), "{name}");
    }
}

#[test]
fn warnings_go_to_stderr() {
    let o = bin().arg(data("golden/hd.sml")).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning: elaborate: match not exhaustive"), "{}", stderr(&o));
    assert!(!String::from_utf8_lossy(&o.stdout).contains("warning"));
}
