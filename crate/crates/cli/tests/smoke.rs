//! Drives the installed binary end to end through a temp directory.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nwsteiner"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nwsteiner-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn gen_solve_verify_cycle() {
    let inst = tmp("qdrat.steiner");
    let sol = tmp("qdrat.sol");
    let status = bin()
        .args(["gen", "qdrat", "--n", "7", "--seed", "4242", "--out"])
        .arg(&inst)
        .status()
        .unwrap();
    assert!(status.success());

    let status = bin()
        .arg("solve")
        .arg(&inst)
        .arg("--out")
        .arg(&sol)
        .status()
        .unwrap();
    assert!(status.success());

    let status = bin().arg("verify").arg(&inst).arg(&sol).status().unwrap();
    assert!(status.success());

    let out = bin().arg("oracle").arg(&inst).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("optimum"));

    let dump = tmp("model.lp");
    let status = bin()
        .arg("lp-dump")
        .arg(&inst)
        .arg("--out")
        .arg(&dump)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&dump).unwrap();
    assert!(text.contains("minimize"));
    assert!(text.contains("subject to"));
}

#[test]
fn usage_error_is_exit_one() {
    let status = bin().arg("frobnicate").status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn missing_file_is_exit_one() {
    let status = bin()
        .args(["solve", "/nonexistent/nothing.steiner"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}
