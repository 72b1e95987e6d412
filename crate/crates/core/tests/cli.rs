//! End-to-end runs of the `riesz` binary.

use std::process::{Command, Output};

fn riesz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riesz")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = riesz(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

const Z3SQ: &str = "(0,0),(0,1),(1,0),(1,1)";
const TWO_SECTIONS: &str = "(0,0),(2,0),(0,1),(1,1),(0,2),(1,2)";

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let commands: &[&[&str]] = &[
        &["quantities", "-g", "Z3^2", "-E", Z3SQ, "--set"],
        &["quantities", "-g", "Z8", "-E", "0,1,3", "--set", "--strategy", "random-loop", "--seed", "7"],
        &["search", "-g", "Z12", "-E", "0,1,5"],
        &["tiling", "-g", "Z3^2", "-E", TWO_SECTIONS, "-H", "(1,0)", "--certify"],
        &["verify", "-n", "20"],
        &["examples", "condtoinfty", "--m", "2..4"],
    ];
    for cmd in commands {
        let first = stdout(cmd);
        assert_eq!(first, stdout(cmd), "{cmd:?}");
        for threads in ["1", "4"] {
            let mut with = cmd.to_vec();
            with.extend(["--threads", threads]);
            assert_eq!(first, stdout(&with), "{cmd:?} at {threads} threads");
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(riesz(&["quantities", "-g", "Z3", "-E", "0,1", "-B", "0,1"]).status.code(), Some(0));
    assert_eq!(riesz(&["verify", "--only", "table", "--tol=-1"]).status.code(), Some(1));
    assert_eq!(riesz(&["quantities", "-g", "Zx", "-E", "0"]).status.code(), Some(2));
    assert_eq!(riesz(&["quantities", "-g", "Z3", "-E", "0,1", "-B", "0"]).status.code(), Some(2));
    assert_eq!(riesz(&["verify", "--only", "no-such-check"]).status.code(), Some(2));
    assert_eq!(riesz(&["search", "-g", "Z3^2", "-E", Z3SQ, "--cap", "3"]).status.code(), Some(3));
}

#[test]
fn pair_report_and_infinity() {
    let v = json(&["quantities", "-g", "Z3", "-E", "0,1", "-B", "0,1"]);
    assert_eq!(v["command"], "quantities");
    assert_eq!(v["seed"], 0);
    assert_eq!(v["report"]["rho"], 3.0);
    assert_eq!(v["report"]["normalized"]["L"], 2.0);
    // a singular pair: {0,2} against {0,2} in Z4
    let v = json(&["quantities", "-g", "Z4", "-E", "0,2", "-B", "0,2"]);
    assert_eq!(v["report"]["rho"], "inf");
    assert_eq!(v["report"]["is_basis"], false);
}

#[test]
fn set_quantities_in_every_format() {
    let v = json(&["quantities", "-g", "Z3^2", "-E", Z3SQ, "--set", "--q", "rho"]);
    let text = v.to_string();
    assert!(text.contains("6.85410196625"), "{text}");
    let csv = stdout(&["quantities", "-g", "Z3", "-E", "0,1", "--set", "--format", "csv"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("quantity,value,normalized,witness,strategy,seed"));
    assert_eq!(lines.count(), 4);
    let table = stdout(&["quantities", "-g", "Z3", "-E", "0,1", "--set", "--format", "table", "--seed", "3"]);
    assert!(table.starts_with("seed: 3\n"), "{table}");
}

#[test]
fn subsets_from_files() {
    let dir = std::env::temp_dir().join(format!("riesz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("e.txt");
    std::fs::write(&path, "(0,0)\n(0,1)\n(1,0)\n(1,1)\n").unwrap();
    let from_file = stdout(&["quantities", "-g", "Z3^2", "-E", &format!("@{}", path.display()), "--set"]);
    let inline = stdout(&["quantities", "-g", "Z3^2", "-E", Z3SQ, "--set"]);
    assert_eq!(from_file, inline);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn search_and_tiling_commands() {
    let v = json(&["search", "-g", "Z4", "-E", "0,1", "--mode", "partners"]);
    assert_eq!(v["count"], 6);
    let v = json(&["search", "-g", "Z2^2", "-E", "(0,0),(0,1)", "-E", "(0,0),(1,0)", "-E", "(0,0),(1,1)"]);
    assert!(v.to_string().contains("null"), "{v}");
    let v = json(&["tiling", "-g", "Z3^2", "-E", TWO_SECTIONS, "-H", "(1,0)", "--certify"]);
    assert_eq!(v["analysis"]["level"], 2);
    assert_eq!(v["certificate"]["k"], 1);
}

#[test]
fn verify_lists_and_passes() {
    let list = stdout(&["verify", "--list", "--format", "csv"]);
    assert!(list.lines().count() > 30);
    let v = json(&["verify", "--only", "table,weighted-z2"]);
    assert_eq!(v["checks_run"], 2);
    assert_eq!(v["failures"], 0);
}

#[test]
fn examples_families() {
    let csv = stdout(&["examples", "zmsize2", "--m", "3,6"]);
    assert_eq!(csv.lines().count(), 3);
    let v = json(&["examples", "twocrosssects", "--m", "3", "--format", "json"]);
    assert_eq!(v["rows"][0]["all_bounds_hold"], "true");
    assert_eq!(riesz(&["examples", "nope"]).status.code(), Some(2));
}
