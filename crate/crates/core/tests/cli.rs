use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qrl::fuzz::{Bank, DiffConfig};

const F_D: &str = "p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n";
const F_E: &str = "p cnf 2 3\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n1 -2 0\n";
/// Satisfiable, but no literal is redundant.
const STUCK: &str = "p cnf 9 6\ne 3 4 8 9 0\n-4 0\n-3 4 0\n3 -4 8 0\n-8 9 0\n3 -8 0\n8 -9 0\n";

fn qrl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrl"))
        .args(args)
        .env_remove("QRL_ORACLE_LIMITS")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_exit_codes_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "d.qdimacs", F_D);
    let e = write(dir.path(), "e.qdimacs", F_E);
    let trace = dir.path().join("t.json");

    let o = qrl(&["solve", &d, "--trace", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(10));
    assert_eq!(stdout(&o).lines().next(), Some("s cnf 1"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(json["schema"], "qrl-trace/1");
    assert_eq!(json["verdict"], "TRUE");

    let o = qrl(&["solve", &e, "--policy", "random:5"]);
    assert_eq!(o.status.code(), Some(20));
    assert_eq!(stdout(&o).lines().next(), Some("s cnf 0"));
}

#[test]
fn malformed_input_is_a_usage_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.qdimacs", "p cnf 2 1\ne 1 2 0\n1 -3 0\n");
    let o = qrl(&["solve", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(qrl(&["solve"]).status.code(), Some(1));
    assert_eq!(qrl(&["fuzz", "--widths", "3..1"]).status.code(), Some(1));
    assert_eq!(qrl(&["--help"]).status.code(), Some(0));
}

#[test]
fn oracle_command_and_refusal() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "d.qdimacs", F_D);
    let e = write(dir.path(), "e.qdimacs", F_E);
    assert_eq!(qrl(&["oracle", &d]).status.code(), Some(10));
    assert_eq!(qrl(&["oracle", &e, "--method", "elimination"]).status.code(), Some(20));
    assert_eq!(qrl(&["oracle", &e, "--oracle-vars", "1"]).status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_qrl"))
        .args(["oracle", &e])
        .env("QRL_ORACLE_LIMITS", "1,100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn check_agreement_refusal_and_banking() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "d.qdimacs", F_D);
    assert_eq!(qrl(&["check", &d]).status.code(), Some(0));

    let big: String = {
        let mut s = String::from("p cnf 40 1\ne");
        for v in 1..=40 {
            s.push_str(&format!(" {v}"));
        }
        s.push_str(" 0\n1 2 0\n");
        s
    };
    let big = write(dir.path(), "big.qdimacs", &big);
    assert_eq!(qrl(&["check", &big]).status.code(), Some(3));

    let stuck = write(dir.path(), "stuck.qdimacs", STUCK);
    let bank_dir = dir.path().join("bank");
    let o = qrl(&["check", &stuck, "--bank", bank_dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("c verdict-mismatch VIOLATED"));

    let bank = Bank::open(&bank_dir).unwrap();
    let entries = bank.entries().unwrap();
    assert_eq!(entries.len(), 1);
    assert!(bank.validate(&DiffConfig::default()).unwrap().iter().all(|c| c.ok()));
    let path = bank_dir.join(format!("{}.qdimacs", entries[0].hash));
    assert_eq!(qrl(&["check", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn shrink_command() {
    let dir = tempfile::tempdir().unwrap();
    let stuck = write(dir.path(), "stuck.qdimacs", STUCK);
    let out = dir.path().join("small.qdimacs");
    let o = qrl(&["shrink", &stuck, "--finding", "verdict-mismatch", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let small = fs::read_to_string(&out).unwrap();
    assert!(small.lines().count() <= STUCK.lines().count());
    assert_eq!(qrl(&["check", out.to_str().unwrap()]).status.code(), Some(2));

    let d = write(dir.path(), "d.qdimacs", F_D);
    assert_eq!(qrl(&["shrink", &d, "--finding", "verdict-mismatch"]).status.code(), Some(1));
}

#[test]
fn fuzz_command() {
    let o = qrl(&["fuzz", "--count", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["schema"], "qrl-report/1");
    assert_eq!(report["counters"]["instances"], 0);

    let dir = tempfile::tempdir().unwrap();
    let bank = dir.path().join("bank");
    let args = ["fuzz", "--vars", "8", "--clauses", "12", "--count", "200", "--seed", "1"];
    let mut with_bank = args.to_vec();
    with_bank.extend(["--bank", bank.to_str().unwrap(), "--workers", "2"]);
    let a = qrl(&with_bank);
    let b = qrl(&args);
    assert_eq!(a.status.code(), Some(2));
    let body = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    assert_eq!(body(&a), body(&b));
    let banked = fs::read_dir(&bank).unwrap().count();
    assert_eq!(banked, 2 * body(&a)["findings"].as_array().unwrap().len());
}

#[test]
fn bench_command() {
    let o = qrl(&["bench", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["rows"].as_array().unwrap().len(), 0);
    let o = qrl(&["bench", "--samples", "3", "--max-size", "500", "--family", "chain"]);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["rows"].as_array().unwrap().len(), 3);
    assert_eq!(r["bounds_hold"], true);
}
