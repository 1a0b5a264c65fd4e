use std::ffi::{CStr, CString};
use std::ptr;

use qrl_ffi::*;

const F_D: &str = "p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n";
const F_E: &str = "p cnf 2 3\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n1 -2 0\n";

fn parse(text: &str) -> *mut QrlFormula {
    let c = CString::new(text).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { qrl_formula_parse(c.as_ptr(), false, &mut f) }, QrlStatus::Ok);
    assert!(!f.is_null());
    f
}

#[test]
fn decide_and_trace() {
    for (text, expected) in [(F_D, QrlVerdict::True), (F_E, QrlVerdict::False)] {
        let f = parse(text);
        unsafe {
            assert_eq!(qrl_formula_num_vars(f), 2);
            let mut t = ptr::null_mut();
            assert_eq!(qrl_decide(f, QrlPolicy::SeededRandom, 9, false, &mut t), QrlStatus::Ok);
            assert_eq!(qrl_trace_verdict(t), expected);
            let json = qrl_trace_to_json(t);
            let s = CStr::from_ptr(json).to_str().unwrap().to_string();
            assert!(s.contains("\"qrl-trace/1\""));
            if expected == QrlVerdict::True {
                assert!(qrl_trace_num_steps(t) > 0);
            }
            qrl_string_free(json);
            qrl_trace_free(t);

            let mut v = QrlVerdict::False;
            assert_eq!(qrl_oracle_eval(f, QrlOracle::Elimination, 0, 0, &mut v), QrlStatus::Ok);
            assert_eq!(v, expected);
            qrl_formula_free(f);
        }
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let c = CString::new("p cnf 2 1\ne 1 0\n1 x 0\n").unwrap();
    let mut f = ptr::null_mut();
    let status = unsafe { qrl_formula_parse(c.as_ptr(), false, &mut f) };
    assert_eq!(status, QrlStatus::Parse);
    assert!(f.is_null());
    let msg = unsafe { CStr::from_ptr(qrl_last_error_message()) }.to_str().unwrap();
    assert!(msg.contains("line 3"), "{msg}");
}

#[test]
fn null_and_refusal() {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { qrl_formula_parse(ptr::null(), false, &mut f) }, QrlStatus::NullPointer);
    let mut v = QrlVerdict::False;
    assert_eq!(
        unsafe { qrl_oracle_eval(ptr::null(), QrlOracle::Recursive, 0, 0, &mut v) },
        QrlStatus::NullPointer
    );
    let f = parse(F_E);
    assert_eq!(
        unsafe { qrl_oracle_eval(f, QrlOracle::Recursive, 1, 0, &mut v) },
        QrlStatus::Refused
    );
    unsafe {
        assert_eq!(qrl_formula_size(ptr::null()), 0);
        let text = qrl_formula_to_qdimacs(f);
        assert_eq!(CStr::from_ptr(text).to_str().unwrap(), F_E);
        qrl_string_free(text);
        qrl_formula_free(f);
        qrl_formula_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qrl.h")).unwrap();
    for name in [
        "qrl_last_error_message",
        "qrl_formula_parse",
        "qrl_formula_free",
        "qrl_formula_num_vars",
        "qrl_formula_num_clauses",
        "qrl_formula_size",
        "qrl_formula_to_qdimacs",
        "qrl_decide",
        "qrl_trace_free",
        "qrl_trace_verdict",
        "qrl_trace_num_steps",
        "qrl_trace_to_json",
        "qrl_string_free",
        "qrl_oracle_eval",
        "typedef struct QrlFormula QrlFormula",
        "QRL_STATUS_REFUSED",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/qrl.h");
    let status = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status();
    match status {
        Ok(s) => assert!(s.success()),
        Err(_) => eprintln!("no C compiler found; skipping"),
    }
}
