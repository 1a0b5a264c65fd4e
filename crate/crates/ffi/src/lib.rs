//! C ABI over the `qrl` library.
//!
//! Formulas and traces are opaque heap handles owned by the caller and
//! released with the matching `_free` function. Every fallible function
//! returns a [`QrlStatus`]; on failure a message is available from
//! [`qrl_last_error_message`] on the same thread. Strings returned by the
//! library are released with [`qrl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qrl::oracle::{eval_elimination, eval_recursive, OracleLimits};
use qrl::qdimacs::{parse_qdimacs, write_qdimacs, ParseOptions};
use qrl::reducer::{decide_with, DecideOptions, ReductionTrace};
use qrl::trace::write_trace;
use qrl::{Error, Formula, ScanPolicy, Verdict};

/// A parsed formula.
pub struct QrlFormula(Formula);

/// The result of running the reduction procedure.
pub struct QrlTrace(ReductionTrace);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QrlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Malformed = 4,
    Precondition = 5,
    Refused = 6,
    Internal = 7,
    InvalidArgument = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QrlVerdict {
    False = 0,
    True = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QrlPolicy {
    Ascending = 0,
    Descending = 1,
    /// Shuffled scan order; uses the `seed` argument.
    SeededRandom = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QrlOracle {
    Recursive = 0,
    Elimination = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: QrlStatus, msg: impl Into<String>) -> QrlStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> QrlStatus {
    let status = match &e {
        Error::Parse(_) => QrlStatus::Parse,
        Error::Malformed(_) => QrlStatus::Malformed,
        Error::Precondition(_) => QrlStatus::Precondition,
        Error::Refused(_) => QrlStatus::Refused,
        Error::Internal(_) => QrlStatus::Internal,
        _ => QrlStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

fn guarded(f: impl FnOnce() -> QrlStatus) -> QrlStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(QrlStatus::Internal, "panic inside qrl"))
}

fn verdict(v: Verdict) -> QrlVerdict {
    if v.is_true() {
        QrlVerdict::True
    } else {
        QrlVerdict::False
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qrl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses NUL-terminated QDIMACS text into `*out`.
///
/// # Safety
/// `text` must be NULL or a valid NUL-terminated string; `out` must be NULL
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qrl_formula_parse(
    text: *const c_char,
    lenient: bool,
    out: *mut *mut QrlFormula,
) -> QrlStatus {
    guarded(|| {
        if text.is_null() || out.is_null() {
            return fail(QrlStatus::NullPointer, "null argument");
        }
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(QrlStatus::InvalidUtf8, "input is not valid UTF-8");
        };
        let options = if lenient {
            ParseOptions::lenient()
        } else {
            ParseOptions::strict()
        };
        match parse_qdimacs(text, options) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(QrlFormula(f)));
                QrlStatus::Ok
            }
            Err(d) => from_error(d.into()),
        }
    })
}

/// # Safety
/// `f` must be NULL or a handle from [`qrl_formula_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qrl_formula_free(f: *mut QrlFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be NULL or a live formula handle.
#[no_mangle]
pub unsafe extern "C" fn qrl_formula_num_vars(f: *const QrlFormula) -> usize {
    f.as_ref().map_or(0, |f| f.0.num_vars())
}

/// # Safety
/// `f` must be NULL or a live formula handle.
#[no_mangle]
pub unsafe extern "C" fn qrl_formula_num_clauses(f: *const QrlFormula) -> usize {
    f.as_ref().map_or(0, |f| f.0.num_clauses())
}

/// Variables plus clauses plus literal occurrences.
///
/// # Safety
/// `f` must be NULL or a live formula handle.
#[no_mangle]
pub unsafe extern "C" fn qrl_formula_size(f: *const QrlFormula) -> usize {
    f.as_ref().map_or(0, |f| f.0.size())
}

/// Canonical QDIMACS text of `f`, or NULL on failure. Free with [`qrl_string_free`].
///
/// # Safety
/// `f` must be NULL or a live formula handle.
#[no_mangle]
pub unsafe extern "C" fn qrl_formula_to_qdimacs(f: *const QrlFormula) -> *mut c_char {
    let Some(f) = f.as_ref() else {
        set_error("null argument".into());
        return ptr::null_mut();
    };
    match write_qdimacs(&f.0) {
        Ok(s) => into_c_string(s),
        Err(e) => {
            from_error(e);
            ptr::null_mut()
        }
    }
}

/// Runs the reduction procedure and stores the trace in `*out`.
///
/// # Safety
/// `f` must be a live formula handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qrl_decide(
    f: *const QrlFormula,
    policy: QrlPolicy,
    seed: u64,
    early_exit: bool,
    out: *mut *mut QrlTrace,
) -> QrlStatus {
    guarded(|| {
        let (Some(f), false) = (f.as_ref(), out.is_null()) else {
            return fail(QrlStatus::NullPointer, "null argument");
        };
        let policy = match policy {
            QrlPolicy::Ascending => ScanPolicy::Ascending,
            QrlPolicy::Descending => ScanPolicy::Descending,
            QrlPolicy::SeededRandom => ScanPolicy::SeededRandom(seed),
        };
        match decide_with(&f.0, DecideOptions { policy, early_exit }) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(QrlTrace(t)));
                QrlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `t` must be NULL or a handle from [`qrl_decide`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qrl_trace_free(t: *mut QrlTrace) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn qrl_trace_verdict(t: *const QrlTrace) -> QrlVerdict {
    verdict(t.as_ref().expect("live trace handle").0.verdict)
}

/// # Safety
/// `t` must be NULL or a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn qrl_trace_num_steps(t: *const QrlTrace) -> usize {
    t.as_ref().map_or(0, |t| t.0.steps.len())
}

/// The trace as `qrl-trace/1` JSON, or NULL. Free with [`qrl_string_free`].
///
/// # Safety
/// `t` must be NULL or a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn qrl_trace_to_json(t: *const QrlTrace) -> *mut c_char {
    match t.as_ref() {
        Some(t) => into_c_string(write_trace(&t.0)),
        None => {
            set_error("null argument".into());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qrl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Evaluates `f` exactly. Zero limits select the defaults.
///
/// # Safety
/// `f` must be a live formula handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qrl_oracle_eval(
    f: *const QrlFormula,
    method: QrlOracle,
    max_vars: usize,
    max_literals: usize,
    out: *mut QrlVerdict,
) -> QrlStatus {
    guarded(|| {
        let (Some(f), false) = (f.as_ref(), out.is_null()) else {
            return fail(QrlStatus::NullPointer, "null argument");
        };
        let defaults = OracleLimits::default();
        let limits = OracleLimits {
            max_vars: if max_vars == 0 { defaults.max_vars } else { max_vars },
            max_literals: if max_literals == 0 {
                defaults.max_literals
            } else {
                max_literals
            },
        };
        let result = match method {
            QrlOracle::Recursive => eval_recursive(&f.0, &limits),
            QrlOracle::Elimination => eval_elimination(&f.0, &limits),
        };
        match result {
            Ok(v) => {
                *out = verdict(v.value);
                QrlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
