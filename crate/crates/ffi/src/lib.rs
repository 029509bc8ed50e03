//! C ABI over the parchern library.
//!
//! A scenario is loaded once into an opaque handle. Report functions return
//! machine-format JSON through an out-parameter; the caller releases it with
//! `parchern_string_free`. On a nonzero status the message is available from
//! `parchern_last_error` until the next call on the same thread.

use parchern::cli::{self, Format, Outcome, ScenarioFile};
use parchern::minimize::SearchConfig;
use parchern::model::Model;
use parchern::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Status codes. The nonzero data codes match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParchernStatus {
    Ok = 0,
    ParseError = 2,
    InvariantViolated = 3,
    UnsupportedRank = 4,
    CheckFailed = 5,
    NullArgument = 6,
    InvalidUtf8 = 7,
    Panic = 8,
}

/// A parsed and validated scenario.
pub struct ParchernScenario {
    file: ScenarioFile,
    model: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> ParchernStatus {
    match err.exit_code() {
        2 => ParchernStatus::ParseError,
        3 => ParchernStatus::InvariantViolated,
        4 => ParchernStatus::UnsupportedRank,
        _ => ParchernStatus::CheckFailed,
    }
}

fn fail(status: ParchernStatus, msg: impl Into<String>) -> ParchernStatus {
    set_last_error(msg);
    status
}

fn guard(f: impl FnOnce() -> ParchernStatus) -> ParchernStatus {
    clear_last_error();
    catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| fail(ParchernStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, ParchernStatus> {
    if s.is_null() {
        return Err(fail(ParchernStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(ParchernStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

unsafe fn write_report(out: *mut *mut c_char, outcome: Outcome) -> ParchernStatus {
    let text = cli::render(&outcome.report, Format::Machine);
    *out = CString::new(text)
        .expect("JSON has no nul bytes")
        .into_raw();
    match outcome.message {
        Some(m) if outcome.exit != 0 => {
            let status = match outcome.exit {
                3 => ParchernStatus::InvariantViolated,
                _ => ParchernStatus::CheckFailed,
            };
            fail(status, m)
        }
        _ => ParchernStatus::Ok,
    }
}

unsafe fn run_report(
    scenario: *const ParchernScenario,
    out: *mut *mut c_char,
    f: impl FnOnce(&ParchernScenario) -> parchern::Result<Outcome>,
) -> ParchernStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            return fail(
                ParchernStatus::NullArgument,
                "null handle or output pointer",
            );
        }
        *out = ptr::null_mut();
        match f(&*scenario) {
            Ok(o) => write_report(out, o),
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Parses and validates a scenario given as JSON text.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parchern_scenario_load(
    json: *const c_char,
    out: *mut *mut ParchernScenario,
) -> ParchernStatus {
    guard(|| {
        if out.is_null() {
            return fail(ParchernStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli::load(text) {
            Ok((file, model)) => {
                *out = Box::into_raw(Box::new(ParchernScenario { file, model }));
                ParchernStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `scenario` must come from `parchern_scenario_load` and not be used
/// afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn parchern_scenario_free(scenario: *mut ParchernScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Rank of the bundle, or 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn parchern_scenario_rank(scenario: *const ParchernScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.model.rank())
}

/// Global invariants report.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parchern_delta(
    scenario: *const ParchernScenario,
    out: *mut *mut c_char,
) -> ParchernStatus {
    run_report(scenario, out, |s| cli::cmd_delta(&s.file, &s.model))
}

/// Decomposition report. A failing check returns `CheckFailed` together with
/// the report.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parchern_decompose(
    scenario: *const ParchernScenario,
    out: *mut *mut c_char,
) -> ParchernStatus {
    run_report(scenario, out, |s| cli::cmd_decompose(&s.file, &s.model))
}

/// Minimization report. `point` may be null for every multiple point; a
/// negative `cap` selects the default.
///
/// # Safety
/// `scenario` must be a live handle, `point` null or a nul-terminated string,
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parchern_minimize(
    scenario: *const ParchernScenario,
    point: *const c_char,
    cap: i64,
    prune: bool,
    out: *mut *mut c_char,
) -> ParchernStatus {
    let point = if point.is_null() {
        None
    } else {
        match read_str(point) {
            Ok(p) => Some(p),
            Err(s) => return s,
        }
    };
    let config = SearchConfig {
        cap: (cap >= 0).then_some(cap),
        prune,
    };
    run_report(scenario, out, |s| {
        cli::cmd_minimize(&s.file, &s.model, point, &config)
    })
}

/// Invariant-suite report for the given seed.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parchern_check(
    scenario: *const ParchernScenario,
    seed: u64,
    out: *mut *mut c_char,
) -> ParchernStatus {
    run_report(scenario, out, |s| cli::cmd_check(&s.file, &s.model, seed))
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn parchern_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null.
#[no_mangle]
pub extern "C" fn parchern_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}
