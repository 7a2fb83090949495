//! C ABI over the `catenary` crate.
//!
//! Every fallible function returns a [`CatStatus`]; on anything other than
//! `CAT_OK` a message is available from [`cat_last_error`] on the same
//! thread. Objects are opaque handles released by their `_free` function.
//! Strings returned to C are released with [`cat_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use catenary::block::{hit_times, Block};
use catenary::catenary::{catenary_bvp, BvpSpec};
use catenary::discrete::{catenary_roots, shift_metric, SymbolicPoint};
use catenary::flow::DiagonalLinear;
use catenary::scenario::{parse_scenario, run_loaded, RunOptions, RunReport, ScenarioError};
use catenary::Error;

/// Result codes. `CAT_OK` is zero; core error kinds map one to one.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatStatus {
    CatOk = 0,
    CatNullPointer = 1,
    CatInvalidArgument = 2,
    CatDomain = 3,
    CatDivergence = 4,
    CatExited = 5,
    CatCapacity = 6,
    CatPartition = 7,
    CatSpec = 8,
    CatBasin = 9,
    CatTruncation = 10,
    CatProjection = 11,
    CatUnresolved = 12,
    CatConfig = 13,
    CatPanic = 14,
}

impl From<&Error> for CatStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => Self::CatDomain,
            Error::Divergence { .. } => Self::CatDivergence,
            Error::Exited { .. } => Self::CatExited,
            Error::Capacity { .. } => Self::CatCapacity,
            Error::Partition { .. } => Self::CatPartition,
            Error::Spec(_) => Self::CatSpec,
            Error::Basin { .. } => Self::CatBasin,
            Error::Truncation(_) => Self::CatTruncation,
            Error::Projection(_) => Self::CatProjection,
            Error::Unresolved(_) => Self::CatUnresolved,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: CatStatus, msg: impl Into<String>) -> CatStatus {
    set_error(msg);
    status
}

fn from_core(e: Error) -> CatStatus {
    let status = CatStatus::from(&e);
    fail(status, e.to_string())
}

// Runs `f`, converting panics into `CAT_PANIC`.
fn guard(f: impl FnOnce() -> CatStatus) -> CatStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(CatStatus::CatPanic, msg)
        }
    }
}

unsafe fn utf8<'a>(s: *const c_char, what: &str) -> Result<&'a str, CatStatus> {
    if s.is_null() {
        return Err(fail(CatStatus::CatNullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| fail(CatStatus::CatInvalidArgument, format!("{what}: {e}")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], CatStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(CatStatus::CatNullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(CatStatus::CatNullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Message for the last failure on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn cat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Writes the roots `λ_s < 1 < λ_u` of `λ² − 3λ + 1`.
///
/// # Safety
/// Both pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cat_catenary_roots(lambda_s: *mut f64, lambda_u: *mut f64) -> CatStatus {
    guard(|| {
        non_null!(lambda_s, lambda_u);
        let (s, u) = catenary_roots();
        *lambda_s = s;
        *lambda_u = u;
        CatStatus::CatOk
    })
}

/// Shift metric `Σ_{x_n ≠ y_n} λ^{−|n|}` between two finite-support binary
/// sequences given by the indices of their ones.
///
/// # Safety
/// `x_ones`/`y_ones` must point to `x_len`/`y_len` integers (or be null
/// with length zero); `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cat_shift_metric(
    x_ones: *const i64,
    x_len: usize,
    y_ones: *const i64,
    y_len: usize,
    lambda: f64,
    out: *mut f64,
) -> CatStatus {
    guard(|| {
        non_null!(out);
        let (x, y) = match (
            slice(x_ones, x_len, "x_ones"),
            slice(y_ones, y_len, "y_ones"),
        ) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let x = SymbolicPoint::from_ones(x.iter().copied());
        let y = SymbolicPoint::from_ones(y.iter().copied());
        match shift_metric(&x, &y, lambda) {
            Ok(d) => {
                *out = d;
                CatStatus::CatOk
            }
            Err(e) => from_core(e),
        }
    })
}

/// Catenary function of the planar saddle `ẋ = x, ẏ = −y` on the block
/// `|x| + |y| ≤ δ`, solving the boundary value problem with constant
/// boundary data.
pub struct CatSaddle {
    flow: DiagonalLinear,
    block: Block<Vec<f64>>,
    spec: BvpSpec<Vec<f64>>,
    t_max: f64,
}

impl CatSaddle {
    fn point(x: f64, y: f64) -> Vec<f64> {
        vec![x, y]
    }
}

/// Creates a saddle handle. `t_max` bounds the exit-time scan.
///
/// # Safety
/// `out` must be valid for writes; on success it owns a handle released
/// with [`cat_saddle_free`].
#[no_mangle]
pub unsafe extern "C" fn cat_saddle_new(
    delta: f64,
    boundary: f64,
    a: f64,
    t_max: f64,
    out: *mut *mut CatSaddle,
) -> CatStatus {
    guard(|| {
        non_null!(out);
        *out = ptr::null_mut();
        if t_max.is_nan() || t_max <= 0.0 {
            return fail(
                CatStatus::CatInvalidArgument,
                format!("t_max must be positive, got {t_max}"),
            );
        }
        let block = Block::new(|p: &Vec<f64>| Ok(p.iter().map(|v| v.abs()).sum()), delta)
            .map(|b| b.with_lambda(|p: &Vec<f64>| catenary::numeric::norm(p)));
        let built = block.and_then(|block| Ok((block, BvpSpec::constant(boundary, a)?)));
        match built {
            Ok((block, spec)) => {
                *out = Box::into_raw(Box::new(CatSaddle {
                    flow: DiagonalLinear::saddle(),
                    block,
                    spec,
                    t_max,
                }));
                CatStatus::CatOk
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `h` must be null or a live handle from [`cat_saddle_new`].
#[no_mangle]
pub unsafe extern "C" fn cat_saddle_free(h: *mut CatSaddle) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Value of the catenary function at `(x, y)`, which must lie in the block.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cat_saddle_eval(
    h: *const CatSaddle,
    x: f64,
    y: f64,
    out: *mut f64,
) -> CatStatus {
    guard(|| {
        non_null!(h, out);
        let s = &*h;
        match catenary_bvp(&s.flow, &s.block, &s.spec, &CatSaddle::point(x, y), s.t_max) {
            Ok(v) => {
                *out = v;
                CatStatus::CatOk
            }
            Err(e) => from_core(e),
        }
    })
}

/// Exit times `T^s ≤ 0 ≤ T^u` of `(x, y)` from the block; an orbit that
/// never leaves on one side reports `∓∞` there.
///
/// # Safety
/// `h` must be a live handle; `t_s` and `t_u` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cat_saddle_hit_times(
    h: *const CatSaddle,
    x: f64,
    y: f64,
    t_s: *mut f64,
    t_u: *mut f64,
) -> CatStatus {
    guard(|| {
        non_null!(h, t_s, t_u);
        let s = &*h;
        match hit_times(&s.flow, &s.block, &CatSaddle::point(x, y), s.t_max) {
            Ok(ht) => {
                *t_s = ht.t_s;
                *t_u = ht.t_u;
                CatStatus::CatOk
            }
            Err(e) => from_core(e),
        }
    })
}

/// Finished scenario run.
pub struct CatReport {
    report: RunReport,
}

/// Parses and runs a scenario given as JSON text, writing its outputs under
/// `out_dir` (the current directory when null). A config error returns
/// `CAT_CONFIG`; a run that completes with failing checks still returns
/// `CAT_OK` and reports `passed == 0`.
///
/// # Safety
/// `json` must be a NUL-terminated string, `out_dir` null or one, and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cat_scenario_run(
    json: *const c_char,
    out_dir: *const c_char,
    out: *mut *mut CatReport,
) -> CatStatus {
    guard(|| {
        non_null!(out);
        *out = ptr::null_mut();
        let text = match utf8(json, "json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let dir = if out_dir.is_null() {
            PathBuf::from(".")
        } else {
            match utf8(out_dir, "out_dir") {
                Ok(d) => PathBuf::from(d),
                Err(s) => return s,
            }
        };
        let opts = RunOptions {
            out_dir: dir,
            ..RunOptions::default()
        };
        match parse_scenario(text, "<json>").and_then(|sc| run_loaded(&sc, &opts)) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(CatReport { report }));
                CatStatus::CatOk
            }
            Err(e @ ScenarioError::Config { .. }) => fail(CatStatus::CatConfig, e.to_string()),
            Err(ScenarioError::Run(e)) => from_core(e),
        }
    })
}

/// # Safety
/// `h` must be null or a live handle from [`cat_scenario_run`].
#[no_mangle]
pub unsafe extern "C" fn cat_report_free(h: *mut CatReport) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// 1 when every check passed, 0 otherwise, −1 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cat_report_passed(h: *const CatReport) -> i32 {
    if h.is_null() {
        return -1;
    }
    i32::from((*h).report.passed())
}

/// Number of checks in the report, 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cat_report_check_count(h: *const CatReport) -> usize {
    if h.is_null() {
        return 0;
    }
    (*h).report.checks.len()
}

/// The report as JSON. The string is owned by the caller.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cat_report_json(h: *const CatReport, out: *mut *mut c_char) -> CatStatus {
    guard(|| {
        non_null!(h, out);
        *out = ptr::null_mut();
        match serde_json::to_string_pretty(&(*h).report) {
            Ok(s) => match CString::new(s) {
                Ok(c) => {
                    *out = c.into_raw();
                    CatStatus::CatOk
                }
                Err(e) => fail(CatStatus::CatInvalidArgument, e.to_string()),
            },
            Err(e) => fail(CatStatus::CatInvalidArgument, e.to_string()),
        }
    })
}
