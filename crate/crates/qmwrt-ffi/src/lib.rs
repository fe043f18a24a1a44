//! C ABI over the qmwrt library.
//!
//! Every function returns a [`QmwrtStatus`] code. Objects cross the boundary
//! as opaque handles that the caller releases with the matching `_free`
//! function. On failure, [`qmwrt_last_error`] describes the most recent error
//! on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qmwrt::error::Error;
use qmwrt::gauss_sums::gauss_brute;
use qmwrt::number_theory::RootContext;
use qmwrt::qmod::{saddle_residual, verify, Manifold, Suite, VerificationReport};
use qmwrt::seifert::QhsFamily;
use qmwrt::wrt::{w_closed, wrt_lens};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QmwrtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Hypothesis = 3,
    Unsupported = 4,
    CostGuard = 5,
    Panic = 6,
}

/// A parsed manifold selector.
pub struct QmwrtManifold {
    inner: Manifold,
}

/// The outcome of a verification run.
pub struct QmwrtReport {
    inner: VerificationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QmwrtStatus {
    match e {
        Error::InvalidArgument(_) | Error::ZeroDivision => QmwrtStatus::InvalidArgument,
        Error::Hypothesis(_) => QmwrtStatus::Hypothesis,
        Error::Unsupported(_) => QmwrtStatus::Unsupported,
        Error::CostGuard { .. } => QmwrtStatus::CostGuard,
    }
}

fn guard(f: impl FnOnce() -> Result<(), QmwrtStatus>) -> QmwrtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QmwrtStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            QmwrtStatus::Panic
        }
    }
}

fn lift<T>(r: qmwrt::error::Result<T>) -> Result<T, QmwrtStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), QmwrtStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(QmwrtStatus::NullPointer)
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, QmwrtStatus> {
    non_null(p, what)?;
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        QmwrtStatus::InvalidArgument
    })
}

unsafe fn write_complex(z: (f64, f64), re: *mut f64, im: *mut f64) -> Result<(), QmwrtStatus> {
    non_null(re, "re")?;
    non_null(im, "im")?;
    (*re, *im) = z;
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qmwrt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a selector such as `brieskorn:2,3,7` or `lens:5`.
///
/// # Safety
/// `selector` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qmwrt_manifold_parse(selector: *const c_char, out: *mut *mut QmwrtManifold) -> QmwrtStatus {
    guard(|| {
        non_null(out, "out")?;
        let m = lift(read_str(selector, "selector")?.parse::<Manifold>())?;
        *out = Box::into_raw(Box::new(QmwrtManifold { inner: m }));
        Ok(())
    })
}

/// # Safety
/// `m` must come from [`qmwrt_manifold_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn qmwrt_manifold_free(m: *mut QmwrtManifold) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

fn ctx(r: i64, s: i64) -> Result<RootContext, QmwrtStatus> {
    lift(RootContext::normalized(r, s))
}

/// Normalized WRT invariant W at the root `e^{2πis/r}`.
///
/// # Safety
/// `m` must be a live handle; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn qmwrt_w(m: *const QmwrtManifold, r: i64, s: i64, re: *mut f64, im: *mut f64) -> QmwrtStatus {
    guard(|| {
        non_null(m, "manifold")?;
        let c = ctx(r, s)?;
        let w = match (*m).inner {
            Manifold::Qhs(QhsFamily::Lens(p)) => lift(wrt_lens(p, &c))?.0.numeric,
            ref other => lift(w_closed(&lift(other.data())?, &c))?.eval_complex(),
        };
        write_complex((w.re, w.im), re, im)
    })
}

/// Difference between W and its saddle expansion truncated at `order`.
///
/// # Safety
/// `m` must be a live handle; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn qmwrt_saddle_residual(
    m: *const QmwrtManifold,
    r: i64,
    s: i64,
    order: usize,
    re: *mut f64,
    im: *mut f64,
) -> QmwrtStatus {
    guard(|| {
        non_null(m, "manifold")?;
        let z = lift(saddle_residual(&(*m).inner, &ctx(r, s)?, order))?;
        write_complex((z.re, z.im), re, im)
    })
}

/// Quadratic Gauss sum `Σ_{n mod r} e^{2πi s n²/r}`.
///
/// # Safety
/// `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmwrt_gauss(s: i64, r: i64, re: *mut f64, im: *mut f64) -> QmwrtStatus {
    guard(|| {
        if r <= 0 {
            set_error(format!("r must be positive, got {r}"));
            return Err(QmwrtStatus::InvalidArgument);
        }
        let z = gauss_brute(s, r).eval_complex();
        write_complex((z.re, z.im), re, im)
    })
}

/// Runs a suite (`all`, `identity`, `integrality`, `geometric`, `oracle`,
/// `decomposition`, `phase-sums`) at one root.
///
/// # Safety
/// `m` must be a live handle, `suite` nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qmwrt_verify(
    m: *const QmwrtManifold,
    r: i64,
    s: i64,
    suite: *const c_char,
    out: *mut *mut QmwrtReport,
) -> QmwrtStatus {
    guard(|| {
        non_null(m, "manifold")?;
        non_null(out, "out")?;
        let suite = lift(read_str(suite, "suite")?.parse::<Suite>())?;
        let rep = lift(verify(&(*m).inner, &[ctx(r, s)?], suite))?;
        *out = Box::into_raw(Box::new(QmwrtReport { inner: rep }));
        Ok(())
    })
}

/// 1 if every check passed, 0 otherwise, -1 for a null handle.
///
/// # Safety
/// `rep` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qmwrt_report_passed(rep: *const QmwrtReport) -> i32 {
    match rep.as_ref() {
        Some(r) => r.inner.passed() as i32,
        None => -1,
    }
}

/// Number of checks in the report.
///
/// # Safety
/// `rep` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qmwrt_report_len(rep: *const QmwrtReport) -> usize {
    rep.as_ref().map_or(0, |r| r.inner.checks.len())
}

/// The report as JSON. Release the string with [`qmwrt_string_free`].
///
/// # Safety
/// `rep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qmwrt_report_json(rep: *const QmwrtReport, out: *mut *mut c_char) -> QmwrtStatus {
    guard(|| {
        non_null(rep, "report")?;
        non_null(out, "out")?;
        let s = (*rep).inner.to_json().to_string();
        *out = CString::new(s).expect("json has no nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `rep` must come from [`qmwrt_verify`] or be null.
#[no_mangle]
pub unsafe extern "C" fn qmwrt_report_free(rep: *mut QmwrtReport) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn qmwrt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
