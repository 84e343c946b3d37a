//! C interface to `oplab`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Every entry point returns an [`OplabStatus`];
//! on failure a description is available from [`oplab_last_error`] on the
//! same thread until the next call. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use oplab::funcspace::{parse_fn, AnalyticFn, C64};
use oplab::report::Command;
use oplab::runner::{run, RunOptions, RunOutput};
use oplab::scalar::Precision;
use oplab::scenario::{parse_scenario, Overrides, Scenario};
use oplab::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OplabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    /// The point lies outside the disk or hits a pole.
    Domain = 5,
    /// The operator is unbounded, so tail quantities are undefined.
    Unbounded = 6,
    Numeric = 7,
    Io = 8,
    Panic = 9,
}

/// A parsed analytic function.
pub struct OplabFunction {
    inner: AnalyticFn,
}

/// A parsed scenario.
pub struct OplabScenario {
    inner: Scenario,
}

/// The outcome of one subcommand.
pub struct OplabReport {
    json: CString,
    csv: Option<CString>,
    exit_code: i32,
}

/// Optional overrides for [`oplab_run`]; negative values mean "not set".
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OplabOptions {
    /// 0 = double, 1 = extended, negative = scenario default.
    pub precision: i32,
    pub grid_depth: i32,
    pub tail_depth: i32,
    pub paper_3term: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OplabStatus {
    match e {
        Error::Parse { .. } | Error::Scenario { .. } | Error::Json(_) => OplabStatus::Parse,
        Error::InvalidFunction(_) | Error::Config(_) | Error::NotSelfMap { .. } => OplabStatus::InvalidArgument,
        Error::OutsideDisk { .. } | Error::Pole { .. } => OplabStatus::Domain,
        Error::Unbounded(_) => OplabStatus::Unbounded,
        Error::Io(_) => OplabStatus::Io,
        Error::Jet(_) | Error::NonFinite { .. } | Error::Singular { .. } => OplabStatus::Numeric,
    }
}

#[derive(Debug)]
struct Fail(OplabStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> OplabStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => OplabStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            OplabStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(OplabStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(OplabStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn to_cstring(s: String) -> Result<CString, Fail> {
    CString::new(s).map_err(|e| Fail(OplabStatus::Numeric, e.to_string()))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn oplab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn oplab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn oplab_status_name(status: OplabStatus) -> *const c_char {
    let s: &'static str = match status {
        OplabStatus::Ok => "ok\0",
        OplabStatus::NullPointer => "null pointer\0",
        OplabStatus::InvalidUtf8 => "invalid utf-8\0",
        OplabStatus::Parse => "parse error\0",
        OplabStatus::InvalidArgument => "invalid argument\0",
        OplabStatus::Domain => "outside the domain\0",
        OplabStatus::Unbounded => "unbounded operator\0",
        OplabStatus::Numeric => "numerical failure\0",
        OplabStatus::Io => "i/o error\0",
        OplabStatus::Panic => "internal panic\0",
    };
    s.as_ptr().cast()
}

/// Parse a function expression such as `"sigma(0.5) * z^2"`.
///
/// # Safety
/// `src` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oplab_function_parse(src: *const c_char, out: *mut *mut OplabFunction) -> OplabStatus {
    guard(|| {
        let f = parse_fn(text(src, "src")?)?;
        emit(out, OplabFunction { inner: f })
    })
}

/// Value at `re + i im`.
///
/// # Safety
/// `f` must come from [`oplab_function_parse`]; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn oplab_function_eval(
    f: *const OplabFunction,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> OplabStatus {
    guard(|| {
        let f = borrow(f, "f")?;
        if out_re.is_null() || out_im.is_null() {
            return Err(null("out"));
        }
        let w = f.inner.eval::<f64>(C64::new(re, im))?;
        *out_re = w.re;
        *out_im = w.im;
        Ok(())
    })
}

/// Derivatives `f^(0..=order)` at `re + i im`, written as interleaved
/// real and imaginary parts into `out`, which holds `2 * (order + 1)` values.
///
/// # Safety
/// `f` must come from [`oplab_function_parse`]; `out` must hold
/// `2 * (order + 1)` doubles.
#[no_mangle]
pub unsafe extern "C" fn oplab_function_derivatives(
    f: *const OplabFunction,
    re: f64,
    im: f64,
    order: u32,
    out: *mut f64,
) -> OplabStatus {
    guard(|| {
        let f = borrow(f, "f")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = f.inner.derivatives::<f64>(C64::new(re, im), order as usize)?;
        let dst = std::slice::from_raw_parts_mut(out, 2 * d.len());
        for (k, w) in d.iter().enumerate() {
            dst[2 * k] = w.re;
            dst[2 * k + 1] = w.im;
        }
        Ok(())
    })
}

/// Canonical text of the function; release it with [`oplab_string_free`].
///
/// # Safety
/// `f` must come from [`oplab_function_parse`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oplab_function_to_string(f: *const OplabFunction, out: *mut *mut c_char) -> OplabStatus {
    guard(|| {
        let f = borrow(f, "f")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = to_cstring(f.inner.to_string())?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `f` must come from [`oplab_function_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn oplab_function_free(f: *mut OplabFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Parse a scenario JSON document.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oplab_scenario_parse(json: *const c_char, out: *mut *mut OplabScenario) -> OplabStatus {
    guard(|| {
        let s = parse_scenario(text(json, "json")?)?;
        emit(out, OplabScenario { inner: s })
    })
}

/// # Safety
/// `s` must come from [`oplab_scenario_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn oplab_scenario_free(s: *mut OplabScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Default options: nothing overridden.
#[no_mangle]
pub extern "C" fn oplab_options_default() -> OplabOptions {
    OplabOptions {
        precision: -1,
        grid_depth: -1,
        tail_depth: -1,
        paper_3term: false,
    }
}

fn depth(v: i32) -> Option<u32> {
    u32::try_from(v).ok()
}

fn run_options(o: Option<&OplabOptions>) -> Result<RunOptions, Fail> {
    let o = o.copied().unwrap_or_else(|| oplab_options_default());
    let precision = match o.precision {
        p if p < 0 => None,
        0 => Some(Precision::Double),
        1 => Some(Precision::Extended),
        p => {
            return Err(Fail(
                OplabStatus::InvalidArgument,
                format!("unknown precision code {p}"),
            ))
        }
    };
    Ok(RunOptions {
        overrides: Overrides {
            precision,
            grid_depth: depth(o.grid_depth),
            tail_depth: depth(o.tail_depth),
        },
        paper_3term: o.paper_3term,
    })
}

/// Run a subcommand (`"check-bounded"`, `"essential-norm"`, ...) on a
/// scenario. `options` may be NULL.
///
/// # Safety
/// `scenario` must come from [`oplab_scenario_parse`], `command` must be
/// NUL-terminated, `options` must be NULL or valid, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oplab_run(
    scenario: *const OplabScenario,
    command: *const c_char,
    options: *const OplabOptions,
    out: *mut *mut OplabReport,
) -> OplabStatus {
    guard(|| {
        let s = borrow(scenario, "scenario")?;
        let cmd: Command = text(command, "command")?
            .parse()
            .map_err(|e: String| Fail(OplabStatus::InvalidArgument, e))?;
        let opts = run_options(options.as_ref())?;
        let RunOutput { report, csv } = run(cmd, &s.inner, &opts)?;
        let exit_code = report.status.exit_code();
        let value = OplabReport {
            json: to_cstring(report.to_json())?,
            csv: csv.map(to_cstring).transpose()?,
            exit_code,
        };
        emit(out, value)
    })
}

/// The report as pretty-printed JSON, owned by the report.
///
/// # Safety
/// `r` must come from [`oplab_run`].
#[no_mangle]
pub unsafe extern "C" fn oplab_report_json(r: *const OplabReport) -> *const c_char {
    r.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// The radial profile CSV, or NULL unless the command was `profile`.
///
/// # Safety
/// `r` must come from [`oplab_run`].
#[no_mangle]
pub unsafe extern "C" fn oplab_report_csv(r: *const OplabReport) -> *const c_char {
    r.as_ref()
        .and_then(|r| r.csv.as_ref())
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// 0 when every check passed and every verdict is definite, 2 otherwise,
/// -1 for a NULL report.
///
/// # Safety
/// `r` must come from [`oplab_run`].
#[no_mangle]
pub unsafe extern "C" fn oplab_report_exit_code(r: *const OplabReport) -> i32 {
    r.as_ref().map_or(-1, |r| r.exit_code)
}

/// # Safety
/// `r` must come from [`oplab_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn oplab_report_free(r: *mut OplabReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn oplab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
