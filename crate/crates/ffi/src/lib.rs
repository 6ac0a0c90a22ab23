//! C interface. Handles are opaque and owned by the caller until passed to
//! the matching `_free` function. Every fallible call returns an
//! [`NdStatus`]; the message of the last failure on the calling thread is
//! available from [`nd_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nodice::checker::{infer, InferOptions, Method, Query};
use nodice::frontend::{compile_source, parse_value_literal};
use nodice::lang::CoreProgram;
use nodice::mdp::DEFAULT_MAX_FANOUT;
use nodice::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NdStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Syntax, type or desugaring error in the program text.
    Program = 3,
    /// Query value malformed or of the wrong type.
    Value = 4,
    Param = 5,
    Analysis = 6,
    Io = 7,
    Panic = 8,
    OutOfRange = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NdMethod {
    Bisection = 0,
    Restart = 1,
    Both = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct NdOptions {
    pub method: NdMethod,
    pub tol: f64,
    pub compress: bool,
    pub max_fanout: usize,
}

/// A checked program.
pub struct NdProgram {
    program: CoreProgram,
}

/// Per-value results of one query.
pub struct NdResult {
    values: Vec<(CString, f64, u64)>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> NdStatus {
    match e {
        Error::Syntax { .. } | Error::Type { .. } | Error::Desugar { .. } => NdStatus::Program,
        Error::ValueType { .. } | Error::TooManyValues { .. } => NdStatus::Value,
        Error::Param(_) => NdStatus::Param,
        Error::Io(_) => NdStatus::Io,
        _ => NdStatus::Analysis,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (NdStatus, String)>) -> NdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NdStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside nodice");
            NdStatus::Panic
        }
    }
}

fn fail(e: Error) -> (NdStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, (NdStatus, String)> {
    if s.is_null() {
        return Err((NdStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (NdStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn null_out(what: &str) -> (NdStatus, String) {
    (NdStatus::NullArgument, format!("{what} is null"))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn nd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn nd_default_options() -> NdOptions {
    NdOptions { method: NdMethod::Bisection, tol: 1e-6, compress: true, max_fanout: DEFAULT_MAX_FANOUT }
}

/// Parses and checks `source`. On success `*out` holds a new program.
///
/// # Safety
/// `source` must be null or a NUL-terminated string; `out` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn nd_program_parse(source: *const c_char, out: *mut *mut NdProgram) -> NdStatus {
    guard(|| {
        let src = text(source, "source")?;
        if out.is_null() {
            return Err(null_out("out"));
        }
        let program = compile_source(src).map_err(fail)?;
        *out = Box::into_raw(Box::new(NdProgram { program }));
        Ok(())
    })
}

/// Reads and checks the program at `path`.
///
/// # Safety
/// As [`nd_program_parse`].
#[no_mangle]
pub unsafe extern "C" fn nd_program_load(path: *const c_char, out: *mut *mut NdProgram) -> NdStatus {
    guard(|| {
        let path = text(path, "path")?;
        if out.is_null() {
            return Err(null_out("out"));
        }
        let src = std::fs::read_to_string(path).map_err(|e| fail(Error::Io(e)))?;
        let program = compile_source(&src).map_err(fail)?;
        *out = Box::into_raw(Box::new(NdProgram { program }));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nd_program_free(p: *mut NdProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Maximum conditional probability of `value`, or of every output value
/// when `value` is null. `options` may be null for the defaults.
///
/// # Safety
/// `p` must be a live program handle; `value` null or NUL-terminated;
/// `options` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nd_infer(
    p: *const NdProgram,
    value: *const c_char,
    options: *const NdOptions,
    out: *mut *mut NdResult,
) -> NdStatus {
    guard(|| {
        if p.is_null() {
            return Err(null_out("program"));
        }
        if out.is_null() {
            return Err(null_out("out"));
        }
        let program = &(*p).program;
        let o = if options.is_null() { nd_default_options() } else { *options };
        if !(o.tol > 0.0 && o.tol.is_finite()) || o.max_fanout < 2 {
            return Err((NdStatus::Param, format!("bad options: tol {} max_fanout {}", o.tol, o.max_fanout)));
        }
        let query = if value.is_null() {
            Query::All
        } else {
            Query::Value(parse_value_literal(text(value, "value")?, &program.output).map_err(fail)?)
        };
        let method = match o.method {
            NdMethod::Bisection => Method::Bisection,
            NdMethod::Restart => Method::Restart,
            NdMethod::Both => Method::Both,
        };
        let opts =
            InferOptions { method, tol: o.tol, compress: o.compress, max_fanout: o.max_fanout, ..Default::default() };
        let r = infer(program, &query, &opts).map_err(fail)?;
        let values = r
            .values
            .into_iter()
            .map(|v| (CString::new(v.value).unwrap_or_default(), v.probability, v.iterations))
            .collect();
        *out = Box::into_raw(Box::new(NdResult { values }));
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn nd_result_len(r: *const NdResult) -> usize {
    if r.is_null() {
        0
    } else {
        (&*r).values.len()
    }
}

/// Rendered value of entry `i`, owned by the result. Null when out of range.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn nd_result_value(r: *const NdResult, i: usize) -> *const c_char {
    if r.is_null() {
        return ptr::null();
    }
    (&*r).values.get(i).map_or(ptr::null(), |v| v.0.as_ptr())
}

/// # Safety
/// `r` must be a live result handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nd_result_probability(r: *const NdResult, i: usize, out: *mut f64) -> NdStatus {
    guard(|| {
        if r.is_null() || out.is_null() {
            return Err(null_out("result or out"));
        }
        let v = (&*r).values.get(i).ok_or_else(|| (NdStatus::OutOfRange, format!("no entry {i}")))?;
        *out = v.1;
        Ok(())
    })
}

/// Iterations used for entry `i`, or 0 when out of range.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn nd_result_iterations(r: *const NdResult, i: usize) -> u64 {
    if r.is_null() {
        return 0;
    }
    (&*r).values.get(i).map_or(0, |v| v.2)
}

/// # Safety
/// `r` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nd_result_free(r: *mut NdResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
