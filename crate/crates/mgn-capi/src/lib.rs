//! C ABI surface for the mgn library.
//!
//! Every entry point is panic-safe and returns an [`MgnStatus`]; out
//! parameters receive NUL-terminated strings that the caller releases
//! with [`mgn_string_free`]. Rationals are rendered as `"p/q"`. The
//! engine handle memoizes across calls; after an `Internal` status its
//! contents are unspecified and it should be freed.

use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use libc::c_char;
use mgn::cli;
use mgn::hurwitz::HurwitzEngine;
use mgn::partition::Partition;
use mgn::rat::Rat;
use mgn::tft::{closed_partition_function, FrobeniusData};
use mgn::witten::CorrelatorEngine;
use mgn::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgnStatus {
    Ok = 0,
    InvalidInput = 1,
    CheckFailed = 2,
    ResourceLimit = 3,
    NullPointer = 4,
    Internal = 5,
}

fn status_of_error(e: &Error) -> MgnStatus {
    match e {
        Error::InvalidInput(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::DegenerateGrid(_)
        | Error::CacheIntegrity { .. } => MgnStatus::InvalidInput,
        Error::ResourceLimit(_) => MgnStatus::ResourceLimit,
        Error::ExactnessViolation(_)
        | Error::PolynomialityViolation(_)
        | Error::StructureViolation(_)
        | Error::Integrity(_)
        | Error::CheckFailed(_) => MgnStatus::CheckFailed,
    }
}

/// Opaque computation engine with memoized recursion state.
pub struct MgnEngine {
    witten: CorrelatorEngine,
    hurwitz: HurwitzEngine,
}

/// Allocates an engine. Never null; release with [`mgn_engine_free`].
#[no_mangle]
pub extern "C" fn mgn_engine_new() -> *mut MgnEngine {
    Box::into_raw(Box::new(MgnEngine {
        witten: CorrelatorEngine::new(),
        hurwitz: HurwitzEngine::new(),
    }))
}

/// Releases an engine. A null handle is a no-op.
///
/// # Safety
/// `engine` must be null or a pointer obtained from [`mgn_engine_new`]
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn mgn_engine_free(engine: *mut MgnEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Frees a string returned through any `out` parameter. Null is a
/// no-op.
///
/// # Safety
/// `s` must be null or a string produced by this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn mgn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn write_out(out: *mut *mut c_char, s: String) -> MgnStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            MgnStatus::Ok
        }
        Err(_) => MgnStatus::Internal,
    }
}

unsafe fn slice_arg<'a>(ptr: *const u32, len: usize) -> Option<&'a [u32]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

fn guarded<F>(f: F) -> MgnStatus
where
    F: FnOnce() -> MgnStatus,
{
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(MgnStatus::Internal)
}

/// Intersection number `<tau_{d_1} ... tau_{d_n}>_g` as a `"p/q"`
/// string.
///
/// # Safety
/// `engine` must be a live engine handle, `d` must point to `d_len`
/// integers (or be null with `d_len == 0`), and `out` must be a valid
/// destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mgn_correlator(
    engine: *mut MgnEngine,
    g: u32,
    d: *const u32,
    d_len: usize,
    out: *mut *mut c_char,
) -> MgnStatus {
    if engine.is_null() || out.is_null() {
        return MgnStatus::NullPointer;
    }
    let Some(d) = slice_arg(d, d_len) else {
        return MgnStatus::NullPointer;
    };
    guarded(|| match (*engine).witten.correlator(g, d) {
        Ok(v) => write_out(out, v.to_string()),
        Err(e) => status_of_error(&e),
    })
}

/// Single Hurwitz number `H^g_alpha` as a `"p/q"` string.
///
/// # Safety
/// Same contract as [`mgn_correlator`] with `alpha` in place of `d`.
#[no_mangle]
pub unsafe extern "C" fn mgn_single_hurwitz(
    engine: *mut MgnEngine,
    g: u32,
    alpha: *const u32,
    alpha_len: usize,
    out: *mut *mut c_char,
) -> MgnStatus {
    if engine.is_null() || out.is_null() {
        return MgnStatus::NullPointer;
    }
    let Some(alpha) = slice_arg(alpha, alpha_len) else {
        return MgnStatus::NullPointer;
    };
    guarded(|| {
        let run = || -> Result<Rat, Error> {
            let alpha = Partition::new(alpha.to_vec())?;
            (*engine).hurwitz.single_hurwitz(g, &alpha)
        };
        match run() {
            Ok(v) => write_out(out, v.to_string()),
            Err(e) => status_of_error(&e),
        }
    })
}

/// One-part double Hurwitz number `H^g_((d), beta)` as a `"p/q"`
/// string.
///
/// # Safety
/// Same contract as [`mgn_correlator`] with `beta` in place of `d`.
#[no_mangle]
pub unsafe extern "C" fn mgn_double_hurwitz(
    engine: *mut MgnEngine,
    g: u32,
    d: u32,
    beta: *const u32,
    beta_len: usize,
    out: *mut *mut c_char,
) -> MgnStatus {
    if engine.is_null() || out.is_null() {
        return MgnStatus::NullPointer;
    }
    let Some(beta) = slice_arg(beta, beta_len) else {
        return MgnStatus::NullPointer;
    };
    guarded(|| {
        let run = || -> Result<Rat, Error> {
            let beta = Partition::new(beta.to_vec())?;
            (*engine).hurwitz.double_hurwitz_one_part(g, d, &beta)
        };
        match run() {
            Ok(v) => write_out(out, v.to_string()),
            Err(e) => status_of_error(&e),
        }
    })
}

/// Closed genus-`g` partition function for the semisimple structure
/// whose pairing values are given as a comma-separated list of
/// rationals, e.g. `"1,4"` or `"1/2,-3"`.
///
/// # Safety
/// `deltas` must be a NUL-terminated string and `out` a valid
/// destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mgn_tft_closed(
    g: u32,
    deltas: *const c_char,
    out: *mut *mut c_char,
) -> MgnStatus {
    if deltas.is_null() || out.is_null() {
        return MgnStatus::NullPointer;
    }
    let Ok(text) = CStr::from_ptr(deltas).to_str() else {
        return MgnStatus::InvalidInput;
    };
    guarded(|| {
        let run = || -> Result<Rat, Error> {
            let deltas = text
                .split(',')
                .map(|t| Rat::from_str(t.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            closed_partition_function(g, &FrobeniusData::new(deltas)?)
        };
        match run() {
            Ok(v) => write_out(out, v.to_string()),
            Err(e) => status_of_error(&e),
        }
    })
}

/// Runs one command of the command-line surface. `argv_json` is a JSON
/// array of argument strings, e.g. `["correlator","--g","1","--d","1"]`.
/// `out` receives an envelope
/// `{"status":"...","exit_code":N,"payload":...}` whose payload is the
/// command's canonical JSON document (or null when the command printed
/// nothing). The returned status mirrors the envelope.
///
/// # Safety
/// `argv_json` must be a NUL-terminated string and `out` a valid
/// destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mgn_execute_json(
    argv_json: *const c_char,
    out: *mut *mut c_char,
) -> MgnStatus {
    if argv_json.is_null() || out.is_null() {
        return MgnStatus::NullPointer;
    }
    let Ok(text) = CStr::from_ptr(argv_json).to_str() else {
        return MgnStatus::InvalidInput;
    };
    guarded(|| {
        let argv: Vec<String> = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(_) => return MgnStatus::InvalidInput,
        };
        let result = cli::execute_command(&argv);
        let payload = if result.payload.is_empty() {
            "null".to_string()
        } else {
            result.payload
        };
        let envelope = format!(
            "{{\"status\":\"{}\",\"exit_code\":{},\"payload\":{payload}}}",
            result.status.as_str(),
            result.status.exit_code()
        );
        let code = match result.status {
            cli::Status::Ok => MgnStatus::Ok,
            cli::Status::CheckFailed => MgnStatus::CheckFailed,
            cli::Status::InvalidInput => MgnStatus::InvalidInput,
            cli::Status::ResourceLimit => MgnStatus::ResourceLimit,
        };
        match write_out(out, envelope) {
            MgnStatus::Ok => code,
            other => other,
        }
    })
}
