//! C ABI over the `bsroots` analysis pipeline.
//!
//! Conventions, mirrored in the generated `include/bsroots.h`:
//!
//! * Every input string is a NUL-terminated UTF-8 C string.
//! * Every function returns a [`BsrStatus`]; `BSR_STATUS_OK` is zero.  On
//!   any failure a human-readable message is stored per thread and can be
//!   read with [`bsr_last_error_message`] until the next call from the
//!   same thread.
//! * Analysis results live behind the opaque handle [`BsrReport`], created
//!   by [`bsr_analyze`] and released with [`bsr_report_free`].  The JSON
//!   borrowed from [`bsr_report_json`] stays valid until the handle is
//!   freed.
//! * One-shot functions hand back strings allocated on the Rust side;
//!   release them with [`bsr_string_free`] and nothing else.
//! * Null pointers are rejected with `BSR_STATUS_NULL_POINTER`; panics are
//!   caught at the boundary and reported as `BSR_STATUS_INVARIANT` — they
//!   never unwind into the caller.
//!
//! All JSON is canonical (sorted keys, two-space indent, trailing
//! newline), byte-identical to the `bsroots` command line's `--format
//! json` output for the same inputs.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bsroots::bsengine::{analyze, AnalyzeOptions, RootReport};
use bsroots::cli::{canonical_json, infer_vars, CliFailure};
use bsroots::koszul::{compute_tables, ArithMode};
use bsroots::localspec::{aggregate, parse_sing_file, spectrum};
use bsroots::polyring::parse_poly;
use bsroots::{parse_rat, rat_string, Rat};

// ======================================================================
// Status codes and error channel
// ======================================================================

/// Result category of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsrStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An input string was not valid UTF-8.
    Utf8 = 2,
    /// The input cannot be used (syntax, weights, option ranges).
    Input = 3,
    /// The input parses but contradicts the mathematical hypotheses
    /// (singularity data inconsistent with the computed tables).
    Data = 4,
    /// An internal invariant failed, or a panic was caught — a bug in the
    /// library, never a user error.
    Invariant = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).ok();
    });
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Message for the most recent failure on this thread, or null after a
/// success.  The pointer stays valid until the next `bsr_` call from the
/// same thread.
#[no_mangle]
pub extern "C" fn bsr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |msg| msg.as_ptr())
    })
}

/// Library version as a static string; never freed.
#[no_mangle]
pub extern "C" fn bsr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

// ======================================================================
// Guard rails
// ======================================================================

type Failure = (BsrStatus, String);

fn from_cli(f: CliFailure) -> Failure {
    let status = match &f {
        CliFailure::Input(_) => BsrStatus::Input,
        CliFailure::Data(_) => BsrStatus::Data,
        CliFailure::Invariant(_) => BsrStatus::Invariant,
    };
    (status, f.message().to_string())
}

fn panic_text(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        format!("panic: {s}")
    } else if let Some(s) = payload.downcast_ref::<String>() {
        format!("panic: {s}")
    } else {
        "panic: unknown payload".to_string()
    }
}

/// Run a fallible body with panic containment and error-channel upkeep.
fn guarded<F: FnOnce() -> Result<(), Failure>>(body: F) -> BsrStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => BsrStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            set_last_error(&panic_text(payload));
            BsrStatus::Invariant
        }
    }
}

/// Borrow a C string as UTF-8.
///
/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn cstr<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err((BsrStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (BsrStatus::Utf8, format!("argument is not UTF-8: {e}")))
}

unsafe fn cstr_opt<'a>(p: *const c_char) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        cstr(p).map(Some)
    }
}

fn to_c_string(s: String) -> Result<CString, Failure> {
    CString::new(s).map_err(|_| {
        (
            BsrStatus::Invariant,
            "output contained an interior NUL byte".into(),
        )
    })
}

// ======================================================================
// Shared pipeline pieces
// ======================================================================

fn split_vars(poly: &str, vars_csv: Option<&str>) -> Result<Vec<String>, Failure> {
    let vars: Vec<String> = match vars_csv {
        Some(csv) => csv.split(',').map(|s| s.trim().to_string()).collect(),
        None => infer_vars(poly),
    };
    if vars.is_empty() || vars.iter().any(|v| v.is_empty()) {
        return Err((
            BsrStatus::Input,
            "no variables: pass a variable list or use named variables".into(),
        ));
    }
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err((BsrStatus::Input, format!("duplicate variable {v:?}")));
        }
    }
    Ok(vars)
}

fn split_weights(csv: &str) -> Result<Vec<Rat>, Failure> {
    csv.split(',')
        .map(|s| {
            parse_rat(s.trim())
                .ok_or_else(|| (BsrStatus::Input, format!("cannot parse weight {s:?}")))
        })
        .collect()
}

fn run_analysis(
    poly_text: &str,
    vars_csv: Option<&str>,
    sing_json: Option<&str>,
    modular: bool,
    n3_kmax_variant: bool,
) -> Result<RootReport, Failure> {
    let vars = split_vars(poly_text, vars_csv)?;
    let f = parse_poly(poly_text, &vars).map_err(|e| from_cli(e.into()))?;
    let szd = match sing_json {
        Some(text) => {
            let records =
                parse_sing_file(text, f.n_vars() - 1).map_err(|e| from_cli(e.into()))?;
            Some(aggregate(records).map_err(|e| from_cli(e.into()))?)
        }
        None => None,
    };
    let mode = if modular {
        ArithMode::Modular
    } else {
        ArithMode::Exact
    };
    let tables = compute_tables(&f, mode, false).map_err(|e| from_cli(e.into()))?;
    analyze(
        &tables,
        szd.as_ref(),
        &AnalyzeOptions { n3_kmax_variant },
    )
    .map_err(|e| from_cli(e.into()))
}

// ======================================================================
// Opaque report handle
// ======================================================================

/// An analysis result: the classified candidates plus the cached canonical
/// JSON rendering.  Opaque to C; create with `bsr_analyze`, read with the
/// `bsr_report_*` accessors, release with `bsr_report_free`.
pub struct BsrReport {
    report: RootReport,
    json: CString,
}

/// Classify every candidate root of `poly`.
///
/// `vars_csv` (nullable) lists the variables, comma-separated; when null
/// they are inferred from the polynomial text in order of first
/// appearance.  `sing_json` (nullable) is the singularity list in the same
/// JSON shape the command line reads from a file; null declares the
/// hypersurface smooth.  Nonzero `modular` switches the rank computations
/// to modular arithmetic with exact confirmation; nonzero
/// `n3_kmax_variant` relaxes the closed-form support rule for plane
/// curves.  On success `*out` owns the new handle.
///
/// # Safety
/// All pointer arguments must be null or valid; `out` must be non-null and
/// writable.
#[no_mangle]
pub unsafe extern "C" fn bsr_analyze(
    poly: *const c_char,
    vars_csv: *const c_char,
    sing_json: *const c_char,
    modular: c_int,
    n3_kmax_variant: c_int,
    out: *mut *mut BsrReport,
) -> BsrStatus {
    guarded(|| {
        if out.is_null() {
            return Err((BsrStatus::NullPointer, "null output pointer".into()));
        }
        let poly_text = cstr(poly)?;
        let vars = cstr_opt(vars_csv)?;
        let sing = cstr_opt(sing_json)?;
        let report = run_analysis(poly_text, vars, sing, modular != 0, n3_kmax_variant != 0)?;
        let json = to_c_string(canonical_json(&report))?;
        *out = Box::into_raw(Box::new(BsrReport { report, json }));
        Ok(())
    })
}

/// Canonical JSON of the report, borrowed from the handle: valid until
/// `bsr_report_free`, do **not** pass to `bsr_string_free`.  Null when the
/// handle is null.
///
/// # Safety
/// `rep` must be null or a live handle from `bsr_analyze`.
#[no_mangle]
pub unsafe extern "C" fn bsr_report_json(rep: *const BsrReport) -> *const c_char {
    if rep.is_null() {
        return ptr::null();
    }
    (*rep).json.as_ptr()
}

/// 1 when no candidate was left undetermined, 0 when some were, −1 on a
/// null handle.
///
/// # Safety
/// `rep` must be null or a live handle from `bsr_analyze`.
#[no_mangle]
pub unsafe extern "C" fn bsr_report_complete(rep: *const BsrReport) -> c_int {
    if rep.is_null() {
        return -1;
    }
    i32::from((*rep).report.r_f_complete)
}

/// Number of undetermined candidates; −1 on a null handle.
///
/// # Safety
/// `rep` must be null or a live handle from `bsr_analyze`.
#[no_mangle]
pub unsafe extern "C" fn bsr_report_undetermined_count(rep: *const BsrReport) -> c_int {
    if rep.is_null() {
        return -1;
    }
    (*rep).report.undetermined.len() as c_int
}

/// Release a handle from `bsr_analyze`.  Null is a no-op; freeing twice is
/// undefined behavior, as with `free`.
///
/// # Safety
/// `rep` must be null or a live handle, and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bsr_report_free(rep: *mut BsrReport) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

// ======================================================================
// One-shot string functions
// ======================================================================

/// One-shot analysis: like `bsr_analyze` followed by `bsr_report_json`,
/// but `*out_json` is an owned string to release with `bsr_string_free`.
///
/// # Safety
/// As for `bsr_analyze`; `out_json` must be non-null and writable.
#[no_mangle]
pub unsafe extern "C" fn bsr_analyze_json(
    poly: *const c_char,
    vars_csv: *const c_char,
    sing_json: *const c_char,
    modular: c_int,
    n3_kmax_variant: c_int,
    out_json: *mut *mut c_char,
) -> BsrStatus {
    guarded(|| {
        if out_json.is_null() {
            return Err((BsrStatus::NullPointer, "null output pointer".into()));
        }
        let poly_text = cstr(poly)?;
        let vars = cstr_opt(vars_csv)?;
        let sing = cstr_opt(sing_json)?;
        let report = run_analysis(poly_text, vars, sing, modular != 0, n3_kmax_variant != 0)?;
        *out_json = to_c_string(canonical_json(&report))?.into_raw();
        Ok(())
    })
}

/// Spectrum of a weighted-homogeneous germ from comma-separated weights,
/// as canonical JSON `{display, m, spectral_numbers}`.  `*out_json` is
/// released with `bsr_string_free`.
///
/// # Safety
/// `weights_csv` must be a valid string; `out_json` non-null and writable.
#[no_mangle]
pub unsafe extern "C" fn bsr_spectrum_json(
    weights_csv: *const c_char,
    out_json: *mut *mut c_char,
) -> BsrStatus {
    guarded(|| {
        if out_json.is_null() {
            return Err((BsrStatus::NullPointer, "null output pointer".into()));
        }
        let weights = split_weights(cstr(weights_csv)?)?;
        let sp = spectrum(&weights).map_err(|e| from_cli(e.into()))?;
        let value = serde_json::json!({
            "display": sp.display_t_powers(),
            "m": sp.m,
            "spectral_numbers": sp.entries.iter().map(rat_string).collect::<Vec<_>>(),
        });
        *out_json = to_c_string(canonical_json(&value))?.into_raw();
        Ok(())
    })
}

/// Graded tables of a polynomial as canonical JSON.  `vars_csv` nullable
/// as in `bsr_analyze`; `*out_json` is released with `bsr_string_free`.
///
/// # Safety
/// As for `bsr_analyze`; `out_json` must be non-null and writable.
#[no_mangle]
pub unsafe extern "C" fn bsr_tables_json(
    poly: *const c_char,
    vars_csv: *const c_char,
    modular: c_int,
    out_json: *mut *mut c_char,
) -> BsrStatus {
    guarded(|| {
        if out_json.is_null() {
            return Err((BsrStatus::NullPointer, "null output pointer".into()));
        }
        let poly_text = cstr(poly)?;
        let vars = split_vars(poly_text, cstr_opt(vars_csv)?)?;
        let f = parse_poly(poly_text, &vars).map_err(|e| from_cli(e.into()))?;
        let mode = if modular != 0 {
            ArithMode::Modular
        } else {
            ArithMode::Exact
        };
        let bundle = compute_tables(&f, mode, false).map_err(|e| from_cli(e.into()))?;
        *out_json = to_c_string(canonical_json(&bundle))?.into_raw();
        Ok(())
    })
}

/// Release a string produced by a `*_json` one-shot function.  Null is a
/// no-op.
///
/// # Safety
/// `s` must be null or an owned string from this library, not used again.
#[no_mangle]
pub unsafe extern "C" fn bsr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ======================================================================
// Tests
// ======================================================================
