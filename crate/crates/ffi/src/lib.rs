//! C ABI over `uniform-lefschetz`.
//!
//! Groups and complexes are opaque handles; everything else crosses the
//! boundary as UTF-8 JSON. Every fallible call returns a [`UlefStatus`];
//! on failure [`ulef_last_error`] describes the error. Strings handed out
//! through `out_*` pointers belong to the caller and are released with
//! [`ulef_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use uniform_lefschetz::class_fn::ClassFunctionDoc;
use uniform_lefschetz::cli::{execute_source, parse_group_arg, Command, RunConfig};
use uniform_lefschetz::complex::doc::ComplexDoc;
use uniform_lefschetz::complex::QuotientComplex;
use uniform_lefschetz::fixpoint::doc::named_complex;
use uniform_lefschetz::ufh::decide_class_with;
use uniform_lefschetz::ufh::DecideOptions;
use uniform_lefschetz::{Error, MarkedGroup};

/// Status of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UlefStatus {
    Ok = 0,
    /// Malformed document, unknown name, or a mathematical precondition
    /// (not tame, unsupported kind, ...).
    InvalidInput = 1,
    /// A region or enumeration budget was exceeded.
    Resource = 2,
    /// Internal invariant breach or panic; always a bug.
    Internal = 3,
    NullPointer = 4,
    Utf8 = 5,
}

/// Deck group handle.
pub struct UlefGroup(MarkedGroup);

/// Quotient complex handle.
pub struct UlefComplex(QuotientComplex);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', "\\0")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(UlefStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.exit_code() {
            2 => UlefStatus::Resource,
            3 => UlefStatus::Internal,
            _ => UlefStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(UlefStatus::InvalidInput, format!("malformed JSON: {e}"))
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> UlefStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            UlefStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside ulef".into());
            UlefStatus::Internal
        }
    }
}

/// # Safety
/// `s` is null or a NUL-terminated string.
unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(UlefStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(UlefStatus::Utf8, format!("{what} is not UTF-8: {e}")))
}

fn check_out<T>(p: *mut T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(UlefStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `out` is a valid, non-null pointer.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(UlefStatus::Internal, "report contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Library version, a static string (do not free).
#[no_mangle]
pub extern "C" fn ulef_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call into the library on the same thread; do not free.
#[no_mangle]
pub extern "C" fn ulef_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` is null or a string returned through an `out_*` pointer of this
/// library that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ulef_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a group from `Z^k`, `F_k`, `surface:g`, `cyclic:n` or a JSON
/// group spec.
///
/// # Safety
/// `desc` is a NUL-terminated string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ulef_group_new(desc: *const c_char, out: *mut *mut UlefGroup) -> UlefStatus {
    guard(|| {
        check_out(out, "out")?;
        let g = parse_group_arg(text(desc, "desc")?)?;
        *out = Box::into_raw(Box::new(UlefGroup(g)));
        Ok(())
    })
}

/// # Safety
/// `g` is null or a handle from [`ulef_group_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ulef_group_free(g: *mut UlefGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of elements of the word-metric ball of radius `radius`.
///
/// # Safety
/// `g` is a live group handle; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ulef_group_ball_size(g: *const UlefGroup, radius: usize, out: *mut usize) -> UlefStatus {
    guard(|| {
        check_out(out, "out")?;
        let g = g.as_ref().ok_or_else(|| Failure(UlefStatus::NullPointer, "group is null".into()))?;
        *out = g.0.ball(radius)?.len();
        Ok(())
    })
}

/// Decide the class of `{constant, finite: [[word, value]]}` in the
/// coinvariants of `g`; writes the certificate document (with the
/// verifier's result) as JSON.
///
/// # Safety
/// `g` is a live group handle; `class_json` is a NUL-terminated string;
/// `out_json` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ulef_decide_class(
    g: *const UlefGroup,
    class_json: *const c_char,
    out_json: *mut *mut c_char,
) -> UlefStatus {
    guard(|| {
        check_out(out_json, "out_json")?;
        let g = g.as_ref().ok_or_else(|| Failure(UlefStatus::NullPointer, "group is null".into()))?;
        let doc: ClassFunctionDoc = serde_json::from_str(text(class_json, "class_json")?)?;
        let f = doc.resolve(&g.0)?;
        let cert = decide_class_with(&g.0, &f, &DecideOptions::default())?;
        put_string(out_json, serde_json::to_string(&cert.to_doc(&g.0)?)?)
    })
}

/// Load a quotient complex from a JSON document or a fixture name
/// (`torus7`, `genus2`, `tetrahedron`, `octahedron`, `torus-grid:M`,
/// `surface:G`, `klein:M`).
///
/// # Safety
/// `src` is a NUL-terminated string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ulef_complex_new(src: *const c_char, out: *mut *mut UlefComplex) -> UlefStatus {
    guard(|| {
        check_out(out, "out")?;
        let s = text(src, "src")?;
        let q = if s.trim_start().starts_with('{') {
            ComplexDoc::from_json(s)?.resolve()?
        } else {
            named_complex(s)?
        };
        *out = Box::into_raw(Box::new(UlefComplex(q)));
        Ok(())
    })
}

/// # Safety
/// `c` is null or a handle from [`ulef_complex_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ulef_complex_free(c: *mut UlefComplex) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` is a live complex handle; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ulef_complex_euler_characteristic(c: *const UlefComplex, out: *mut i64) -> UlefStatus {
    guard(|| {
        check_out(out, "out")?;
        let c = c.as_ref().ok_or_else(|| Failure(UlefStatus::NullPointer, "complex is null".into()))?;
        *out = c.0.euler_characteristic();
        Ok(())
    })
}

/// Validation report `{violations: [{condition, detail}]}` as JSON.
///
/// # Safety
/// `c` is a live complex handle; `out_json` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ulef_complex_validate(c: *const UlefComplex, out_json: *mut *mut c_char) -> UlefStatus {
    guard(|| {
        check_out(out_json, "out_json")?;
        let c = c.as_ref().ok_or_else(|| Failure(UlefStatus::NullPointer, "complex is null".into()))?;
        put_string(out_json, serde_json::to_string(&c.0.validate())?)
    })
}

/// Run `map-analyze`, `field-analyze` or `decide-class` on a document
/// given as text. `radius == 0` and `capacity <= 0` select the defaults.
/// Writes the same JSON report as the `ulef` binary and its exit code.
///
/// # Safety
/// `command` and `document` are NUL-terminated strings; `out_json` and
/// `out_exit_code` are valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ulef_analyze(
    command: *const c_char,
    document: *const c_char,
    radius: usize,
    capacity: i64,
    out_json: *mut *mut c_char,
    out_exit_code: *mut i32,
) -> UlefStatus {
    guard(|| {
        check_out(out_json, "out_json")?;
        check_out(out_exit_code, "out_exit_code")?;
        let input = PathBuf::new();
        let command = match text(command, "command")? {
            "map-analyze" => Command::MapAnalyze { input },
            "field-analyze" => Command::FieldAnalyze { input },
            "decide-class" => Command::DecideClass { input },
            other => {
                return Err(Failure(
                    UlefStatus::InvalidInput,
                    format!("unknown command `{other}` (map-analyze, field-analyze, decide-class)"),
                ))
            }
        };
        let cfg = RunConfig {
            command,
            radius: (radius > 0).then_some(radius),
            capacity: if capacity > 0 { capacity } else { 64 },
            subdivide: None,
            grid: 32,
            seed: 0,
            out: None,
            plots: false,
        };
        let out = execute_source(&cfg, Some(text(document, "document")?))?;
        *out_exit_code = out.exit_code;
        put_string(out_json, out.render())
    })
}
