//! C ABI for `gda-core`.
//!
//! Algebras are opaque handles created from a TOML spec and released with
//! [`gda_algebra_free`]. Every fallible call returns a [`GdaStatus`]; the
//! message of the most recent failure on the calling thread is available
//! from [`gda_last_error_message`]. Results are JSON strings owned by the
//! caller and released with [`gda_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gda_core::cli::{self, MatrixInput, SkInput};
use gda_core::oracle::default_budget;
use gda_core::GdaError;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GdaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Singular = 4,
    NotHomogeneous = 5,
    NotDegreeZero = 6,
    OrderTooSmall = 7,
    ExceptionalF2 = 8,
    InfiniteField = 9,
    BudgetExceeded = 10,
    Unsupported = 11,
    Internal = 12,
}

impl From<&GdaError> for GdaStatus {
    fn from(e: &GdaError) -> Self {
        match e {
            GdaError::Singular { .. } => GdaStatus::Singular,
            GdaError::NotHomogeneous => GdaStatus::NotHomogeneous,
            GdaError::NotDegreeZero => GdaStatus::NotDegreeZero,
            GdaError::OrderTooSmall { .. } => GdaStatus::OrderTooSmall,
            GdaError::ExceptionalF2Config => GdaStatus::ExceptionalF2,
            GdaError::InfiniteT0Star { .. } | GdaError::InfiniteCoefficientField => {
                GdaStatus::InfiniteField
            }
            GdaError::SizeBudgetExceeded { .. } => GdaStatus::BudgetExceeded,
            GdaError::UnsupportedAlgebra | GdaError::UnsupportedShift => GdaStatus::Unsupported,
            e if e.exit_code() == 2 => GdaStatus::InvalidInput,
            _ => GdaStatus::Internal,
        }
    }
}

/// Opaque algebra handle.
pub struct GdaAlgebra {
    spec: String,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: GdaError) -> GdaStatus {
    set_error(format!("{}: {e}", e.code()));
    GdaStatus::from(&e)
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, GdaStatus> {
    if p.is_null() {
        set_error("null pointer argument".into());
        return Err(GdaStatus::NullPointer);
    }
    // SAFETY: the caller passes a nul-terminated string
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".into());
        GdaStatus::InvalidUtf8
    })
}

unsafe fn write_out(out: *mut *mut c_char, s: String) -> GdaStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: out checked non-null by the caller
            unsafe { *out = c.into_raw() };
            GdaStatus::Ok
        }
        Err(_) => {
            set_error("output contains a nul byte".into());
            GdaStatus::Internal
        }
    }
}

fn guarded(f: impl FnOnce() -> GdaStatus) -> GdaStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic".into());
        GdaStatus::Internal
    })
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gda_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static nul-terminated string.
#[no_mangle]
pub extern "C" fn gda_version() -> *const c_char {
    static VERSION: &[u8] = concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes();
    VERSION.as_ptr() as *const c_char
}

/// Parses and validates a TOML algebra spec.
///
/// # Safety
/// `toml` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gda_algebra_from_toml(
    toml: *const c_char,
    out: *mut *mut GdaAlgebra,
) -> GdaStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer".into());
            return GdaStatus::NullPointer;
        }
        let text = match unsafe { read_str(toml) } {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli::load_spec(text) {
            Ok(_) => {
                let h = Box::new(GdaAlgebra {
                    spec: text.to_string(),
                });
                unsafe { *out = Box::into_raw(h) };
                GdaStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `algebra` must come from [`gda_algebra_from_toml`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn gda_algebra_free(algebra: *mut GdaAlgebra) {
    if !algebra.is_null() {
        drop(unsafe { Box::from_raw(algebra) });
    }
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn gda_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// `{s, e, field, invariants...}` for the algebra.
///
/// # Safety
/// `algebra` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gda_algebra_describe(
    algebra: *const GdaAlgebra,
    out: *mut *mut c_char,
) -> GdaStatus {
    guarded(|| {
        let Some(h) = (unsafe { algebra.as_ref() }) else {
            set_error("null algebra handle".into());
            return GdaStatus::NullPointer;
        };
        if out.is_null() {
            return GdaStatus::NullPointer;
        }
        let a = match cli::load_spec(&h.spec) {
            Ok(sp) => sp.algebra,
            Err(e) => return fail(e),
        };
        let v = serde_json::json!({
            "field": a.field().kind().to_string(),
            "ambient_rank": a.ambient_rank(),
            "s": a.s(),
            "e": a.e(),
            "mu_s_order": a.mu_s().order,
            "mu_e_order": a.mu_e().order,
            "gamma_e_mod_gamma_t": a.quotient_group().invariant_factors(),
        });
        unsafe { write_out(out, v.to_string()) }
    })
}

type MatrixCmd = fn(&MatrixInput) -> gda_core::Result<cli::RunReport>;

unsafe fn matrix_call(
    algebra: *const GdaAlgebra,
    matrix_json: *const c_char,
    out: *mut *mut c_char,
    cmd: MatrixCmd,
) -> GdaStatus {
    guarded(|| {
        let Some(h) = (unsafe { algebra.as_ref() }) else {
            set_error("null algebra handle".into());
            return GdaStatus::NullPointer;
        };
        if out.is_null() {
            set_error("null output pointer".into());
            return GdaStatus::NullPointer;
        }
        let m = match unsafe { read_str(matrix_json) } {
            Ok(t) => t,
            Err(s) => return s,
        };
        let input = MatrixInput {
            spec: &h.spec,
            matrix: m,
            n: None,
            shifts: None,
        };
        match cmd(&input) {
            Ok(r) => unsafe { write_out(out, r.outputs.to_string()) },
            Err(e) => fail(e),
        }
    })
}

/// Strict Bruhat normal form of a JSON matrix.
///
/// # Safety
/// Pointers must be valid; `matrix_json` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn gda_bruhat(
    algebra: *const GdaAlgebra,
    matrix_json: *const c_char,
    out: *mut *mut c_char,
) -> GdaStatus {
    unsafe { matrix_call(algebra, matrix_json, out, cli::cmd_bruhat) }
}

/// Homogeneous Dieudonne determinant of a JSON matrix.
///
/// # Safety
/// Pointers must be valid; `matrix_json` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn gda_det(
    algebra: *const GdaAlgebra,
    matrix_json: *const c_char,
    out: *mut *mut c_char,
) -> GdaStatus {
    unsafe { matrix_call(algebra, matrix_json, out, cli::cmd_det) }
}

/// Reduced norms of a JSON matrix.
///
/// # Safety
/// Pointers must be valid; `matrix_json` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn gda_nrd(
    algebra: *const GdaAlgebra,
    matrix_json: *const c_char,
    out: *mut *mut c_char,
) -> GdaStatus {
    unsafe { matrix_call(algebra, matrix_json, out, cli::cmd_nrd) }
}

/// `SK(E)`, the kernel group and `SK^h` at size `n` (0 for the spec's own
/// `[matrix]` section), with the oracle when `with_oracle` is nonzero.
/// `budget` 0 means the default.
///
/// # Safety
/// `algebra` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gda_sk(
    algebra: *const GdaAlgebra,
    n: usize,
    with_oracle: i32,
    budget: u64,
    out: *mut *mut c_char,
) -> GdaStatus {
    guarded(|| {
        let Some(h) = (unsafe { algebra.as_ref() }) else {
            set_error("null algebra handle".into());
            return GdaStatus::NullPointer;
        };
        if out.is_null() {
            set_error("null output pointer".into());
            return GdaStatus::NullPointer;
        }
        let input = SkInput {
            spec: &h.spec,
            n: (n > 0).then_some(n),
            shifts: None,
            budget: if budget == 0 {
                default_budget()
            } else {
                budget
            },
            oracle: with_oracle != 0,
        };
        match cli::cmd_sk(&input) {
            Ok(r) => unsafe { write_out(out, r.outputs.to_string()) },
            Err(e) => fail(e),
        }
    })
}
