//! C ABI over `qot-core`.
//!
//! Objects cross the boundary as opaque handles created by `qot_*_new` /
//! `qot_*_random` and released with the matching `qot_*_free`. Every fallible
//! call returns a [`QotStatus`]; on failure the message is available from
//! [`qot_last_error`] on the same thread until the next failing call.
//!
//! Matrices are passed as row-major interleaved `(re, im)` doubles, so an
//! `r x c` matrix is `2 r c` values.

mod compute;
mod objects;

pub use compute::*;
pub use objects::*;

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, UnwindSafe};

use qot_core::linalg::{ComplexMatrix, C64};
use qot_core::QotError;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QotStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    /// Input is not a valid state, observable or channel.
    InvalidInput = 3,
    /// The channel does not transport the second state onto the first.
    MarginalMismatch = 4,
    InvalidParameters = 5,
    /// An iterative method broke down.
    NumericalFailure = 6,
    Parse = 7,
    Io = 8,
    /// A Rust panic was caught at the boundary.
    Panic = 9,
}

impl From<&QotError> for QotStatus {
    fn from(e: &QotError) -> Self {
        match e {
            QotError::DimensionMismatch(_) | QotError::LengthMismatch { .. } => Self::DimensionMismatch,
            QotError::NonHermitianInput { .. }
            | QotError::NegativeEigenvalue { .. }
            | QotError::InvalidState(_)
            | QotError::InvalidObservable(_)
            | QotError::NotPsd { .. }
            | QotError::BrokenUnitality { .. }
            | QotError::InvalidRank { .. }
            | QotError::SupportViolation { .. } => Self::InvalidInput,
            QotError::MarginalMismatch { .. } => Self::MarginalMismatch,
            QotError::InvalidParameters(_) => Self::InvalidParameters,
            QotError::NumericalFailure(_) | QotError::ConvergenceFailure { .. } => Self::NumericalFailure,
            QotError::Parse(_) => Self::Parse,
            QotError::Io(_) => Self::Io,
        }
    }
}

pub(crate) enum FfiError {
    Null(&'static str),
    Core(QotError),
}

impl From<QotError> for FfiError {
    fn from(e: QotError) -> Self {
        Self::Core(e)
    }
}

pub(crate) type FfiResult<T = ()> = Result<T, FfiError>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    // interior NULs cannot be represented in a C string
    let msg = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

/// Runs `f`, converting errors and panics into a status code.
pub(crate) fn guard(f: impl FnOnce() -> FfiResult + UnwindSafe) -> QotStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => QotStatus::Ok,
        Ok(Err(FfiError::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            QotStatus::NullPointer
        }
        Ok(Err(FfiError::Core(e))) => {
            set_last_error(e.to_string());
            QotStatus::from(&e)
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            QotStatus::Panic
        }
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qot_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qot_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Reads a `rows x cols` matrix from interleaved `(re, im)` doubles.
///
/// # Safety
/// `data` must be NULL or point to `2 rows cols` readable doubles.
pub(crate) unsafe fn read_matrix(data: *const f64, rows: usize, cols: usize) -> FfiResult<ComplexMatrix> {
    if data.is_null() {
        return Err(FfiError::Null("matrix data"));
    }
    let len = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(2))
        .ok_or_else(|| FfiError::Core(QotError::InvalidParameters(format!("matrix of {rows}x{cols} is too large"))))?;
    let raw = std::slice::from_raw_parts(data, len);
    let entries = raw.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
    Ok(ComplexMatrix::from_vec(rows, cols, entries)?)
}

/// Writes `m` as interleaved `(re, im)` doubles into `out` of capacity `len`.
///
/// # Safety
/// `out` must be NULL or point to `len` writable doubles.
pub(crate) unsafe fn write_matrix(m: &ComplexMatrix, out: *mut f64, len: usize) -> FfiResult {
    if out.is_null() {
        return Err(FfiError::Null("output buffer"));
    }
    let (r, c) = m.shape();
    if len != 2 * r * c {
        return Err(FfiError::Core(QotError::DimensionMismatch(format!(
            "buffer of {len} doubles for a {r}x{c} matrix"
        ))));
    }
    let out = std::slice::from_raw_parts_mut(out, len);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[2 * (i * c + j)] = z.re;
            out[2 * (i * c + j) + 1] = z.im;
        }
    }
    Ok(())
}

/// Borrows a handle.
///
/// # Safety
/// `p` must be NULL or a live handle of type `T` from this library.
pub(crate) unsafe fn borrow<'a, T>(p: *const T, what: &'static str) -> FfiResult<&'a T> {
    p.as_ref().ok_or(FfiError::Null(what))
}

/// Stores a new handle in `*out`.
///
/// # Safety
/// `out` must be NULL or writable.
pub(crate) unsafe fn emit<T>(out: *mut *mut T, value: T) -> FfiResult {
    if out.is_null() {
        return Err(FfiError::Null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Stores a plain value in `*out`.
///
/// # Safety
/// `out` must be NULL or writable.
pub(crate) unsafe fn store<T>(out: *mut T, value: T) -> FfiResult {
    if out.is_null() {
        return Err(FfiError::Null("output value"));
    }
    *out = value;
    Ok(())
}
