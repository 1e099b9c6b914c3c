//! Opaque handles: states, observable tuples, channels, quadrature rules.

use std::ffi::{c_char, CStr, CString};

use qot_core::integral::{build_quadrature, QuadratureRule};
use qot_core::io::JsonInstance;
use qot_core::quantum::{
    derive_seed, marginal_pair, random_channel, random_observable, random_state, replacer_channel, DensityMatrix,
    KrausChannel, ObservableTuple,
};
use qot_core::QotError;

use crate::{borrow, emit, guard, read_matrix, store, write_matrix, FfiError, QotStatus};

/// Density matrix.
pub struct QotState(pub(crate) DensityMatrix);

/// Tuple of Hermitian observables on one space.
pub struct QotObservables(pub(crate) ObservableTuple);

/// Unital completely positive map, stored as Kraus operators `dim_in x dim_out`.
pub struct QotChannel(pub(crate) KrausChannel);

/// Quadrature rule for the integral representation.
pub struct QotQuadrature(pub(crate) QuadratureRule);

/// Frees a handle; NULL is a no-op.
///
/// # Safety
/// `p` must be NULL or a handle of type `T` not freed before.
unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `s` must be NULL or a NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FfiError> {
    if s.is_null() {
        return Err(FfiError::Null("string"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| FfiError::Core(QotError::Parse(format!("string is not UTF-8: {e}"))))
}

/// # Safety
/// `out` must be NULL or writable.
unsafe fn emit_string(out: *mut *mut c_char, s: String) -> Result<(), FfiError> {
    let s = CString::new(s).map_err(|e| FfiError::Core(QotError::Parse(e.to_string())))?;
    store(out, s.into_raw())
}

/// Frees a string returned by this library; NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a string from a `qot_*_to_json` call, not freed before.
#[no_mangle]
pub unsafe extern "C" fn qot_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// State from a `dim x dim` matrix (`2 dim^2` doubles).
///
/// # Safety
/// `data` must point to `2 dim^2` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_state_new(dim: usize, data: *const f64, out: *mut *mut QotState) -> QotStatus {
    guard(|| {
        let m = read_matrix(data, dim, dim)?;
        emit(out, QotState(DensityMatrix::new(m)?))
    })
}

/// Seeded random state of the given rank.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_state_random(dim: usize, rank: usize, seed: u64, out: *mut *mut QotState) -> QotStatus {
    guard(|| emit(out, QotState(random_state(dim, rank, seed)?)))
}

/// Pure state `|k><k|`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_state_basis(dim: usize, k: usize, out: *mut *mut QotState) -> QotStatus {
    guard(|| emit(out, QotState(DensityMatrix::basis(dim, k)?)))
}

/// State from its JSON document (`"type": "density_matrix"`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_state_from_json(json: *const c_char, out: *mut *mut QotState) -> QotStatus {
    guard(|| emit(out, QotState(DensityMatrix::from_json(read_str(json)?)?)))
}

/// JSON document of a state; release with `qot_string_free`.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_state_to_json(state: *const QotState, out: *mut *mut c_char) -> QotStatus {
    guard(|| emit_string(out, borrow(state, "state")?.0.to_json()))
}

/// Dimension of a state, 0 for NULL.
///
/// # Safety
/// `state` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qot_state_dim(state: *const QotState) -> usize {
    state.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies the matrix into `out` (`len = 2 dim^2` doubles).
///
/// # Safety
/// `state` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qot_state_matrix(state: *const QotState, out: *mut f64, len: usize) -> QotStatus {
    guard(|| write_matrix(borrow(state, "state")?.0.matrix(), out, len))
}

/// # Safety
/// `state` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn qot_state_free(state: *mut QotState) {
    release(state);
}

/// Tuple of `count` observables, each `dim x dim` (`2 count dim^2` doubles).
///
/// # Safety
/// `data` must point to `2 count dim^2` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_observables_new(
    dim: usize,
    count: usize,
    data: *const f64,
    out: *mut *mut QotObservables,
) -> QotStatus {
    guard(|| {
        let entries = (0..count)
            .map(|k| read_matrix(data.wrapping_add(2 * dim * dim * k), dim, dim))
            .collect::<Result<Vec<_>, _>>()?;
        emit(out, QotObservables(ObservableTuple::new(dim, entries)?))
    })
}

/// The Pauli tuple `(X, Y, Z)` on a qubit.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_observables_pauli(out: *mut *mut QotObservables) -> QotStatus {
    guard(|| emit(out, QotObservables(ObservableTuple::pauli())))
}

/// `count` seeded random observables; entry `k` uses `derive_seed(seed, k)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_observables_random(
    dim: usize,
    count: usize,
    seed: u64,
    out: *mut *mut QotObservables,
) -> QotStatus {
    guard(|| {
        let entries = (0..count as u64).map(|k| random_observable(dim, derive_seed(seed, k))).collect();
        emit(out, QotObservables(ObservableTuple::new(dim, entries)?))
    })
}

/// Tuple length, 0 for NULL.
///
/// # Safety
/// `xs` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qot_observables_len(xs: *const QotObservables) -> usize {
    xs.as_ref().map_or(0, |x| x.0.len())
}

/// # Safety
/// `xs` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn qot_observables_free(xs: *mut QotObservables) {
    release(xs);
}

/// Channel from `num_kraus` Kraus operators of shape `dim_in x dim_out`
/// (`2 num_kraus dim_in dim_out` doubles); checks unitality.
///
/// # Safety
/// `data` must point to the stated number of doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_channel_new(
    dim_in: usize,
    dim_out: usize,
    num_kraus: usize,
    data: *const f64,
    out: *mut *mut QotChannel,
) -> QotStatus {
    guard(|| {
        let kraus = (0..num_kraus)
            .map(|k| read_matrix(data.wrapping_add(2 * dim_in * dim_out * k), dim_in, dim_out))
            .collect::<Result<Vec<_>, _>>()?;
        emit(out, QotChannel(KrausChannel::new(kraus)?))
    })
}

/// Identity channel on `dim`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_channel_identity(dim: usize, out: *mut *mut QotChannel) -> QotStatus {
    guard(|| {
        if dim == 0 {
            return Err(QotError::InvalidParameters("dimension must be positive".into()).into());
        }
        emit(out, QotChannel(KrausChannel::identity(dim)))
    })
}

/// Channel `x -> tr(rho x) 1` into dimension `dim_out`; transports every
/// state on `dim_out` onto `rho`.
///
/// # Safety
/// `rho` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_channel_replacer(
    rho: *const QotState,
    dim_out: usize,
    out: *mut *mut QotChannel,
) -> QotStatus {
    guard(|| emit(out, QotChannel(replacer_channel(&borrow(rho, "rho")?.0, dim_out)?)))
}

/// Seeded random channel.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_channel_random(
    dim_in: usize,
    dim_out: usize,
    num_kraus: usize,
    seed: u64,
    out: *mut *mut QotChannel,
) -> QotStatus {
    guard(|| emit(out, QotChannel(random_channel(dim_in, dim_out, num_kraus, seed)?)))
}

/// The transported state `Phi_*(sigma)` on the input space.
///
/// # Safety
/// `ch` and `sigma` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_channel_push_forward(
    ch: *const QotChannel,
    sigma: *const QotState,
    out: *mut *mut QotState,
) -> QotStatus {
    guard(|| emit(out, QotState(borrow(ch, "channel")?.0.push_forward(&borrow(sigma, "sigma")?.0)?)))
}

/// Input dimension, 0 for NULL.
///
/// # Safety
/// `ch` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qot_channel_dim_in(ch: *const QotChannel) -> usize {
    ch.as_ref().map_or(0, |c| c.0.dim_in())
}

/// Output dimension, 0 for NULL.
///
/// # Safety
/// `ch` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qot_channel_dim_out(ch: *const QotChannel) -> usize {
    ch.as_ref().map_or(0, |c| c.0.dim_out())
}

/// # Safety
/// `ch` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn qot_channel_free(ch: *mut QotChannel) {
    release(ch);
}

/// Seeded feasible instance: a channel, `sigma` of the given rank on
/// `dim_out`, and `rho = Phi_*(sigma)`.
///
/// # Safety
/// All three output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_marginal_pair(
    dim_in: usize,
    dim_out: usize,
    num_kraus: usize,
    rank: usize,
    seed: u64,
    out_channel: *mut *mut QotChannel,
    out_rho: *mut *mut QotState,
    out_sigma: *mut *mut QotState,
) -> QotStatus {
    guard(|| {
        if out_channel.is_null() || out_rho.is_null() || out_sigma.is_null() {
            return Err(FfiError::Null("output handle"));
        }
        let inst = marginal_pair(dim_in, dim_out, num_kraus, rank, seed)?;
        emit(out_channel, QotChannel(inst.channel))?;
        emit(out_rho, QotState(inst.rho))?;
        emit(out_sigma, QotState(inst.sigma))
    })
}

/// Composite Gauss-Legendre rule with `panels` panels of `order` points on
/// `[-truncation, truncation]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_quadrature_new(
    truncation: f64,
    panels: usize,
    order: usize,
    out: *mut *mut QotQuadrature,
) -> QotStatus {
    guard(|| emit(out, QotQuadrature(build_quadrature(truncation, panels, order)?)))
}

/// The default rule.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_quadrature_default(out: *mut *mut QotQuadrature) -> QotStatus {
    guard(|| emit(out, QotQuadrature(QuadratureRule::default())))
}

/// Number of nodes, 0 for NULL.
///
/// # Safety
/// `rule` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qot_quadrature_len(rule: *const QotQuadrature) -> usize {
    rule.as_ref().map_or(0, |r| r.0.nodes.len())
}

/// # Safety
/// `rule` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn qot_quadrature_free(rule: *mut QotQuadrature) {
    release(rule);
}
