//! C ABI over the polar space toolkit: opaque handles, integer error
//! codes, and caller-provided buffers. Every function is safe to call with
//! null pointers (it returns an error code instead of crashing), and every
//! handle must be released with the matching `_free`.

use movoid::{Config, Field, PolarSpace, SpaceKind};
use std::ffi::CStr;
use std::os::raw::c_char;
use std::sync::Arc;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MovoidStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BuildFailed = 3,
    ValidationFailed = 4,
    BufferTooSmall = 5,
}

/// Opaque polar space handle.
pub struct MovoidSpace {
    inner: Arc<PolarSpace>,
}

fn parse_kind(kind: *const c_char) -> Result<SpaceKind, MovoidStatus> {
    if kind.is_null() {
        return Err(MovoidStatus::NullPointer);
    }
    let s = unsafe { CStr::from_ptr(kind) }
        .to_str()
        .map_err(|_| MovoidStatus::InvalidArgument)?;
    SpaceKind::parse(s).ok_or(MovoidStatus::InvalidArgument)
}

fn write_str(s: &str, buf: *mut c_char, buf_len: usize) -> MovoidStatus {
    if buf.is_null() {
        return MovoidStatus::NullPointer;
    }
    let bytes = s.as_bytes();
    if bytes.len() + 1 > buf_len {
        return MovoidStatus::BufferTooSmall;
    }
    unsafe {
        std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, bytes.len());
        *buf.add(bytes.len()) = 0;
    }
    MovoidStatus::Ok
}

/// Builds a polar space. `kind` is "Q-", "W", or "H"; `q` the field order
/// (Hermitian: the ambient square order); `r` the rank. On success `*out`
/// owns the space; release it with [`movoid_space_free`].
///
/// # Safety
/// `kind` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn movoid_space_new(
    kind: *const c_char,
    q: u64,
    r: u32,
    out: *mut *mut MovoidSpace,
) -> MovoidStatus {
    if out.is_null() {
        return MovoidStatus::NullPointer;
    }
    let kind = match parse_kind(kind) {
        Ok(k) => k,
        Err(e) => return e,
    };
    let Some((p, k)) = movoid::factor_prime_power(q) else {
        return MovoidStatus::InvalidArgument;
    };
    let cfg = Config::from_env();
    let field = match Field::with_cap(p, k, cfg.max_field_order) {
        Ok(f) => Arc::new(f),
        Err(_) => return MovoidStatus::BuildFailed,
    };
    match PolarSpace::build_with(kind, r, field, &cfg) {
        Ok(space) => {
            let handle = Box::new(MovoidSpace {
                inner: Arc::new(space),
            });
            unsafe { *out = Box::into_raw(handle) };
            MovoidStatus::Ok
        }
        Err(_) => MovoidStatus::BuildFailed,
    }
}

/// Releases a space handle. Null is ignored.
///
/// # Safety
/// `space` must come from [`movoid_space_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn movoid_space_free(space: *mut MovoidSpace) {
    if !space.is_null() {
        drop(unsafe { Box::from_raw(space) });
    }
}

/// Point and generator counts of a built space. Either out pointer may be
/// null to skip that value.
///
/// # Safety
/// `space` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn movoid_space_counts(
    space: *const MovoidSpace,
    out_points: *mut u64,
    out_generators: *mut u64,
) -> MovoidStatus {
    if space.is_null() {
        return MovoidStatus::NullPointer;
    }
    let sp = unsafe { &(*space).inner };
    if !out_points.is_null() {
        unsafe { *out_points = sp.points().len() as u64 };
    }
    if !out_generators.is_null() {
        unsafe { *out_generators = sp.generator_point_sets().len() as u64 };
    }
    MovoidStatus::Ok
}

/// Writes the display name (e.g. "Q-(5,3)") into `buf`.
///
/// # Safety
/// `space` must be a live handle; `buf` must hold `buf_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn movoid_space_name(
    space: *const MovoidSpace,
    buf: *mut c_char,
    buf_len: usize,
) -> MovoidStatus {
    if space.is_null() {
        return MovoidStatus::NullPointer;
    }
    let sp = unsafe { &(*space).inner };
    write_str(&sp.name(), buf, buf_len)
}

/// Best proven lower bound on m for the given parameters, written as a
/// decimal string (it can exceed any fixed-width integer).
///
/// # Safety
/// `kind` must be a valid NUL-terminated string; `buf` must hold
/// `buf_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn movoid_best_bound(
    kind: *const c_char,
    q: u64,
    r: u32,
    buf: *mut c_char,
    buf_len: usize,
) -> MovoidStatus {
    let kind = match parse_kind(kind) {
        Ok(k) => k,
        Err(e) => return e,
    };
    match movoid::bounds::best_bound(kind, r, q) {
        Ok(report) => write_str(&report.best.threshold, buf, buf_len),
        Err(_) => MovoidStatus::InvalidArgument,
    }
}

/// Validates a point-index set as an m-ovoid. Returns `Ok` when valid,
/// `ValidationFailed` when the set is well-formed but not an m-ovoid, and
/// `InvalidArgument` for out-of-range or non-polar indices.
///
/// # Safety
/// `space` must be a live handle; `points` must reference `len` readable
/// indices.
#[no_mangle]
pub unsafe extern "C" fn movoid_validate_ovoid(
    space: *const MovoidSpace,
    points: *const u64,
    len: usize,
    m: u64,
) -> MovoidStatus {
    if space.is_null() || (points.is_null() && len > 0) {
        return MovoidStatus::NullPointer;
    }
    let sp = unsafe { &(*space).inner };
    let raw = unsafe { std::slice::from_raw_parts(points, len) };
    let np = sp.geometry().num_points() as u64;
    let mut idx = Vec::with_capacity(len);
    for &p in raw {
        if p >= np {
            return MovoidStatus::InvalidArgument;
        }
        idx.push(p as usize);
    }
    let w = match movoid::ovoid::WeightFunction::from_point_set(Arc::clone(sp), &idx) {
        Ok(w) => w,
        Err(_) => return MovoidStatus::InvalidArgument,
    };
    match movoid::ovoid::validate_m_ovoid(&w, m) {
        Ok(cert) if cert.valid => MovoidStatus::Ok,
        Ok(_) => MovoidStatus::ValidationFailed,
        Err(_) => MovoidStatus::InvalidArgument,
    }
}
