//! Exercises the C ABI from Rust: handle lifecycle, counts, bounds, and
//! ovoid validation, including the error paths a C caller can hit.

use movoid_ffi::*;
use std::ffi::CString;
use std::os::raw::c_char;
use std::ptr;

fn new_space(kind: &str, q: u64, r: u32) -> *mut MovoidSpace {
    let kind = CString::new(kind).unwrap();
    let mut out: *mut MovoidSpace = ptr::null_mut();
    let st = unsafe { movoid_space_new(kind.as_ptr(), q, r, &mut out) };
    assert_eq!(st, MovoidStatus::Ok);
    assert!(!out.is_null());
    out
}

#[test]
fn space_lifecycle_and_counts() {
    let sp = new_space("Q-", 3, 2);
    let (mut pts, mut gens) = (0u64, 0u64);
    let st = unsafe { movoid_space_counts(sp, &mut pts, &mut gens) };
    assert_eq!(st, MovoidStatus::Ok);
    assert_eq!(pts, 112);
    assert_eq!(gens, 280);

    let mut buf = [0 as c_char; 32];
    let st = unsafe { movoid_space_name(sp, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(st, MovoidStatus::Ok);
    let name = unsafe { std::ffi::CStr::from_ptr(buf.as_ptr()) };
    assert_eq!(name.to_str().unwrap(), "Q-(5,3)");

    unsafe { movoid_space_free(sp) };
}

#[test]
fn error_paths() {
    let kind = CString::new("Q-").unwrap();
    let mut out: *mut MovoidSpace = ptr::null_mut();
    // 6 is not a prime power.
    let st = unsafe { movoid_space_new(kind.as_ptr(), 6, 2, &mut out) };
    assert_eq!(st, MovoidStatus::InvalidArgument);
    // Hermitian orders must be squares.
    let h = CString::new("H").unwrap();
    let st = unsafe { movoid_space_new(h.as_ptr(), 8, 2, &mut out) };
    assert_eq!(st, MovoidStatus::BuildFailed);
    // Null handling.
    let st = unsafe { movoid_space_new(ptr::null(), 3, 2, &mut out) };
    assert_eq!(st, MovoidStatus::NullPointer);
    let st = unsafe { movoid_space_counts(ptr::null(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, MovoidStatus::NullPointer);
    unsafe { movoid_space_free(ptr::null_mut()) };
}

#[test]
fn best_bound_string() {
    let kind = CString::new("H").unwrap();
    let mut buf = [0 as c_char; 64];
    let st = unsafe { movoid_best_bound(kind.as_ptr(), 9, 3, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(st, MovoidStatus::Ok);
    let s = unsafe { std::ffi::CStr::from_ptr(buf.as_ptr()) };
    assert_eq!(s.to_str().unwrap(), "8");
    // Too-small buffer is reported, not truncated.
    let st = unsafe { movoid_best_bound(kind.as_ptr(), 9, 3, buf.as_mut_ptr(), 1) };
    assert_eq!(st, MovoidStatus::BufferTooSmall);
}

#[test]
fn validate_ovoid_roundtrip() {
    // The full polar point set of W(3,2) is the trivial 3-ovoid.
    let sp = new_space("W", 2, 2);
    let all: Vec<u64> = (0..15).collect();
    let st = unsafe { movoid_validate_ovoid(sp, all.as_ptr(), all.len(), 3) };
    assert_eq!(st, MovoidStatus::Ok);
    let st = unsafe { movoid_validate_ovoid(sp, all.as_ptr(), all.len(), 2) };
    assert_eq!(st, MovoidStatus::ValidationFailed);
    let bad = [999u64];
    let st = unsafe { movoid_validate_ovoid(sp, bad.as_ptr(), 1, 1) };
    assert_eq!(st, MovoidStatus::InvalidArgument);
    unsafe { movoid_space_free(sp) };
}
