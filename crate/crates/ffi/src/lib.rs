//! C ABI over `codd-core`.
//!
//! Every fallible call returns a `CoddStatus`; on failure the message is
//! available from `codd_last_error` on the same thread until the next call.
//! Pointer arguments must be valid for the stated lengths, and output
//! pointers must be writable. Handles and buffers returned here are owned by
//! the caller and released with the matching `*_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use codd_core::codd::{self, Fuel, Outcome};
use codd_core::dtree::{optimal_tree, Labeling};
use codd_core::partitions::{logical_entropy, shannon_entropy, Distribution, InputSpace, Partition};
use codd_core::{rational, BitString, Error, ErrorCategory};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoddStatus {
    Ok = 0,
    NullPointer = 1,
    Invalid = 2,
    Mismatch = 3,
    Capacity = 4,
    Decode = 5,
    Undefined = 6,
    Io = 7,
    FuelExhausted = 8,
    Panic = 9,
}

/// Opaque expression handle.
pub struct CoddExprHandle(codd::CoddExpr);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CoddStatus {
    match e.category() {
        ErrorCategory::Mismatch => CoddStatus::Mismatch,
        ErrorCategory::Capacity => CoddStatus::Capacity,
        ErrorCategory::Decode => CoddStatus::Decode,
        ErrorCategory::Invalid => CoddStatus::Invalid,
        ErrorCategory::Undefined => CoddStatus::Undefined,
        ErrorCategory::Io => CoddStatus::Io,
    }
}

struct Failure(CoddStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CoddStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CoddStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CoddStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CoddStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn space(n: u32) -> Result<InputSpace, Failure> {
    Ok(InputSpace::new(n)?)
}

/// Uniform when `weights` is null, else `2^n` nonnegative integer weights.
unsafe fn distribution(s: InputSpace, weights: *const u64) -> Result<Distribution, Failure> {
    if weights.is_null() {
        return Ok(Distribution::uniform(s));
    }
    Ok(Distribution::from_weights(s, slice(weights, s.size(), "weights")?)?)
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior NUL").into_raw()
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn codd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn codd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub unsafe extern "C" fn codd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn codd_bytes_free(bytes: *mut u8, len: usize) {
    if !bytes.is_null() {
        drop(Box::from_raw(std::ptr::slice_from_raw_parts_mut(bytes, len)));
    }
}

/// Parses the binary form. On a decode error `error_offset`, when non-null,
/// receives the bit offset of the problem.
#[no_mangle]
pub unsafe extern "C" fn codd_expr_decode(
    bytes: *const u8,
    len: usize,
    out: *mut *mut CoddExprHandle,
    error_offset: *mut usize,
) -> CoddStatus {
    guard(|| {
        let bits = BitString::from_bytes(slice(bytes, len, "bytes")?);
        match codd::decode(&bits) {
            Ok(e) => write(out, Box::into_raw(Box::new(CoddExprHandle(e))), "out"),
            Err(e) => {
                if let (Error::Decode { offset, .. }, false) = (&e, error_offset.is_null()) {
                    error_offset.write(*offset);
                }
                Err(e.into())
            }
        }
    })
}

/// Serializes to the binary form; free the buffer with `codd_bytes_free`.
#[no_mangle]
pub unsafe extern "C" fn codd_expr_encode(
    e: *const CoddExprHandle,
    out: *mut *mut u8,
    out_len: *mut usize,
) -> CoddStatus {
    guard(|| {
        let e = e.as_ref().ok_or_else(|| null("expression"))?;
        let bytes = codd::encode(&e.0)?.to_bytes().into_boxed_slice();
        let len = bytes.len();
        write(out_len, len, "out_len")?;
        write(out, Box::into_raw(bytes).cast::<u8>(), "out")
    })
}

/// Applies `e` to a leaf holding `bits` (ASCII '0'/'1') and reduces.
/// Returns `FuelExhausted` without a result when the budget runs out.
#[no_mangle]
pub unsafe extern "C" fn codd_expr_eval_bits(
    e: *const CoddExprHandle,
    bits: *const c_char,
    fuel: u64,
    out: *mut *mut CoddExprHandle,
) -> CoddStatus {
    guard(|| {
        let e = e.as_ref().ok_or_else(|| null("expression"))?;
        if bits.is_null() {
            return Err(null("bits"));
        }
        let text =
            CStr::from_ptr(bits).to_str().map_err(|_| Failure(CoddStatus::Invalid, "bits are not UTF-8".into()))?;
        let arg: BitString = text.parse().map_err(|e: Error| Failure::from(e))?;
        let result = codd::eval_codd(&e.0, &[codd::CoddExpr::leaf(arg)], Fuel::new(fuel)?)?;
        match result.outcome {
            Outcome::Normal(nf) => write(out, Box::into_raw(Box::new(CoddExprHandle(nf))), "out"),
            Outcome::FuelExhausted => {
                Err(Failure(CoddStatus::FuelExhausted, format!("fuel exhausted after {} steps", result.steps)))
            }
        }
    })
}

/// The bits of a leaf expression as an ASCII string; free with
/// `codd_string_free`. `Invalid` when `e` is not a leaf.
#[no_mangle]
pub unsafe extern "C" fn codd_expr_leaf_bits(e: *const CoddExprHandle, out: *mut *mut c_char) -> CoddStatus {
    guard(|| {
        let e = e.as_ref().ok_or_else(|| null("expression"))?;
        let bits = e.0.as_leaf().ok_or_else(|| Failure(CoddStatus::Invalid, "expression is not a leaf".into()))?;
        write(out, c_string(bits.to_string()), "out")
    })
}

/// Number of distinct decision nodes; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn codd_expr_size(e: *const CoddExprHandle) -> usize {
    e.as_ref().map_or(0, |e| codd::codd_size(&e.0))
}

/// Entries in the node table; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn codd_expr_node_count(e: *const CoddExprHandle) -> usize {
    e.as_ref().map_or(0, |e| e.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn codd_expr_free(e: *mut CoddExprHandle) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Logical entropy of the partition with cell keys `cells[0..2^n]` as a
/// "p/q" string; free with `codd_string_free`. Null `weights` is uniform.
#[no_mangle]
pub unsafe extern "C" fn codd_logical_entropy(
    n: u32,
    cells: *const u32,
    weights: *const u64,
    out: *mut *mut c_char,
) -> CoddStatus {
    guard(|| {
        let s = space(n)?;
        let p = Partition::from_keys(s, slice(cells, s.size(), "cells")?.iter().copied())?;
        let h = logical_entropy(&p, &distribution(s, weights)?)?;
        write(out, c_string(rational::format(&h)), "out")
    })
}

/// Shannon entropy in bits of the same partition.
#[no_mangle]
pub unsafe extern "C" fn codd_shannon_entropy(
    n: u32,
    cells: *const u32,
    weights: *const u64,
    out: *mut f64,
) -> CoddStatus {
    guard(|| {
        let s = space(n)?;
        let p = Partition::from_keys(s, slice(cells, s.size(), "cells")?.iter().copied())?;
        write(out, shannon_entropy(&p, &distribution(s, weights)?)?, "out")
    })
}

/// Minimal expected depth of a decision tree computing `outputs[0..2^n]`,
/// as a "p/q" string; free with `codd_string_free`.
#[no_mangle]
pub unsafe extern "C" fn codd_optimal_depth(
    n: u32,
    outputs: *const u64,
    weights: *const u64,
    out: *mut *mut c_char,
) -> CoddStatus {
    guard(|| {
        let s = space(n)?;
        let lab = Labeling::new(s, slice(outputs, s.size(), "outputs")?.to_vec())?;
        let t = optimal_tree(&lab, &distribution(s, weights)?)?;
        write(out, c_string(rational::format(&t.average_depth)), "out")
    })
}
