//! C interface to the `dunkl` kernel evaluator.
//!
//! Kernels are opaque handles created by [`dunkl_kernel_new`] and released
//! with [`dunkl_kernel_free`]. Every fallible call returns a [`DunklStatus`];
//! the message of the last failure on the calling thread is available from
//! [`dunkl_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use dunkl::{DunklError, DunklKernel, Family, RootSystem};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DunklStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numeric = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DunklComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for DunklComplex {
    fn from(z: Complex64) -> Self {
        DunklComplex { re: z.re, im: z.im }
    }
}

/// Opaque kernel handle.
pub struct DunklKernelHandle {
    inner: DunklKernel,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

struct Failure(DunklStatus, String);

impl From<DunklError> for Failure {
    fn from(e: DunklError) -> Self {
        let status = if e.is_numeric() {
            DunklStatus::Numeric
        } else {
            DunklStatus::InvalidArgument
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DunklStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DunklStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DunklStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            DunklStatus::Panic
        }
    }
}

unsafe fn handle<'a>(h: *const DunklKernelHandle) -> Result<&'a DunklKernel, Failure> {
    h.as_ref().map(|h| &h.inner).ok_or_else(|| null("kernel"))
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(
    p: *mut DunklComplex,
    len: usize,
    need: usize,
) -> Result<&'a mut [DunklComplex], Failure> {
    if p.is_null() {
        return Err(null("out"));
    }
    if len < need {
        return Err(Failure(
            DunklStatus::BufferTooSmall,
            format!("output holds {len} values, group order is {need}"),
        ));
    }
    Ok(slice::from_raw_parts_mut(p, need))
}

/// Builds a kernel. `family` is one of `z2n`, `a2`, `b2`, `i2m`; `param` is
/// `n` for `z2n`, `m` for `i2m` and ignored otherwise. `k` holds one
/// multiplicity per root orbit.
///
/// # Safety
/// `family` must be a NUL-terminated string, `k` must point to `k_len`
/// doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dunkl_kernel_new(
    family: *const c_char,
    param: usize,
    k: *const f64,
    k_len: usize,
    out: *mut *mut DunklKernelHandle,
) -> DunklStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if family.is_null() {
            return Err(null("family"));
        }
        let name = CStr::from_ptr(family).to_str().map_err(|_| {
            Failure(DunklStatus::InvalidArgument, "family is not UTF-8".into())
        })?;
        let k = input(k, k_len, "k")?;
        let fam = Family::from_name(name, (param > 0).then_some(param))?;
        let ker = DunklKernel::new(RootSystem::build(fam, k)?)?;
        *out = Box::into_raw(Box::new(DunklKernelHandle { inner: ker }));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`dunkl_kernel_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dunkl_kernel_free(h: *mut DunklKernelHandle) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Order of the reflection group, 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dunkl_kernel_group_order(h: *const DunklKernelHandle) -> usize {
    h.as_ref().map_or(0, |h| h.inner.order())
}

/// Rank of the root system, 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dunkl_kernel_rank(h: *const DunklKernelHandle) -> usize {
    h.as_ref().map_or(0, |h| h.inner.rs.rank)
}

/// `γ_k`, NaN for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dunkl_kernel_gamma(h: *const DunklKernelHandle) -> f64 {
    h.as_ref().map_or(f64::NAN, |h| h.inner.rs.gamma_k())
}

/// `w_k(x)`.
///
/// # Safety
/// `x` must point to `rank` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dunkl_kernel_weight(
    h: *const DunklKernelHandle,
    x: *const f64,
    out: *mut f64,
) -> DunklStatus {
    guard(|| {
        let ker = handle(h)?;
        let x = input(x, ker.rs.rank, "x")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ker.rs.weight(x);
        Ok(())
    })
}

/// Writes `E_k(t x, g·y)` for every group element `g` into `out`.
///
/// # Safety
/// `x` and `y` must point to `rank` doubles, `out` to `out_len` values.
#[no_mangle]
pub unsafe extern "C" fn dunkl_kernel_eval(
    h: *const DunklKernelHandle,
    x: *const f64,
    y: *const f64,
    t: f64,
    out: *mut DunklComplex,
    out_len: usize,
) -> DunklStatus {
    guard(|| {
        let ker = handle(h)?;
        let x = input(x, ker.rs.rank, "x")?;
        let y: Vec<Complex64> = input(y, ker.rs.rank, "y")?
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        let out = output(out, out_len, ker.order())?;
        let values = ker.eval_orbit(x, &y, t)?.values();
        for (o, v) in out.iter_mut().zip(values.iter()) {
            *o = (*v).into();
        }
        Ok(())
    })
}

/// Writes `E_k(i t x, g·y)` for every group element `g` into `out`.
///
/// # Safety
/// `x` and `y` must point to `rank` doubles, `out` to `out_len` values.
#[no_mangle]
pub unsafe extern "C" fn dunkl_kernel_eval_imaginary(
    h: *const DunklKernelHandle,
    x: *const f64,
    y: *const f64,
    t: f64,
    out: *mut DunklComplex,
    out_len: usize,
) -> DunklStatus {
    guard(|| {
        let ker = handle(h)?;
        let x = input(x, ker.rs.rank, "x")?;
        let y = input(y, ker.rs.rank, "y")?;
        let out = output(out, out_len, ker.order())?;
        let values = ker.eval_imaginary(x, y, t)?;
        for (o, v) in out.iter_mut().zip(values.iter()) {
            *o = (*v).into();
        }
        Ok(())
    })
}

/// Copies the last error message of this thread into `buf` (truncated and
/// NUL-terminated) and returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn dunkl_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}
