//! C ABI over the memoryflow kernels, memory weights, scalar MSD solver and
//! free-space fundamental solution.
//!
//! Objects are opaque heap handles released with the matching `_free`.
//! Every call returns an [`MfStatus`]; on failure the message is available
//! from [`mf_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use memoryflow::freespace::{self, InversionContour};
use memoryflow::scalar_msd::{solve_scalar, HistorySignal};
use memoryflow::{build_weights, Error, KernelSpec, MemoryWeights};
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MfKernelFamily {
    NormalizedFractional = 0,
    TruncatedCaputo = 1,
}

/// Scalar history datum: `Zero`; `Affine` is `p0 (1 + 2t)`; `Step` is height
/// `p0` on `[p1, p2]`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MfHistoryKind {
    Zero = 0,
    Affine = 1,
    Step = 2,
}

/// Opaque memory kernel.
pub struct MfKernel(KernelSpec);

/// Opaque discrete memory weights.
pub struct MfWeights(MemoryWeights);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: MfStatus, msg: impl Into<String>) -> MfStatus {
    set_error(msg);
    status
}

fn from_error(err: Error) -> MfStatus {
    let status = match err {
        Error::Domain(_) => MfStatus::Domain,
        Error::Numerical(_) => MfStatus::Numerical,
        _ => MfStatus::InvalidArgument,
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> MfStatus) -> MfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == MfStatus::Ok {
                set_error("");
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(MfStatus::Panic, format!("panic: {msg}"))
        }
    }
}

macro_rules! deref {
    ($p:expr, $name:literal) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return fail(MfStatus::NullPointer, concat!($name, " is null")),
        }
    };
}

macro_rules! out {
    ($p:expr, $v:expr, $name:literal) => {{
        if $p.is_null() {
            return fail(MfStatus::NullPointer, concat!($name, " is null"));
        }
        unsafe { *$p = $v };
    }};
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return from_error(e),
        }
    };
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length excluding the NUL.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn mf_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Power-law kernel of the given family.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn mf_kernel_new(family: MfKernelFamily, alpha: f64, delta: f64, out: *mut *mut MfKernel) -> MfStatus {
    guard(|| {
        let spec = tri!(match family {
            MfKernelFamily::NormalizedFractional => KernelSpec::normalized_fractional(alpha, delta),
            MfKernelFamily::TruncatedCaputo => KernelSpec::truncated_caputo(alpha, delta),
        });
        out!(out, Box::into_raw(Box::new(MfKernel(spec))), "out");
        MfStatus::Ok
    })
}

/// Tabulated kernel from `n` samples `(s[i], rho[i])`, `s` strictly
/// increasing with the last sample at the horizon.
///
/// # Safety
/// `s` and `rho` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_kernel_new_tabulated(
    s: *const f64,
    rho: *const f64,
    n: usize,
    out: *mut *mut MfKernel,
) -> MfStatus {
    guard(|| {
        if s.is_null() || rho.is_null() {
            return fail(MfStatus::NullPointer, "sample arrays are null");
        }
        let (s, rho) = (std::slice::from_raw_parts(s, n), std::slice::from_raw_parts(rho, n));
        let spec = tri!(KernelSpec::tabulated(s.iter().copied().zip(rho.iter().copied()).collect()));
        out!(out, Box::into_raw(Box::new(MfKernel(spec))), "out");
        MfStatus::Ok
    })
}

/// # Safety
/// `kernel` must be null or a handle from `mf_kernel_new*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_kernel_free(kernel: *mut MfKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// # Safety
/// `kernel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_kernel_density(kernel: *const MfKernel, s: f64, out: *mut f64) -> MfStatus {
    guard(|| {
        let k = deref!(kernel, "kernel");
        out!(out, tri!(k.0.density(s)), "out");
        MfStatus::Ok
    })
}

/// # Safety
/// `kernel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_kernel_mass(kernel: *const MfKernel, out: *mut f64) -> MfStatus {
    guard(|| {
        let k = deref!(kernel, "kernel");
        out!(out, k.0.mass(), "out");
        MfStatus::Ok
    })
}

/// # Safety
/// `kernel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_kernel_first_moment(kernel: *const MfKernel, out: *mut f64) -> MfStatus {
    guard(|| {
        let k = deref!(kernel, "kernel");
        out!(out, k.0.first_moment(), "out");
        MfStatus::Ok
    })
}

/// Laplace symbol `K(z)` for `Re z > 0`.
///
/// # Safety
/// `kernel` must be a live handle; `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_kernel_symbol(
    kernel: *const MfKernel,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> MfStatus {
    guard(|| {
        let k = deref!(kernel, "kernel");
        let v = tri!(k.0.symbol_k(Complex64::new(re, im)));
        out!(out_re, v.re, "out_re");
        out!(out_im, v.im, "out_im");
        MfStatus::Ok
    })
}

/// Weights for step `tau`, which must divide the horizon.
///
/// # Safety
/// `kernel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_weights_new(kernel: *const MfKernel, tau: f64, out: *mut *mut MfWeights) -> MfStatus {
    guard(|| {
        let k = deref!(kernel, "kernel");
        let w = tri!(build_weights(&k.0, tau));
        out!(out, Box::into_raw(Box::new(MfWeights(w))), "out");
        MfStatus::Ok
    })
}

/// # Safety
/// `weights` must be null or a handle from `mf_weights_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_weights_free(weights: *mut MfWeights) {
    if !weights.is_null() {
        drop(Box::from_raw(weights));
    }
}

/// Memory depth `M`; 0 for a null handle.
///
/// # Safety
/// `weights` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_weights_len(weights: *const MfWeights) -> usize {
    weights.as_ref().map_or(0, |w| w.0.m)
}

/// `w_k` for `1 ≤ k ≤ M`; `k = 0` gives `W0 = Σ w_k`.
///
/// # Safety
/// `weights` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_weights_get(weights: *const MfWeights, k: usize, out: *mut f64) -> MfStatus {
    guard(|| {
        let w = deref!(weights, "weights");
        let v = match k {
            0 => w.0.w0,
            k if k <= w.0.m => w.0.weights[k - 1],
            k => return fail(MfStatus::InvalidArgument, format!("index {k} exceeds memory depth {}", w.0.m)),
        };
        out!(out, v, "out");
        MfStatus::Ok
    })
}

/// `W0·current − Σ w_k history[k-1]`, history most recent first, `len = M`.
///
/// # Safety
/// `history` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_weights_apply(
    weights: *const MfWeights,
    current: f64,
    history: *const f64,
    len: usize,
    out: *mut f64,
) -> MfStatus {
    guard(|| {
        let w = deref!(weights, "weights");
        if history.is_null() {
            return fail(MfStatus::NullPointer, "history is null");
        }
        let v = tri!(w.0.apply(current, std::slice::from_raw_parts(history, len)));
        out!(out, v, "out");
        MfStatus::Ok
    })
}

/// March `𝒢 m = rhs` to `t_end`, writing `m(0), m(τ), …` into `out`.
/// `written` receives the number of values; when `cap` is too small it
/// receives the required count and `BufferTooSmall` is returned.
///
/// # Safety
/// `out` must point to `cap` writable doubles (may be null when `cap` is 0);
/// `written` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn mf_msd_solve(
    weights: *const MfWeights,
    history: MfHistoryKind,
    p0: f64,
    p1: f64,
    p2: f64,
    rhs: f64,
    t_end: f64,
    out: *mut f64,
    cap: usize,
    written: *mut usize,
) -> MfStatus {
    guard(|| {
        let w = deref!(weights, "weights");
        if written.is_null() {
            return fail(MfStatus::NullPointer, "written is null");
        }
        let signal = match history {
            MfHistoryKind::Zero => HistorySignal::Zero,
            MfHistoryKind::Affine => HistorySignal::AffineScaled(p0),
            MfHistoryKind::Step => HistorySignal::Step { height: p0, t_on: p1, t_off: p2 },
        };
        let series = tri!(solve_scalar(&w.0, &signal, |_| rhs, t_end));
        let n = series.values.len();
        *written = n;
        if cap < n || out.is_null() {
            return fail(MfStatus::BufferTooSmall, format!("need room for {n} values, got {cap}"));
        }
        ptr::copy_nonoverlapping(series.values.as_ptr(), out, n);
        MfStatus::Ok
    })
}

/// Free-space fundamental solution `u(x, t)` by contour inversion with `nq`
/// nodes (0 selects the default).
///
/// # Safety
/// `kernel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_fundamental(kernel: *const MfKernel, x: f64, t: f64, nq: usize, out: *mut f64) -> MfStatus {
    guard(|| {
        let k = deref!(kernel, "kernel");
        let contour = if nq == 0 { InversionContour::default() } else { InversionContour::with_nodes(nq) };
        let inv = tri!(freespace::invert(&k.0, x, t, &contour));
        out!(out, inv.value, "out");
        MfStatus::Ok
    })
}
