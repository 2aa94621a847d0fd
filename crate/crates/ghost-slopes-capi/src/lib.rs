//! C ABI for the ghost-slopes library.
//!
//! Conventions:
//! - The context is an opaque handle created by [`gs_ctx_new`] and released by
//!   [`gs_ctx_free`]. A handle is safe to share across threads.
//! - Every fallible function returns a `GsStatus` code; `GS_OK` (0) means
//!   success. On failure, [`gs_last_error`] returns a thread-local,
//!   NUL-terminated message valid until the next failing call on that thread.
//! - Slopes are exact rationals, returned as parallel numerator/denominator
//!   arrays via a caller-allocated buffer. Call with `cap = 0` to query the
//!   required length (reported through `len`, status `GS_BUFFER_TOO_SMALL`).

use ghost_slopes::context::Ctx;
use ghost_slopes::dims::{self, CharIndex, GhostParams};
use ghost_slopes::newton;
use ghost_slopes::slopes_algo::{self, CompatFlags};
use ghost_slopes::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStatus {
    GsOk = 0,
    GsInvalidParam = 1,
    GsDomain = 2,
    GsUncertifiedTruncation = 3,
    GsMissingDimension = 4,
    GsInvariant = 5,
    GsParse = 6,
    GsIo = 7,
    GsNullPointer = 8,
    GsBufferTooSmall = 9,
    GsPanic = 10,
}

/// Opaque computation context (parameters plus memo caches).
pub struct GsCtx {
    ctx: Ctx,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn status_of(err: &Error) -> GsStatus {
    match err {
        Error::InvalidParam(_) => GsStatus::GsInvalidParam,
        Error::Domain(_) => GsStatus::GsDomain,
        Error::UncertifiedTruncation(_) => GsStatus::GsUncertifiedTruncation,
        Error::MissingDimension(_) => GsStatus::GsMissingDimension,
        Error::Invariant(_) => GsStatus::GsInvariant,
        Error::Parse(_) => GsStatus::GsParse,
        Error::Io(_) => GsStatus::GsIo,
    }
}

fn fail(err: &Error) -> GsStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn guarded(f: impl FnOnce() -> GsStatus) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            GsStatus::GsPanic
        }
    }
}

/// Last error message for this thread; empty string if none. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Create a context for parameters (p, a, b). On success writes the handle to
/// `out`; free it with [`gs_ctx_free`].
#[no_mangle]
pub extern "C" fn gs_ctx_new(p: i64, a: i64, b: i64, out: *mut *mut GsCtx) -> GsStatus {
    gs_ctx_new_with_flags(p, a, b, 0, 0, out)
}

/// Like [`gs_ctx_new`] with explicit compatibility flags (nonzero = on):
/// `case3_printed_b` uses the printed case-3 constant, `case3_branch_a_printed`
/// the printed branch-(a) truncation length.
#[no_mangle]
pub extern "C" fn gs_ctx_new_with_flags(
    p: i64,
    a: i64,
    b: i64,
    case3_printed_b: u8,
    case3_branch_a_printed: u8,
    out: *mut *mut GsCtx,
) -> GsStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return GsStatus::GsNullPointer;
    }
    guarded(|| match GhostParams::new(p, a, b) {
        Ok(params) => {
            let flags = CompatFlags {
                case3_printed_b: case3_printed_b != 0,
                case3_branch_a_printed: case3_branch_a_printed != 0,
            };
            let handle = Box::new(GsCtx {
                ctx: Ctx::with_flags(params, flags),
            });
            unsafe { *out = Box::into_raw(handle) };
            GsStatus::GsOk
        }
        Err(e) => fail(&e),
    })
}

/// Release a context handle. A null handle is a no-op.
#[no_mangle]
pub extern "C" fn gs_ctx_free(handle: *mut GsCtx) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

unsafe fn deref<'a>(handle: *const GsCtx) -> Option<&'a GsCtx> {
    handle.as_ref()
}

/// Dimensions at weight k for character index s_eps. `new_dim` receives -1
/// when k is outside the character's congruence class.
#[no_mangle]
pub extern "C" fn gs_dims(
    handle: *const GsCtx,
    s_eps: i64,
    k: i64,
    ur: *mut u64,
    iw: *mut u64,
    new_dim: *mut i64,
) -> GsStatus {
    if handle.is_null() || ur.is_null() || iw.is_null() || new_dim.is_null() {
        set_error("null pointer argument");
        return GsStatus::GsNullPointer;
    }
    guarded(|| {
        let h = unsafe { deref(handle) }.unwrap();
        let char = match CharIndex::new(&h.ctx.params, s_eps) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        match dims::dim_triple(&h.ctx.params, char, k) {
            Ok(t) => {
                unsafe {
                    *ur = t.ur;
                    *iw = t.iw;
                    *new_dim = t.new.map(|n| n as i64).unwrap_or(-1);
                }
                GsStatus::GsOk
            }
            Err(e) => fail(&e),
        }
    })
}

fn write_slopes(
    slopes: &[ghost_slopes::Rat],
    num: *mut i64,
    den: *mut i64,
    cap: usize,
    len: *mut usize,
) -> GsStatus {
    unsafe { *len = slopes.len() };
    if slopes.len() > cap {
        set_error("buffer too small; required length is in *len");
        return GsStatus::GsBufferTooSmall;
    }
    if !slopes.is_empty() && (num.is_null() || den.is_null()) {
        set_error("num/den pointer is null");
        return GsStatus::GsNullPointer;
    }
    for (i, r) in slopes.iter().enumerate() {
        unsafe {
            *num.add(i) = *r.numer();
            *den.add(i) = *r.denom();
        }
    }
    GsStatus::GsOk
}

/// Slope sequence at in-class weight k by the recursive algorithm, length
/// dim_ur(k). Two-call protocol: pass `cap = 0` to learn the length.
#[no_mangle]
pub extern "C" fn gs_recursive_slopes(
    handle: *const GsCtx,
    s_eps: i64,
    k: i64,
    num: *mut i64,
    den: *mut i64,
    cap: usize,
    len: *mut usize,
) -> GsStatus {
    if handle.is_null() || len.is_null() {
        set_error("null pointer argument");
        return GsStatus::GsNullPointer;
    }
    guarded(|| {
        let h = unsafe { deref(handle) }.unwrap();
        let char = match CharIndex::new(&h.ctx.params, s_eps) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        match slopes_algo::variant_slopes(&h.ctx, char, k) {
            Ok(s) => write_slopes(&s.0, num, den, cap, len),
            Err(e) => fail(&e),
        }
    })
}

/// First `count` Newton-polygon slopes of the ghost series at evaluation
/// weight k. Two-call protocol as in [`gs_recursive_slopes`].
#[no_mangle]
pub extern "C" fn gs_np_slopes(
    handle: *const GsCtx,
    s_eps: i64,
    k: i64,
    count: u64,
    num: *mut i64,
    den: *mut i64,
    cap: usize,
    len: *mut usize,
) -> GsStatus {
    if handle.is_null() || len.is_null() {
        set_error("null pointer argument");
        return GsStatus::GsNullPointer;
    }
    guarded(|| {
        let h = unsafe { deref(handle) }.unwrap();
        let char = match CharIndex::new(&h.ctx.params, s_eps) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        if count == 0 {
            unsafe { *len = 0 };
            return GsStatus::GsOk;
        }
        match newton::np_slopes(&h.ctx, char, k, count) {
            Ok(s) => write_slopes(&s.0, num, den, cap, len),
            Err(e) => fail(&e),
        }
    })
}
