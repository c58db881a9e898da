//! C ABI over `wonder-core`.
//!
//! Diagrams and rings are opaque handles created by `wonder_*` constructors and
//! released with the matching `*_free`. Every fallible call returns a
//! [`WonderStatus`]; the message of the last failure on the calling thread is
//! available from [`wonder_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wonder_core::algebra::pd_of;
use wonder_core::diagram::BurrowDiagram;
use wonder_core::engine::{build_ring, EngineOptions, WonderRing as CoreRing};
use wonder_core::format::{diagram_from_str, ring_to_string};
use wonder_core::models::{fm_power, keel_model, DiagonalFlag, Fiber};
use wonder_core::Error;

/// Status codes; the first four match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WonderStatus {
    Ok = 0,
    Input = 1,
    Computation = 2,
    Invariant = 3,
    NullArgument = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Opaque diagram handle.
pub struct WonderDiagram(BurrowDiagram);

/// Opaque ring handle.
pub struct WonderRing(CoreRing);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(e: &Error) -> WonderStatus {
    set_error(&e.to_string());
    match e.exit_code() {
        2 => WonderStatus::Computation,
        3 => WonderStatus::Invariant,
        _ => WonderStatus::Input,
    }
}

fn guard(f: impl FnOnce() -> WonderStatus) -> WonderStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == WonderStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => {
            set_error("internal panic");
            WonderStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Option<&'a str> {
    if p.is_null() {
        return None;
    }
    CStr::from_ptr(p).to_str().ok()
}

/// Message of the last failure on this thread (empty after a success). The
/// pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn wonder_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a diagram file (`wonder-diagram/1` JSON) and validates it.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wonder_diagram_from_json(text: *const c_char, out: *mut *mut WonderDiagram) -> WonderStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return WonderStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let Some(text) = str_arg(text) else {
            set_error("input is null or not UTF-8");
            return WonderStatus::NullArgument;
        };
        let d = match diagram_from_str(text) {
            Ok(d) => d,
            Err(e) => return fail(&e),
        };
        let report = d.validate();
        if !report.passed() {
            set_error(&report.summary());
            return WonderStatus::Input;
        }
        *out = Box::into_raw(Box::new(WonderDiagram(d)));
        WonderStatus::Ok
    })
}

/// Built-in models: `"fm-p1"`, `"fm-p2"`, `"fm-curve"` (diagonals of size >= 2)
/// and `"keel"`.
///
/// # Safety
/// `kind` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wonder_diagram_model(kind: *const c_char, n: u32, out: *mut *mut WonderDiagram) -> WonderStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return WonderStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let Some(kind) = str_arg(kind) else {
            set_error("model kind is null or not UTF-8");
            return WonderStatus::NullArgument;
        };
        let n = n as usize;
        let d = match kind {
            "fm-p1" => fm_power(Fiber::P1, n, DiagonalFlag::AtLeastTwo),
            "fm-p2" => fm_power(Fiber::P2, n, DiagonalFlag::AtLeastTwo),
            "fm-curve" => fm_power(Fiber::Curve, n, DiagonalFlag::AtLeastTwo),
            "keel" => keel_model(n),
            other => Err(Error::Invalid(format!("unknown model `{other}`"))),
        };
        match d {
            Ok(d) => {
                *out = Box::into_raw(Box::new(WonderDiagram(d)));
                WonderStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `d` must come from a `wonder_diagram_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wonder_diagram_free(d: *mut WonderDiagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Builds the ring; `max_rewrites = 0` selects the default cap.
///
/// # Safety
/// `d` must be a live diagram handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wonder_ring_build(
    d: *const WonderDiagram,
    max_rewrites: usize,
    out: *mut *mut WonderRing,
) -> WonderStatus {
    guard(|| {
        if out.is_null() || d.is_null() {
            set_error("null argument");
            return WonderStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let mut opts = EngineOptions::default();
        if max_rewrites > 0 {
            opts.max_rewrites = max_rewrites;
        }
        match build_ring(&(*d).0, opts) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(WonderRing(r)));
                WonderStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `r` must come from [`wonder_ring_build`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wonder_ring_free(r: *mut WonderRing) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Writes the dimension vector into `buf` (capacity `cap`) and its length into
/// `len`. With a short buffer only `len` is set and `BufferTooSmall` returned.
///
/// # Safety
/// `r` must be a live ring handle, `len` valid, `buf` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn wonder_ring_dims(
    r: *const WonderRing,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> WonderStatus {
    guard(|| {
        if r.is_null() || len.is_null() {
            set_error("null argument");
            return WonderStatus::NullArgument;
        }
        let dims = (*r).0.dims();
        *len = dims.len();
        if cap < dims.len() || buf.is_null() {
            set_error(&format!("buffer holds {cap} entries, {} needed", dims.len()));
            return WonderStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(dims.as_ptr(), buf, dims.len());
        WonderStatus::Ok
    })
}

/// Sets `*out` to 1 when the ring has Poincaré duality at the diagram's socle
/// degree, else 0.
///
/// # Safety
/// `r` must be a live ring handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wonder_ring_is_pd(r: *const WonderRing, out: *mut i32) -> WonderStatus {
    guard(|| {
        if r.is_null() || out.is_null() {
            set_error("null argument");
            return WonderStatus::NullArgument;
        }
        let ring = &(*r).0;
        let pd = pd_of(ring.algebra(), ring.diagram().socle_degree).map(|v| v.is_pd).unwrap_or(false);
        *out = i32::from(pd);
        WonderStatus::Ok
    })
}

/// Serializes the ring (`wonder-ring/1` JSON). Release the string with
/// [`wonder_string_free`].
///
/// # Safety
/// `r` must be a live ring handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wonder_ring_to_json(r: *const WonderRing, out: *mut *mut c_char) -> WonderStatus {
    guard(|| {
        if r.is_null() || out.is_null() {
            set_error("null argument");
            return WonderStatus::NullArgument;
        }
        let text = ring_to_string(&(*r).0.to_ring_data());
        *out = CString::new(text).map(CString::into_raw).unwrap_or(ptr::null_mut());
        WonderStatus::Ok
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wonder_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
