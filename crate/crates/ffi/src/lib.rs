//! C interface. Rings are opaque handles; every call returns a [`TlStatus`]
//! and leaves a message for [`tl_last_error`] on failure. Strings handed out
//! by the library are released with [`tl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use trilocal::rings::Ring;
use trilocal::structure::{classify, count_triangulations, equivalence_classes, Case, LocalStructure};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidRing = 3,
    Unsupported = 4,
    Usage = 5,
    Violation = 6,
    Panic = 7,
}

/// Classification of a ring.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlCase {
    Semisimple = 0,
    Mixed = 1,
    Equicharacteristic = 2,
    None = 3,
}

/// Opaque ring handle.
pub struct TlRing {
    ring: Arc<Ring>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("no interior nul")));
}

fn guard(f: impl FnOnce() -> Result<(), (TlStatus, String)>) -> TlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TlStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (TlStatus, String)> {
    if p.is_null() {
        return Err((TlStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (TlStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn ring_arg<'a>(p: *const TlRing) -> Result<&'a TlRing, (TlStatus, String)> {
    p.as_ref().ok_or((TlStatus::NullArgument, "ring is null".into()))
}

fn out_arg<T>(p: *mut T) -> Result<(), (TlStatus, String)> {
    if p.is_null() {
        Err((TlStatus::NullArgument, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

fn local(ring: &Arc<Ring>) -> Result<LocalStructure, (TlStatus, String)> {
    LocalStructure::new(ring).map_err(|e| (TlStatus::Unsupported, e.to_string()))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn tl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a ring spec such as `"w2(4)"` or `"skewpoly(64; frob^2)"`.
///
/// # Safety
/// `spec` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_ring_new(spec: *const c_char, out: *mut *mut TlRing) -> TlStatus {
    guard(|| {
        out_arg(out)?;
        let spec = str_arg(spec, "spec")?;
        let ring = Ring::parse(spec).map_err(|e| (TlStatus::InvalidRing, e.to_string()))?;
        *out = Box::into_raw(Box::new(TlRing { ring }));
        Ok(())
    })
}

/// Releases a ring handle; null is ignored.
///
/// # Safety
/// `ring` came from [`tl_ring_new`] and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tl_ring_free(ring: *mut TlRing) {
    if !ring.is_null() {
        drop(Box::from_raw(ring));
    }
}

/// Number of elements.
///
/// # Safety
/// `ring` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_ring_size(ring: *const TlRing, out: *mut u64) -> TlStatus {
    guard(|| {
        out_arg(out)?;
        *out = ring_arg(ring)?.ring.size();
        Ok(())
    })
}

/// Canonical spec string; free with [`tl_string_free`].
///
/// # Safety
/// `ring` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_ring_spec(ring: *const TlRing, out: *mut *mut c_char) -> TlStatus {
    guard(|| {
        out_arg(out)?;
        let spec = ring_arg(ring)?.ring.spec().to_string();
        *out = CString::new(spec).expect("no interior nul").into_raw();
        Ok(())
    })
}

/// Case of the classification.
///
/// # Safety
/// `ring` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_ring_classify(ring: *const TlRing, out: *mut TlCase) -> TlStatus {
    guard(|| {
        out_arg(out)?;
        *out = match classify(&ring_arg(ring)?.ring).case {
            Case::Semisimple => TlCase::Semisimple,
            Case::Mixed => TlCase::Mixed,
            Case::Equicharacteristic => TlCase::Equicharacteristic,
            Case::None => TlCase::None,
        };
        Ok(())
    })
}

/// Number of triangulations.
///
/// # Safety
/// `ring` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_ring_count(ring: *const TlRing, out: *mut u64) -> TlStatus {
    guard(|| {
        out_arg(out)?;
        let ls = local(&ring_arg(ring)?.ring)?;
        *out = count_triangulations(&ls).map_err(|e| (TlStatus::Unsupported, e.to_string()))? as u64;
        Ok(())
    })
}

/// Number of equivalence classes of triangulations.
///
/// # Safety
/// `ring` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_ring_class_count(ring: *const TlRing, out: *mut u64) -> TlStatus {
    guard(|| {
        out_arg(out)?;
        let ls = local(&ring_arg(ring)?.ring)?;
        let n = match classify(ls.ring()).case {
            Case::None => 0,
            Case::Semisimple => 1,
            _ => equivalence_classes(&ls)
                .map_err(|e| (TlStatus::Unsupported, e.to_string()))?
                .len(),
        };
        *out = n as u64;
        Ok(())
    })
}

/// Runs one command-line invocation and returns its JSON report.
///
/// `argv` holds `argc` arguments after the program name, e.g.
/// `{"axioms", "--ring", "w2(4)"}`; `--format json` is appended. On
/// [`TlStatus::Ok`] and [`TlStatus::Violation`] (negative verdict or
/// violations) `*out` receives the report.
///
/// # Safety
/// `argv` points to `argc` nul-terminated strings; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_run_json(argc: c_int, argv: *const *const c_char, out: *mut *mut c_char) -> TlStatus {
    guard(|| {
        out_arg(out)?;
        *out = ptr::null_mut();
        if argc < 0 || (argc > 0 && argv.is_null()) {
            return Err((TlStatus::NullArgument, "argv is null".into()));
        }
        let mut args = vec!["trilocal".to_string()];
        for i in 0..argc as usize {
            args.push(str_arg(*argv.add(i), "argument")?.to_string());
        }
        args.extend(["--format".into(), "json".into()]);
        let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
        let code = trilocal::cli::run(args, &mut stdout, &mut stderr);
        match code {
            trilocal::cli::EXIT_OK | trilocal::cli::EXIT_VIOLATION => {
                let text = String::from_utf8(stdout).map_err(|_| (TlStatus::InvalidUtf8, "report".into()))?;
                *out = CString::new(text.trim_end()).expect("no interior nul").into_raw();
                if code == trilocal::cli::EXIT_OK {
                    Ok(())
                } else {
                    Err((TlStatus::Violation, "negative verdict or violations reported".into()))
                }
            }
            _ => Err((TlStatus::Usage, String::from_utf8_lossy(&stderr).trim().to_string())),
        }
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` came from this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
