//! C interface to the dimension routines.
//!
//! Classes cross the boundary as opaque handles built from the same JSON
//! class files the command line reads. Every call returns a status code;
//! on failure a message is kept per thread and can be fetched with
//! [`cmp_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use comparative::dimensions::{self, DimensionResult};
use comparative::io::{parse_bin_class, parse_real_class};
use comparative::{BinClass, Error, RealClass};

/// Status returned by every function. Positive values mirror the library's
/// error codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpStatus {
    Ok = 0,
    Invalid = 1,
    Guard = 2,
    EmptyClass = 3,
    NoConsistentHypothesis = 4,
    EnumerationCap = 5,
    RetryCap = 6,
    Json = 7,
    Io = 8,
    Csv = 9,
    NullPointer = 100,
    Utf8 = 101,
    Panic = 102,
}

impl From<&Error> for CmpStatus {
    fn from(e: &Error) -> Self {
        match e.code() {
            1 => CmpStatus::Invalid,
            2 => CmpStatus::Guard,
            3 => CmpStatus::EmptyClass,
            4 => CmpStatus::NoConsistentHypothesis,
            5 => CmpStatus::EnumerationCap,
            6 => CmpStatus::RetryCap,
            7 => CmpStatus::Json,
            8 => CmpStatus::Io,
            _ => CmpStatus::Csv,
        }
    }
}

/// Opaque handle to a binary hypothesis class.
pub struct CmpBinClass(BinClass);

/// Opaque handle to a real-valued hypothesis class.
pub struct CmpRealClass(RealClass);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(CmpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(CmpStatus::from(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CmpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CmpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CmpStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(
            CmpStatus::NullPointer,
            "null string argument".into(),
        ));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(CmpStatus::Utf8, e.to_string()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(CmpStatus::NullPointer, "null class handle".into()))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(
            CmpStatus::NullPointer,
            "null output pointer".into(),
        ));
    }
    out.write(v);
    Ok(())
}

/// Dimension value, or -1 when the class (or agreement class) is empty.
fn value(r: DimensionResult) -> i64 {
    r.value.map_or(-1, |v| v as i64)
}

/// Message for the most recent failed call on this thread, or NULL. The
/// pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn cmp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a binary class from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmp_bin_class_from_json(
    json: *const c_char,
    out: *mut *mut CmpBinClass,
) -> CmpStatus {
    guard(|| {
        let c = parse_bin_class(str_arg(json)?)?;
        write_out(out, Box::into_raw(Box::new(CmpBinClass(c))))
    })
}

/// Parses a real-valued class from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmp_real_class_from_json(
    json: *const c_char,
    out: *mut *mut CmpRealClass,
) -> CmpStatus {
    guard(|| {
        let c = parse_real_class(str_arg(json)?)?;
        write_out(out, Box::into_raw(Box::new(CmpRealClass(c))))
    })
}

/// # Safety
/// `c` must be NULL or a handle from [`cmp_bin_class_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cmp_bin_class_free(c: *mut CmpBinClass) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be NULL or a handle from [`cmp_real_class_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cmp_real_class_free(c: *mut CmpRealClass) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Writes the domain size and member count of a binary class.
///
/// # Safety
/// `c` must be a live handle; `domain` and `members` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cmp_bin_class_shape(
    c: *const CmpBinClass,
    domain: *mut usize,
    members: *mut usize,
) -> CmpStatus {
    guard(|| {
        let c = &handle(c)?.0;
        write_out(domain, c.n())?;
        write_out(members, c.len())
    })
}

/// VC dimension of a binary class.
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmp_vc(c: *const CmpBinClass, out: *mut i64) -> CmpStatus {
    guard(|| write_out(out, value(dimensions::vc(&handle(c)?.0)?)))
}

/// Mutual VC dimension of two binary classes on the same domain.
///
/// # Safety
/// `s` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmp_mutual_vc(
    s: *const CmpBinClass,
    b: *const CmpBinClass,
    out: *mut i64,
) -> CmpStatus {
    guard(|| {
        write_out(
            out,
            value(dimensions::mutual_vc(&handle(s)?.0, &handle(b)?.0)?),
        )
    })
}

/// Littlestone dimension of a binary class.
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmp_ldim(c: *const CmpBinClass, out: *mut i64) -> CmpStatus {
    guard(|| write_out(out, value(dimensions::ldim(&handle(c)?.0)?)))
}

/// Mutual Littlestone dimension of two binary classes.
///
/// # Safety
/// `s` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmp_mutual_ldim(
    s: *const CmpBinClass,
    b: *const CmpBinClass,
    out: *mut i64,
) -> CmpStatus {
    guard(|| {
        write_out(
            out,
            value(dimensions::mutual_ldim(&handle(s)?.0, &handle(b)?.0)?),
        )
    })
}

/// Mutual fat-shattering dimension at margin `eta`.
///
/// # Safety
/// `s` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmp_mutual_fat(
    s: *const CmpRealClass,
    b: *const CmpRealClass,
    eta: f64,
    out: *mut i64,
) -> CmpStatus {
    guard(|| {
        write_out(
            out,
            value(dimensions::mutual_fat(&handle(s)?.0, &handle(b)?.0, eta)?),
        )
    })
}
