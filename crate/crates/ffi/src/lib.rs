//! C ABI for constructing and certifying exceptional collections.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free` function. Every fallible call returns an
//! [`ExcolStatus`]; on failure [`excol_last_error`] describes what went
//! wrong on the calling thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use excol::mutation::{Collection, Engine, MutationError, SheafObject};
use excol::oracle::{cohomology_dims, DiskCache};
use excol::toric::{BundleSpec, CenterSpec, Fan, PicBasis, PicClass};
use excol::verify::{certify, Report};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExcolStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidSpec = 3,
    InvalidCenter = 4,
    HypothesisFailed = 5,
    InvalidJson = 6,
    NotLineBundles = 7,
    OutOfRange = 8,
    BufferTooSmall = 9,
    Internal = 10,
}

/// Object kinds reported by [`excol_collection_object`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExcolObjectKind {
    Line = 0,
    Push = 1,
}

/// One entry of a collection: `f^*O(alpha, beta) (x) O(kE)` for a line
/// bundle, `i_*pi^*O_Y(alpha, beta) (x) O(kE)` for a pushforward.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExcolObject {
    pub kind: ExcolObjectKind,
    pub alpha: i64,
    pub beta: i64,
    pub k: i64,
}

/// Verdicts of a certification.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExcolFlags {
    pub exceptional: bool,
    pub semiorthogonal: bool,
    pub strong: bool,
    pub gram_unimodular: bool,
    pub length_ok: bool,
    pub length_expected: usize,
    pub length_actual: usize,
    pub violations: usize,
}

/// Opaque ordered collection with its mutation log.
pub struct ExcolCollection {
    inner: Collection,
}

/// Opaque certification report.
pub struct ExcolReport {
    inner: Report,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: ExcolStatus, msg: impl Into<String>) -> ExcolStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> ExcolStatus) -> ExcolStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(ExcolStatus::Internal, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, ExcolStatus> {
    if p.is_null() {
        return Err(fail(ExcolStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(ExcolStatus::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn read_spec(
    base_dim: usize,
    degrees: *const i64,
    n_degrees: usize,
) -> Result<BundleSpec, ExcolStatus> {
    if degrees.is_null() && n_degrees > 0 {
        return Err(fail(ExcolStatus::NullPointer, "null fiber degree array"));
    }
    let degs = if n_degrees == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(degrees, n_degrees).to_vec()
    };
    BundleSpec::new(base_dim, degs).map_err(|e| fail(ExcolStatus::InvalidSpec, e.to_string()))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn excol_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn excol_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the collection for `P_{P^base_dim}(O(a_0) + ... + O(a_r))` blown
/// up along the comma-separated rays in `center`. Set `use_cache` to read
/// and write the on-disk cohomology cache (`EXCOL_CACHE_DIR`).
///
/// On `EXCOL_STATUS_HYPOTHESIS_FAILED`, `*out` may still receive the
/// partial collection with its log.
#[no_mangle]
pub unsafe extern "C" fn excol_construct(
    base_dim: usize,
    fiber_degrees: *const i64,
    n_degrees: usize,
    center: *const c_char,
    use_cache: bool,
    out: *mut *mut ExcolCollection,
) -> ExcolStatus {
    guard(|| {
        if out.is_null() {
            return fail(ExcolStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let spec = match read_spec(base_dim, fiber_degrees, n_degrees) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let center = match read_str(center) {
            Ok(c) => CenterSpec::parse(c),
            Err(s) => return s,
        };
        let cache = use_cache.then(DiskCache::from_env);
        let engine = match Engine::with_cache(&spec, &center, cache) {
            Ok(e) => e,
            Err(e) => return fail(ExcolStatus::InvalidCenter, e.to_string()),
        };
        match engine.construct() {
            Ok(col) => {
                *out = Box::into_raw(Box::new(ExcolCollection { inner: col }));
                ExcolStatus::Ok
            }
            Err(f) => {
                let status = match f.error {
                    MutationError::Fan(_) | MutationError::WrongCodimension(..) => {
                        ExcolStatus::InvalidCenter
                    }
                    _ => ExcolStatus::HypothesisFailed,
                };
                if let Some(p) = f.partial {
                    *out = Box::into_raw(Box::new(ExcolCollection { inner: p }));
                }
                fail(status, f.error.to_string())
            }
        }
    })
}

/// Parses a collection from its JSON form.
#[no_mangle]
pub unsafe extern "C" fn excol_collection_from_json(
    json: *const c_char,
    out: *mut *mut ExcolCollection,
) -> ExcolStatus {
    guard(|| {
        if out.is_null() {
            return fail(ExcolStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Collection::from_json(text) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(ExcolCollection { inner: c }));
                ExcolStatus::Ok
            }
            Err(e) => fail(ExcolStatus::InvalidJson, e.to_string()),
        }
    })
}

/// JSON form of a collection; free with [`excol_string_free`]. NULL on a null handle.
#[no_mangle]
pub unsafe extern "C" fn excol_collection_to_json(col: *const ExcolCollection) -> *mut c_char {
    match col.as_ref() {
        Some(c) => into_c_string(c.inner.to_json()),
        None => ptr::null_mut(),
    }
}

/// Number of objects; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn excol_collection_len(col: *const ExcolCollection) -> usize {
    col.as_ref().map_or(0, |c| c.inner.len())
}

/// Number of applied rules in the mutation log; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn excol_collection_log_len(col: *const ExcolCollection) -> usize {
    col.as_ref().map_or(0, |c| c.inner.log.len())
}

/// Reads object `index` into `*out`.
#[no_mangle]
pub unsafe extern "C" fn excol_collection_object(
    col: *const ExcolCollection,
    index: usize,
    out: *mut ExcolObject,
) -> ExcolStatus {
    guard(|| {
        let (Some(c), false) = (col.as_ref(), out.is_null()) else {
            return fail(ExcolStatus::NullPointer, "null handle or output pointer");
        };
        let Some(obj) = c.inner.objects.get(index) else {
            return fail(
                ExcolStatus::OutOfRange,
                format!("index {index} out of range"),
            );
        };
        let (alpha, beta) = obj.alpha_beta();
        let kind = match obj {
            SheafObject::Line { .. } => ExcolObjectKind::Line,
            SheafObject::Push { .. } => ExcolObjectKind::Push,
        };
        *out = ExcolObject {
            kind,
            alpha,
            beta,
            k: obj.k(),
        };
        ExcolStatus::Ok
    })
}

/// Swaps objects `index` and `index + 1` without any check (for negative
/// controls).
#[no_mangle]
pub unsafe extern "C" fn excol_collection_swap(
    col: *mut ExcolCollection,
    index: usize,
) -> ExcolStatus {
    guard(|| {
        let Some(c) = col.as_mut() else {
            return fail(ExcolStatus::NullPointer, "null handle");
        };
        if index + 1 >= c.inner.len() {
            return fail(
                ExcolStatus::OutOfRange,
                format!("index {index} out of range"),
            );
        }
        c.inner.objects.swap(index, index + 1);
        ExcolStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn excol_collection_free(col: *mut ExcolCollection) {
    if !col.is_null() {
        drop(Box::from_raw(col));
    }
}

/// Certifies a collection of line bundles on its own blow-up.
#[no_mangle]
pub unsafe extern "C" fn excol_verify(
    col: *const ExcolCollection,
    use_cache: bool,
    out: *mut *mut ExcolReport,
) -> ExcolStatus {
    guard(|| {
        let (Some(c), false) = (col.as_ref(), out.is_null()) else {
            return fail(ExcolStatus::NullPointer, "null handle or output pointer");
        };
        *out = ptr::null_mut();
        let engine = match Engine::for_collection(&c.inner, use_cache.then(DiskCache::from_env)) {
            Ok(e) => e,
            Err(e) => return fail(ExcolStatus::InvalidCenter, e.to_string()),
        };
        match certify(&engine.oracle, &c.inner, engine.blow.expected_length()) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(ExcolReport { inner: r }));
                ExcolStatus::Ok
            }
            Err(e) => fail(ExcolStatus::NotLineBundles, e.to_string()),
        }
    })
}

/// Copies the verdicts into `*out`.
#[no_mangle]
pub unsafe extern "C" fn excol_report_flags(
    report: *const ExcolReport,
    out: *mut ExcolFlags,
) -> ExcolStatus {
    guard(|| {
        let (Some(r), false) = (report.as_ref(), out.is_null()) else {
            return fail(ExcolStatus::NullPointer, "null handle or output pointer");
        };
        let r = &r.inner;
        *out = ExcolFlags {
            exceptional: r.exceptional,
            semiorthogonal: r.semiorthogonal,
            strong: r.strong,
            gram_unimodular: r.gram_unimodular,
            length_ok: r.length_ok,
            length_expected: r.length_expected,
            length_actual: r.length_actual,
            violations: r.violations.len(),
        };
        ExcolStatus::Ok
    })
}

/// True iff every check passed; false for a null handle.
#[no_mangle]
pub unsafe extern "C" fn excol_report_all_pass(report: *const ExcolReport) -> bool {
    report.as_ref().is_some_and(|r| r.inner.all_pass())
}

/// JSON form of a report; free with [`excol_string_free`].
#[no_mangle]
pub unsafe extern "C" fn excol_report_to_json(report: *const ExcolReport) -> *mut c_char {
    match report.as_ref() {
        Some(r) => into_c_string(r.inner.to_json()),
        None => ptr::null_mut(),
    }
}

#[no_mangle]
pub unsafe extern "C" fn excol_report_free(report: *mut ExcolReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Dimensions `h^0..h^n` of a line bundle, written to `dims[0..=n]` with
/// `*len = n + 1`.
///
/// With `center` NULL the variety is the bundle itself and `coords` is
/// `(alpha, beta)`; otherwise it is the blow-up and `coords` is
/// `(alpha, beta, k)`. If `capacity` is too small, `*len` still receives the
/// required size and `EXCOL_STATUS_BUFFER_TOO_SMALL` is returned.
#[no_mangle]
pub unsafe extern "C" fn excol_cohomology(
    base_dim: usize,
    fiber_degrees: *const i64,
    n_degrees: usize,
    center: *const c_char,
    coords: *const i64,
    n_coords: usize,
    dims: *mut u64,
    capacity: usize,
    len: *mut usize,
) -> ExcolStatus {
    guard(|| {
        if coords.is_null() || len.is_null() || (dims.is_null() && capacity > 0) {
            return fail(ExcolStatus::NullPointer, "null argument");
        }
        let spec = match read_spec(base_dim, fiber_degrees, n_degrees) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let (fan, basis): (Fan, PicBasis) = if center.is_null() {
            match Fan::projective_bundle(&spec) {
                Ok(f) => (f, PicBasis::Bundle),
                Err(e) => return fail(ExcolStatus::InvalidSpec, e.to_string()),
            }
        } else {
            let c = match read_str(center) {
                Ok(c) => CenterSpec::parse(c),
                Err(s) => return s,
            };
            match Engine::new(&spec, &c) {
                Ok(e) => (e.blow.fan, PicBasis::BlowUp),
                Err(e) => return fail(ExcolStatus::InvalidCenter, e.to_string()),
            }
        };
        if n_coords != basis.rank() {
            return fail(
                ExcolStatus::OutOfRange,
                format!("expected {} coordinates, got {n_coords}", basis.rank()),
            );
        }
        let cls = PicClass::new(basis, std::slice::from_raw_parts(coords, n_coords).to_vec());
        let h = match cohomology_dims(&fan, &cls) {
            Ok(h) => h,
            Err(e) => return fail(ExcolStatus::Internal, e.to_string()),
        };
        *len = h.len();
        if capacity < h.len() {
            return fail(
                ExcolStatus::BufferTooSmall,
                format!("need {} entries", h.len()),
            );
        }
        ptr::copy_nonoverlapping(h.0.as_ptr(), dims, h.len());
        ExcolStatus::Ok
    })
}
