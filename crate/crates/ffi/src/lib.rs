//! C ABI over `proxrank2`.
//!
//! Specs and diagrams cross the boundary as opaque handles owned by the caller and
//! released with the matching `_free`. Every call returns a [`Prx2Status`]; on failure
//! the message is available from [`prx2_last_error`] until the next call on the thread.
//! Strings returned through `char **` are released with [`prx2_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use proxrank2::bratteli::{self, ExportFormat, FinitePath, OrderedBratteliDiagram};
use proxrank2::covering::{gen_family, CoveringSpec, FamilyTag};
use proxrank2::measures::{classify_ergodicity, Verdict};
use proxrank2::Error;

/// Result of every exported call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prx2Status {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    LevelOutOfRange = 4,
    ExpansionTooLarge = 5,
    Overflow = 6,
    BufferTooSmall = 7,
    TruncatedMaximal = 8,
    NotReducedForm = 9,
    NotRank2Proximal = 10,
    Panic = 99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prx2Verdict {
    UniquelyErgodic = 0,
    TwoErgodic = 1,
    Undetermined = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prx2Format {
    Json = 0,
    Dot = 1,
}

/// Opaque covering spec.
pub struct Prx2Spec(CoveringSpec);

/// Opaque ordered Bratteli diagram.
pub struct Prx2Diagram(OrderedBratteliDiagram);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> Prx2Status {
    match e {
        Error::LevelOutOfRange { .. } | Error::InvalidLevels { .. } => Prx2Status::LevelOutOfRange,
        Error::ExpansionTooLarge { .. } => Prx2Status::ExpansionTooLarge,
        Error::Overflow(_) => Prx2Status::Overflow,
        Error::TruncatedMaximal => Prx2Status::TruncatedMaximal,
        Error::NotReducedForm(_) => Prx2Status::NotReducedForm,
        Error::NotRank2Proximal(_) => Prx2Status::NotRank2Proximal,
        _ => Prx2Status::InvalidInput,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (Prx2Status, String)>) -> Prx2Status {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => Prx2Status::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            Prx2Status::Panic
        }
    }
}

fn lib(e: Error) -> (Prx2Status, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (Prx2Status, String) {
    (Prx2Status::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (Prx2Status, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (Prx2Status::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out_string(out: *mut *mut c_char, s: String) -> Result<(), (Prx2Status, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|_| (Prx2Status::InvalidInput, "string holds NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn prx2_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn prx2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prx2_spec_from_json(json: *const c_char, out: *mut *mut Prx2Spec) -> Prx2Status {
    guard(|| {
        let text = str_arg(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = CoveringSpec::from_json(text).map_err(lib)?;
        *out = Box::into_raw(Box::new(Prx2Spec(spec)));
        Ok(())
    })
}

/// Generated family `tag` with default parameters and `depth` maps (0 keeps the default depth).
///
/// # Safety
/// `tag` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prx2_spec_family(tag: *const c_char, depth: u32, out: *mut *mut Prx2Spec) -> Prx2Status {
    guard(|| {
        let tag: FamilyTag = str_arg(tag, "tag")?.parse().map_err(lib)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let params = if depth == 0 { serde_json::json!({}) } else { serde_json::json!({ "depth": depth }) };
        let spec = gen_family(tag, &params).map_err(lib)?;
        *out = Box::into_raw(Box::new(Prx2Spec(spec)));
        Ok(())
    })
}

/// # Safety
/// `spec` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn prx2_spec_free(spec: *mut Prx2Spec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prx2_spec_to_json(spec: *const Prx2Spec, out: *mut *mut c_char) -> Prx2Status {
    guard(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        out_string(out, spec.0.to_json())
    })
}

/// Number of presented level maps.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prx2_spec_depth(spec: *const Prx2Spec, out: *mut usize) -> Prx2Status {
    guard(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = spec.0.depth();
        Ok(())
    })
}

/// `l_n` in decimal.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prx2_circuit_length(spec: *const Prx2Spec, n: usize, out: *mut *mut c_char) -> Prx2Status {
    guard(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        out_string(out, spec.0.circuit_length(n).map_err(lib)?.to_string())
    })
}

/// Writes `N_{m,n}(u,v)` up to `max_gap` into `buf`; `*len` receives the gap count. When the
/// count exceeds `cap_len` nothing is written and the status is `BufferTooSmall`.
///
/// # Safety
/// `spec` must be a live handle; `buf` must hold `cap_len` values; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prx2_gap_set(
    spec: *const Prx2Spec,
    m: usize,
    n: usize,
    u: u32,
    v: u32,
    max_gap: u64,
    expansion_cap: u64,
    buf: *mut u64,
    cap_len: usize,
    len: *mut usize,
) -> Prx2Status {
    guard(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        let len = len.as_mut().ok_or_else(|| null("len"))?;
        let g = proxrank2::expansion::gap_set(&spec.0, m, n, u, v, max_gap, expansion_cap).map_err(lib)?;
        *len = g.gaps.len();
        if g.gaps.len() > cap_len {
            return Err((Prx2Status::BufferTooSmall, format!("{} gaps, buffer holds {cap_len}", g.gaps.len())));
        }
        if !g.gaps.is_empty() {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(g.gaps.as_ptr(), buf, g.gaps.len());
        }
        Ok(())
    })
}

/// Ergodicity verdict from the first `depth` terms; `report_json` (nullable) receives the full report.
///
/// # Safety
/// `spec` must be a live handle; `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prx2_classify_ergodicity(
    spec: *const Prx2Spec,
    depth: usize,
    verdict: *mut Prx2Verdict,
    report_json: *mut *mut c_char,
) -> Prx2Status {
    guard(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        let verdict = verdict.as_mut().ok_or_else(|| null("verdict"))?;
        let r = classify_ergodicity(&spec.0, depth).map_err(lib)?;
        *verdict = match r.verdict {
            Verdict::UniquelyErgodic { .. } => Prx2Verdict::UniquelyErgodic,
            Verdict::TwoErgodic { .. } => Prx2Verdict::TwoErgodic,
            Verdict::Undetermined { .. } => Prx2Verdict::Undetermined,
        };
        if !report_json.is_null() {
            out_string(report_json, serde_json::to_string(&r).expect("report serializes"))?;
        }
        Ok(())
    })
}

/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prx2_diagram_from_spec(spec: *const Prx2Spec, depth: usize, out: *mut *mut Prx2Diagram) -> Prx2Status {
    guard(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = bratteli::covering_to_diagram(&spec.0, depth).map_err(lib)?;
        *out = Box::into_raw(Box::new(Prx2Diagram(d)));
        Ok(())
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prx2_diagram_from_json(json: *const c_char, out: *mut *mut Prx2Diagram) -> Prx2Status {
    guard(|| {
        let text = str_arg(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = OrderedBratteliDiagram::from_json(text).map_err(lib)?;
        *out = Box::into_raw(Box::new(Prx2Diagram(d)));
        Ok(())
    })
}

/// # Safety
/// `d` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn prx2_diagram_free(d: *mut Prx2Diagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prx2_diagram_export(d: *const Prx2Diagram, format: Prx2Format, out: *mut *mut c_char) -> Prx2Status {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("diagram"))?;
        let fmt = match format {
            Prx2Format::Json => ExportFormat::Json,
            Prx2Format::Dot => ExportFormat::Dot,
        };
        let s = String::from_utf8(bratteli::export(&d.0, fmt)).expect("export is UTF-8");
        out_string(out, s)
    })
}

/// Reads the level maps off a rank-2 proximal diagram in reduced form.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prx2_diagram_to_spec(d: *const Prx2Diagram, out: *mut *mut Prx2Spec) -> Prx2Status {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("diagram"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = bratteli::diagram_to_covering(&d.0).map_err(lib)?;
        *out = Box::into_raw(Box::new(Prx2Spec(spec)));
        Ok(())
    })
}

/// Replaces the path `(*end, ordinals[0..len])` by its Vershik successor in place.
///
/// # Safety
/// `d` must be a live handle; `end` must be writable; `ordinals` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn prx2_vershik_successor(
    d: *const Prx2Diagram,
    end: *mut usize,
    ordinals: *mut u64,
    len: usize,
) -> Prx2Status {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("diagram"))?;
        let end = end.as_mut().ok_or_else(|| null("end"))?;
        if ordinals.is_null() && len > 0 {
            return Err(null("ordinals"));
        }
        let ords: &mut [u64] = if len == 0 { &mut [] } else { std::slice::from_raw_parts_mut(ordinals, len) };
        let path = FinitePath { end: *end, ordinals: ords.to_vec() };
        let next = bratteli::vershik_successor(&d.0, &path).map_err(lib)?;
        *end = next.end;
        ords.copy_from_slice(&next.ordinals);
        Ok(())
    })
}
