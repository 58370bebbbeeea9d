//! C ABI over `graded_fca`.
//!
//! Every fallible function returns an [`FcaStatus`]; on failure a message is
//! available from [`fca_last_error_message`] on the same thread. Handles are
//! opaque and must be released with their matching `_free` function. Strings
//! returned to the caller are owned by the caller and released with
//! [`fca_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use graded_fca::ball_domain::{iterate_fixed_point, BallError, ContractionSpec, Vector};
use graded_fca::cli::graded_document;
use graded_fca::context::{parse_cxt, parse_mv_csv, serialize_cxt, threshold, ContextError};
use graded_fca::galois::closure_intent;
use graded_fca::graded::{graded_lattice, GradedError};
use graded_fca::lattice::build_lattice;
use graded_fca::{AttributeSet, ConceptLattice, FormalContext, ManyValuedContext};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    OutOfRange = 4,
    UndefinedGrade = 5,
    NotConverged = 6,
    Numeric = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

/// A crisp formal context.
pub struct FcaContext(FormalContext);

/// A many-valued context with entries in [0, 1].
pub struct FcaMvContext(ManyValuedContext);

/// A concept lattice with its cover relation.
pub struct FcaLattice(ConceptLattice);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: FcaStatus, message: impl ToString) -> FcaStatus {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(text).ok());
    status
}

fn guard(body: impl FnOnce() -> FcaStatus + UnwindSafe) -> FcaStatus {
    catch_unwind(body).unwrap_or_else(|_| fail(FcaStatus::Internal, "internal panic"))
}

fn context_status(e: &ContextError) -> FcaStatus {
    match e {
        ContextError::ThresholdOutOfRange(_) => FcaStatus::OutOfRange,
        _ => FcaStatus::Parse,
    }
}

fn ball_status(e: &BallError) -> FcaStatus {
    match e {
        BallError::NotConverged { .. } => FcaStatus::NotConverged,
        _ => FcaStatus::Numeric,
    }
}

fn graded_status(e: &GradedError) -> FcaStatus {
    match e {
        GradedError::Context(c) => context_status(c),
        GradedError::Ball(b) => ball_status(b),
        GradedError::UndefinedGrade(_) => FcaStatus::UndefinedGrade,
        GradedError::AllZero => FcaStatus::Numeric,
        GradedError::Galois(_) => FcaStatus::OutOfRange,
    }
}

/// # Safety
/// `text` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, FcaStatus> {
    if text.is_null() {
        return Err(fail(FcaStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|e| fail(FcaStatus::InvalidUtf8, e))
}

fn give_string(text: String, out: *mut *mut c_char) -> FcaStatus {
    match CString::new(text) {
        Ok(s) => {
            // SAFETY: callers check `out` for null before reaching here.
            unsafe { *out = s.into_raw() };
            FcaStatus::Ok
        }
        Err(e) => fail(FcaStatus::Internal, e),
    }
}

/// # Safety
/// `out` must point to `cap` writable elements when `cap > 0` and `out_len`
/// must be writable.
unsafe fn give_indices(indices: &[usize], out: *mut usize, cap: usize, out_len: *mut usize) -> FcaStatus {
    if out_len.is_null() || (out.is_null() && cap > 0) {
        return fail(FcaStatus::NullPointer, "null output buffer");
    }
    *out_len = indices.len();
    if indices.len() > cap {
        return fail(FcaStatus::BufferTooSmall, format!("need {} slots, have {cap}", indices.len()));
    }
    if !indices.is_empty() {
        ptr::copy_nonoverlapping(indices.as_ptr(), out, indices.len());
    }
    FcaStatus::Ok
}

/// Message for the last failure on this thread, or null if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fca_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `text` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fca_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Parses Burmeister CXT text into a new context handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fca_context_parse_cxt(text: *const c_char, out: *mut *mut FcaContext) -> FcaStatus {
    guard(|| {
        if out.is_null() {
            return fail(FcaStatus::NullPointer, "null output handle");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_cxt(text) {
            Ok(ctx) => {
                *out = Box::into_raw(Box::new(FcaContext(ctx)));
                FcaStatus::Ok
            }
            Err(e) => fail(context_status(&e), e),
        }
    })
}

/// # Safety
/// `ctx` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fca_context_free(ctx: *mut FcaContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// # Safety
/// `ctx` must be null or a live context handle.
#[no_mangle]
pub unsafe extern "C" fn fca_context_object_count(ctx: *const FcaContext) -> usize {
    ctx.as_ref().map_or(0, |c| c.0.object_count())
}

/// # Safety
/// `ctx` must be null or a live context handle.
#[no_mangle]
pub unsafe extern "C" fn fca_context_attribute_count(ctx: *const FcaContext) -> usize {
    ctx.as_ref().map_or(0, |c| c.0.attribute_count())
}

/// Serializes a context to canonical CXT text.
///
/// # Safety
/// `ctx` must be a live context handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fca_context_to_cxt(ctx: *const FcaContext, out: *mut *mut c_char) -> FcaStatus {
    guard(|| {
        let Some(ctx) = ctx.as_ref() else {
            return fail(FcaStatus::NullPointer, "null context");
        };
        if out.is_null() {
            return fail(FcaStatus::NullPointer, "null output string");
        }
        give_string(serialize_cxt(&ctx.0), out)
    })
}

/// Parses a many-valued CSV table into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fca_mv_parse_csv(text: *const c_char, out: *mut *mut FcaMvContext) -> FcaStatus {
    guard(|| {
        if out.is_null() {
            return fail(FcaStatus::NullPointer, "null output handle");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_mv_csv(text) {
            Ok(mv) => {
                *out = Box::into_raw(Box::new(FcaMvContext(mv)));
                FcaStatus::Ok
            }
            Err(e) => fail(context_status(&e), e),
        }
    })
}

/// # Safety
/// `mv` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fca_mv_free(mv: *mut FcaMvContext) {
    if !mv.is_null() {
        drop(Box::from_raw(mv));
    }
}

/// Crisp context of the cells with membership at least `theta`.
///
/// # Safety
/// `mv` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fca_mv_threshold(mv: *const FcaMvContext, theta: f64, out: *mut *mut FcaContext) -> FcaStatus {
    guard(|| {
        let Some(mv) = mv.as_ref() else {
            return fail(FcaStatus::NullPointer, "null many-valued context");
        };
        if out.is_null() {
            return fail(FcaStatus::NullPointer, "null output handle");
        }
        match threshold(&mv.0, theta) {
            Ok(ctx) => {
                *out = Box::into_raw(Box::new(FcaContext(ctx)));
                FcaStatus::Ok
            }
            Err(e) => fail(context_status(&e), e),
        }
    })
}

/// Graded concept lattice at `theta`, as the same JSON document the CLI
/// prints for `graded --json`.
///
/// # Safety
/// `mv` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fca_graded_json(mv: *const FcaMvContext, theta: f64, out: *mut *mut c_char) -> FcaStatus {
    guard(|| {
        let Some(mv) = mv.as_ref() else {
            return fail(FcaStatus::NullPointer, "null many-valued context");
        };
        if out.is_null() {
            return fail(FcaStatus::NullPointer, "null output string");
        }
        let lattice = match graded_lattice(&mv.0, theta) {
            Ok(l) => l,
            Err(e) => return fail(graded_status(&e), e),
        };
        match serde_json::to_string(&graded_document(&lattice)) {
            Ok(json) => give_string(json, out),
            Err(e) => fail(FcaStatus::Internal, e),
        }
    })
}

/// Builds the concept lattice of a context.
///
/// # Safety
/// `ctx` must be a live context handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_build(ctx: *const FcaContext, out: *mut *mut FcaLattice) -> FcaStatus {
    guard(|| {
        let Some(ctx) = ctx.as_ref() else {
            return fail(FcaStatus::NullPointer, "null context");
        };
        if out.is_null() {
            return fail(FcaStatus::NullPointer, "null output handle");
        }
        *out = Box::into_raw(Box::new(FcaLattice(build_lattice(&ctx.0))));
        FcaStatus::Ok
    })
}

/// # Safety
/// `lattice` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_free(lattice: *mut FcaLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Concepts are indexed in lectic order of their intents.
///
/// # Safety
/// `lattice` must be null or a live lattice handle.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_concept_count(lattice: *const FcaLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.0.len())
}

/// # Safety
/// `lattice` must be a live lattice handle.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_top(lattice: *const FcaLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.0.top)
}

/// # Safety
/// `lattice` must be a live lattice handle.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_bottom(lattice: *const FcaLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.0.bottom)
}

/// # Safety
/// Same contract as [`fca_lattice_concept_intent`].
unsafe fn concept_part(
    lattice: *const FcaLattice,
    index: usize,
    out: *mut usize,
    cap: usize,
    out_len: *mut usize,
    intent: bool,
) -> FcaStatus {
    guard(|| {
        let Some(lattice) = lattice.as_ref() else {
            return fail(FcaStatus::NullPointer, "null lattice");
        };
        let Some(concept) = lattice.0.concepts.get(index) else {
            return fail(FcaStatus::OutOfRange, format!("concept {index} of {}", lattice.0.len()));
        };
        let indices: Vec<usize> = if intent {
            concept.intent.iter().collect()
        } else {
            concept.extent.iter().collect()
        };
        give_indices(&indices, out, cap, out_len)
    })
}

/// Writes the attribute indices of concept `index` into `out`. `*out_len`
/// always receives the required length; if it exceeds `cap` nothing is
/// written and `BufferTooSmall` is returned.
///
/// # Safety
/// `out` must have room for `cap` elements and `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_concept_intent(
    lattice: *const FcaLattice,
    index: usize,
    out: *mut usize,
    cap: usize,
    out_len: *mut usize,
) -> FcaStatus {
    concept_part(lattice, index, out, cap, out_len, true)
}

/// Object indices of concept `index`, with the same buffer protocol as
/// [`fca_lattice_concept_intent`].
///
/// # Safety
/// `out` must have room for `cap` elements and `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_concept_extent(
    lattice: *const FcaLattice,
    index: usize,
    out: *mut usize,
    cap: usize,
    out_len: *mut usize,
) -> FcaStatus {
    concept_part(lattice, index, out, cap, out_len, false)
}

/// # Safety
/// `lattice` must be null or a live lattice handle.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_cover_count(lattice: *const FcaLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.0.covers.len())
}

/// Cover pair `index`: `*upper` covers `*lower`.
///
/// # Safety
/// `lattice` must be a live lattice handle; `lower` and `upper` writable.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_cover(
    lattice: *const FcaLattice,
    index: usize,
    lower: *mut usize,
    upper: *mut usize,
) -> FcaStatus {
    guard(|| {
        let Some(lattice) = lattice.as_ref() else {
            return fail(FcaStatus::NullPointer, "null lattice");
        };
        if lower.is_null() || upper.is_null() {
            return fail(FcaStatus::NullPointer, "null output");
        }
        let Some(&(lo, up)) = lattice.0.covers.get(index) else {
            return fail(FcaStatus::OutOfRange, format!("cover {index} of {}", lattice.0.covers.len()));
        };
        *lower = lo;
        *upper = up;
        FcaStatus::Ok
    })
}

/// Closure of the attribute set `attrs[0..len]`, written with the same
/// buffer protocol as [`fca_lattice_concept_intent`].
///
/// # Safety
/// `attrs` must point to `len` readable elements when `len > 0`; `out` must
/// have room for `cap` elements and `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fca_closure_intent(
    ctx: *const FcaContext,
    attrs: *const usize,
    len: usize,
    out: *mut usize,
    cap: usize,
    out_len: *mut usize,
) -> FcaStatus {
    guard(|| {
        let Some(ctx) = ctx.as_ref() else {
            return fail(FcaStatus::NullPointer, "null context");
        };
        if attrs.is_null() && len > 0 {
            return fail(FcaStatus::NullPointer, "null attribute array");
        }
        let input: &[usize] = if len == 0 { &[] } else { std::slice::from_raw_parts(attrs, len) };
        let set = match AttributeSet::from_indices(ctx.0.attribute_count(), input.iter().copied()) {
            Ok(s) => s,
            Err(e) => return fail(FcaStatus::OutOfRange, e),
        };
        match closure_intent(&ctx.0, &set) {
            Ok(closed) => give_indices(&closed.iter().collect::<Vec<_>>(), out, cap, out_len),
            Err(e) => fail(FcaStatus::OutOfRange, e),
        }
    })
}

/// Iterates `x -> k·x` from `x0[0..dim]` until the certified bound is at most
/// `tol`. Writes the fixed point into `out_fixed[0..dim]`.
///
/// # Safety
/// `x0` must point to `dim` readable and `out_fixed` to `dim` writable
/// elements; `out_steps` and `out_bound` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fca_iterate_scaling(
    k: f64,
    x0: *const f64,
    dim: usize,
    tol: f64,
    max_iter: usize,
    out_fixed: *mut f64,
    out_steps: *mut usize,
    out_bound: *mut f64,
) -> FcaStatus {
    guard(|| {
        if x0.is_null() || out_fixed.is_null() || out_steps.is_null() || out_bound.is_null() {
            return fail(FcaStatus::NullPointer, "null argument");
        }
        let seed = match Vector::new(std::slice::from_raw_parts(x0, dim).to_vec()) {
            Ok(v) => v,
            Err(e) => return fail(ball_status(&e), e),
        };
        let report = match ContractionSpec::scaling(dim, k).and_then(|spec| iterate_fixed_point(&spec, &seed, tol, max_iter)) {
            Ok(r) => r,
            Err(e) => return fail(ball_status(&e), e),
        };
        ptr::copy_nonoverlapping(report.fixed_point.components().as_ptr(), out_fixed, dim);
        *out_steps = report.steps;
        *out_bound = report.certified_bound;
        FcaStatus::Ok
    })
}
