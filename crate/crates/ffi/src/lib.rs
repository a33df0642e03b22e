//! C ABI for likelic.
//!
//! Graphs and valuations cross the boundary as opaque handles. Every fallible
//! call returns a [`LikelicStatus`]; on failure the message is available from
//! [`likelic_last_error`] on the same thread until the next failing call.
//! Strings returned by the library are owned by the caller and must be
//! released with [`likelic_string_free`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use likelic::graph::{parse_context, serialize_context, ContextGraph};
use likelic::inference::{derived_implication, explain};
use likelic::scale::{BoundarySet, Likeliness};
use likelic::update::{propagate, Evidence, PropagationMode};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LikelicStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    UnknownVertex = 4,
    InvalidArgument = 5,
    NotFound = 6,
}

/// Propagation semantics, mirroring the library's modes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LikelicMode {
    Fixpoint = 0,
    Wavefront = 1,
}

/// Opaque context graph.
pub struct LikelicGraph {
    inner: ContextGraph,
}

/// Opaque valuation keyed by vertex label.
pub struct LikelicValuation {
    grades: BTreeMap<String, u8>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: LikelicStatus, message: impl Into<String>) -> LikelicStatus {
    let msg = CString::new(message.into().replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    status
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, LikelicStatus> {
    if p.is_null() {
        return Err(fail(LikelicStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(LikelicStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

fn grade(g: u8) -> Result<Likeliness, LikelicStatus> {
    Likeliness::new(g as i64).map_err(|e| fail(LikelicStatus::InvalidArgument, e.to_string()))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Last error message on this thread, or NULL. The pointer stays valid until
/// the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn likelic_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Canonical name of a grade ("impossible" … "necessary"), or NULL when the
/// grade is outside 0..=6. Static storage; do not free.
#[no_mangle]
pub extern "C" fn likelic_grade_name(grade: u8) -> *const c_char {
    const NAMES: [&CStr; 7] = [
        c"impossible",
        c"conceivable",
        c"unlikely",
        c"neutral",
        c"likely",
        c"typical",
        c"necessary",
    ];
    NAMES.get(grade as usize).map_or(ptr::null(), |n| n.as_ptr())
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn likelic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses context text into a new graph handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn likelic_graph_parse(text: *const c_char, out: *mut *mut LikelicGraph) -> LikelicStatus {
    if out.is_null() {
        return fail(LikelicStatus::NullPointer, "null output pointer");
    }
    let src = try_status!(self::text(text));
    match parse_context(src) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(LikelicGraph { inner }));
            LikelicStatus::Ok
        }
        Err(e) => fail(LikelicStatus::ParseError, e.to_string()),
    }
}

/// # Safety
/// `g` must be NULL or a handle from [`likelic_graph_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn likelic_graph_free(g: *mut LikelicGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn likelic_graph_vertex_count(g: *const LikelicGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.vertex_count())
}

/// Canonical text form of the graph; free with [`likelic_string_free`].
///
/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn likelic_graph_serialize(g: *const LikelicGraph) -> *mut c_char {
    match g.as_ref() {
        Some(g) => into_c_string(serialize_context(&g.inner)),
        None => ptr::null_mut(),
    }
}

unsafe fn pair<'a>(
    g: *const LikelicGraph,
    from: *const c_char,
    to: *const c_char,
) -> Result<(&'a ContextGraph, likelic::VertexId, likelic::VertexId), LikelicStatus> {
    let g = &g
        .as_ref()
        .ok_or_else(|| fail(LikelicStatus::NullPointer, "null graph"))?
        .inner;
    let (from, to) = (text(from)?, text(to)?);
    let lookup = |l: &str| g.require(l).map_err(|e| fail(LikelicStatus::UnknownVertex, e.to_string()));
    Ok((g, lookup(from)?, lookup(to)?))
}

/// Derived likeliness of `from → to` written to `*out_grade`.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn likelic_derived_implication(
    g: *const LikelicGraph,
    from: *const c_char,
    to: *const c_char,
    out_grade: *mut u8,
) -> LikelicStatus {
    if out_grade.is_null() {
        return fail(LikelicStatus::NullPointer, "null output pointer");
    }
    let (g, a, b) = try_status!(pair(g, from, to));
    match derived_implication(g, a, b) {
        Ok(d) => {
            *out_grade = d.value.grade();
            LikelicStatus::Ok
        }
        Err(e) => fail(LikelicStatus::InvalidArgument, e.to_string()),
    }
}

/// Witness chain for `from → to` as a new string in `*out`.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn likelic_explain(
    g: *const LikelicGraph,
    from: *const c_char,
    to: *const c_char,
    out: *mut *mut c_char,
) -> LikelicStatus {
    if out.is_null() {
        return fail(LikelicStatus::NullPointer, "null output pointer");
    }
    let (g, a, b) = try_status!(pair(g, from, to));
    match explain(g, a, b) {
        Ok(s) => {
            *out = into_c_string(s);
            LikelicStatus::Ok
        }
        Err(e) => fail(LikelicStatus::InvalidArgument, e.to_string()),
    }
}

/// Propagates `source` at `grade` and stores a new valuation in `*out`.
///
/// # Safety
/// Pointers must be valid; `source` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn likelic_propagate(
    g: *const LikelicGraph,
    source: *const c_char,
    grade: u8,
    mode: LikelicMode,
    out: *mut *mut LikelicValuation,
) -> LikelicStatus {
    if out.is_null() {
        return fail(LikelicStatus::NullPointer, "null output pointer");
    }
    let Some(g) = g.as_ref() else {
        return fail(LikelicStatus::NullPointer, "null graph");
    };
    let g = &g.inner;
    let label = try_status!(text(source));
    let value = try_status!(self::grade(grade));
    let v = match g.require(label) {
        Ok(v) => v,
        Err(e) => return fail(LikelicStatus::UnknownVertex, e.to_string()),
    };
    let mode = match mode {
        LikelicMode::Fixpoint => PropagationMode::Fixpoint,
        LikelicMode::Wavefront => PropagationMode::Wavefront,
    };
    match propagate(g, &Evidence::source(v, value), mode) {
        Ok(val) => {
            let grades = val
                .by_label(g)
                .into_iter()
                .map(|(k, l)| (k.to_string(), l.grade()))
                .collect();
            *out = Box::into_raw(Box::new(LikelicValuation { grades }));
            LikelicStatus::Ok
        }
        Err(e) => fail(LikelicStatus::InvalidArgument, e.to_string()),
    }
}

/// Grade of `label` in the valuation. Returns `NotFound` when the vertex is
/// unassigned.
///
/// # Safety
/// Pointers must be valid; `label` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn likelic_valuation_get(
    v: *const LikelicValuation,
    label: *const c_char,
    out_grade: *mut u8,
) -> LikelicStatus {
    let (Some(v), false) = (v.as_ref(), out_grade.is_null()) else {
        return fail(LikelicStatus::NullPointer, "null argument");
    };
    let label = try_status!(text(label));
    match v.grades.get(label) {
        Some(&g) => {
            *out_grade = g;
            LikelicStatus::Ok
        }
        None => fail(LikelicStatus::NotFound, format!("`{label}` has no grade")),
    }
}

/// Number of assigned vertices, 0 for NULL.
///
/// # Safety
/// `v` must be NULL or a live valuation handle.
#[no_mangle]
pub unsafe extern "C" fn likelic_valuation_len(v: *const LikelicValuation) -> usize {
    v.as_ref().map_or(0, |v| v.grades.len())
}

/// # Safety
/// `v` must be NULL or a handle from [`likelic_propagate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn likelic_valuation_free(v: *mut LikelicValuation) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Writes the six cut probabilities for `base` into `out_cuts[0..6]`.
///
/// # Safety
/// `out_cuts` must point to at least six writable doubles.
#[no_mangle]
pub unsafe extern "C" fn likelic_boundaries(base: f64, out_cuts: *mut f64) -> LikelicStatus {
    if out_cuts.is_null() {
        return fail(LikelicStatus::NullPointer, "null output pointer");
    }
    match BoundarySet::new(base) {
        Ok(b) => {
            ptr::copy_nonoverlapping(b.cuts().as_ptr(), out_cuts, 6);
            LikelicStatus::Ok
        }
        Err(e) => fail(LikelicStatus::InvalidArgument, e.to_string()),
    }
}

/// Grade of probability `p` under base threshold `base`.
///
/// # Safety
/// `out_grade` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn likelic_grade_from_probability(p: f64, base: f64, out_grade: *mut u8) -> LikelicStatus {
    if out_grade.is_null() {
        return fail(LikelicStatus::NullPointer, "null output pointer");
    }
    let bounds = match BoundarySet::new(base) {
        Ok(b) => b,
        Err(e) => return fail(LikelicStatus::InvalidArgument, e.to_string()),
    };
    match bounds.grade_of(p) {
        Ok(l) => {
            *out_grade = l.grade();
            LikelicStatus::Ok
        }
        Err(e) => fail(LikelicStatus::InvalidArgument, e.to_string()),
    }
}
