//! C ABI over `symrigid`. Graphs are opaque handles; every call returns a
//! status code and leaves a message for `symrigid_last_error` on failure.
//! Strings returned through out-pointers are owned by the caller and must be
//! released with `symrigid_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use symrigid::gain_graph::{gallery, parse, serialize, GainGraph};
use symrigid::henneberg::{reduce_to_base, Terminal};
use symrigid::rigidity::{analyze, generic_orbit_rank};
use symrigid::sparsity::{check_with, CountSpec, Limits};
use symrigid::Error;

/// Opaque gain graph.
pub struct SymrigidGraph {
    inner: GainGraph,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymrigidStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Input = 4,
    Capacity = 5,
    Internal = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymrigidCountFamily {
    /// The `Z_k^j` count; uses `j`.
    Zkj = 0,
    /// `(2, m, 3, l)`; uses `m` and `l`.
    Gain = 1,
    /// `(2, m, l)`; uses `m` and `l`.
    Plain = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SymrigidCountSpec {
    pub family: SymrigidCountFamily,
    pub j: u32,
    pub m: u32,
    pub l: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct SymrigidVerdict {
    pub sparse: bool,
    pub tight: bool,
    /// Edges in the violating subset; 0 when sparse.
    pub witness_len: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct SymrigidOrbitRank {
    pub j: u32,
    pub rank: usize,
    pub dim: usize,
    pub nullity: usize,
    pub trivial: usize,
    pub rows: usize,
    pub isostatic: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SymrigidStatus {
    match e {
        Error::Parse { .. } => SymrigidStatus::Parse,
        Error::InvalidGraph(_) | Error::Input(_) => SymrigidStatus::Input,
        Error::Capacity(_) => SymrigidStatus::Capacity,
        Error::Internal(_) => SymrigidStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics into a status and the last-error message.
fn guard<F>(f: F) -> SymrigidStatus
where
    F: FnOnce() -> Result<(), (SymrigidStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SymrigidStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside symrigid".into());
            SymrigidStatus::Panic
        }
    }
}

fn lib<T>(r: symrigid::Result<T>) -> Result<T, (SymrigidStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (SymrigidStatus, String) {
    (SymrigidStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SymrigidStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SymrigidStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn graph<'a>(g: *const SymrigidGraph) -> Result<&'a GainGraph, (SymrigidStatus, String)> {
    g.as_ref().map(|h| &h.inner).ok_or_else(|| null("graph"))
}

fn limits(cap: usize) -> Limits {
    if cap == 0 {
        Limits::from_env()
    } else {
        Limits { cap: cap.min(63) }
    }
}

unsafe fn put_graph(
    out: *mut *mut SymrigidGraph,
    g: GainGraph,
) -> Result<(), (SymrigidStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(SymrigidGraph { inner: g }));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (SymrigidStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s)
        .map_err(|_| (SymrigidStatus::Internal, "output contains NUL".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn symrigid_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses the text format into a new graph stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn symrigid_graph_parse(
    text: *const c_char,
    out: *mut *mut SymrigidGraph,
) -> SymrigidStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        put_graph(out, lib(parse(text))?)
    })
}

/// Builds a named example graph for order `k`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn symrigid_graph_gallery(
    name: *const c_char,
    k: u32,
    out: *mut *mut SymrigidGraph,
) -> SymrigidStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        put_graph(out, lib(gallery::gallery(name, k))?)
    })
}

/// Releases a graph; NULL is ignored.
///
/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn symrigid_graph_free(g: *mut SymrigidGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Group order, or 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live graph.
#[no_mangle]
pub unsafe extern "C" fn symrigid_graph_order(g: *const SymrigidGraph) -> u32 {
    g.as_ref().map_or(0, |h| h.inner.k())
}

/// # Safety
/// `g` must be NULL or a live graph.
#[no_mangle]
pub unsafe extern "C" fn symrigid_graph_vertex_count(g: *const SymrigidGraph) -> usize {
    g.as_ref().map_or(0, |h| h.inner.vertex_count())
}

/// # Safety
/// `g` must be NULL or a live graph.
#[no_mangle]
pub unsafe extern "C" fn symrigid_graph_edge_count(g: *const SymrigidGraph) -> usize {
    g.as_ref().map_or(0, |h| h.inner.edge_count())
}

/// Writes the text format of `g` into `*out`.
///
/// # Safety
/// `g` must be a live graph and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn symrigid_graph_serialize(
    g: *const SymrigidGraph,
    out: *mut *mut c_char,
) -> SymrigidStatus {
    guard(|| put_string(out, serialize(graph(g)?)))
}

/// Evaluates a count; `cap` bounds the edge count for exhaustive checks (0 for the default).
///
/// # Safety
/// `g` must be a live graph; `spec` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn symrigid_check(
    g: *const SymrigidGraph,
    spec: *const SymrigidCountSpec,
    cap: usize,
    out: *mut SymrigidVerdict,
) -> SymrigidStatus {
    guard(|| {
        let g = graph(g)?;
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let spec = match spec.family {
            SymrigidCountFamily::Zkj => CountSpec::Zkj { j: spec.j },
            SymrigidCountFamily::Gain => CountSpec::Gain {
                m: spec.m,
                l: spec.l,
            },
            SymrigidCountFamily::Plain => CountSpec::Plain {
                m: spec.m,
                l: spec.l,
            },
        };
        let v = lib(check_with(g, spec, &limits(cap)))?;
        *out = SymrigidVerdict {
            sparse: v.sparse,
            tight: v.tight,
            witness_len: v.witness.map_or(0, |w| w.len()),
        };
        Ok(())
    })
}

/// Generic rank of the `rho_j` block: the maximum over `trials` sampled realisations.
///
/// # Safety
/// `g` must be a live graph and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn symrigid_orbit_rank(
    g: *const SymrigidGraph,
    j: u32,
    trials: u64,
    seed: u64,
    out: *mut SymrigidOrbitRank,
) -> SymrigidStatus {
    guard(|| {
        let g = graph(g)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = lib(generic_orbit_rank(g, j, trials, seed))?;
        *out = SymrigidOrbitRank {
            j: r.j,
            rank: r.rank,
            dim: r.dim,
            nullity: r.nullity,
            trivial: r.trivial,
            rows: r.rows,
            isostatic: r.isostatic(),
        };
        Ok(())
    })
}

/// Full per-block report as text; `*agree` tells whether every block agrees.
///
/// # Safety
/// `g` must be a live graph; `out` and `agree` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn symrigid_analyze_text(
    g: *const SymrigidGraph,
    trials: u64,
    seed: u64,
    cap: usize,
    out: *mut *mut c_char,
    agree: *mut bool,
) -> SymrigidStatus {
    guard(|| {
        let g = graph(g)?;
        let agree = agree.as_mut().ok_or_else(|| null("agree"))?;
        let rep = lib(analyze(g, trials, seed, None, &limits(cap)))?;
        let mut text: String = rep.blocks.iter().map(|b| b.to_line() + "\n").collect();
        text.push_str(&format!(
            "rigid={} comb={} certified={}\n",
            rep.rigid, rep.comb_rigid, rep.certified
        ));
        *agree = rep.agree();
        put_string(out, text)
    })
}

/// Reduction certificate as text; `*special` is set when it stops at the special case.
///
/// # Safety
/// `g` must be a live graph; `out` and `special` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn symrigid_reduce_text(
    g: *const SymrigidGraph,
    j: u32,
    cap: usize,
    out: *mut *mut c_char,
    special: *mut bool,
) -> SymrigidStatus {
    guard(|| {
        let g = graph(g)?;
        let special = special.as_mut().ok_or_else(|| null("special"))?;
        let cert = lib(reduce_to_base(g, j, &limits(cap)))?;
        *special = cert.terminal == Terminal::SpecialCase;
        put_string(out, cert.to_text())
    })
}

/// Releases a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn symrigid_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
