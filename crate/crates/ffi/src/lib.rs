//! C ABI for locald.
//!
//! Every entry point returns a [`LocaldStatus`]; on failure the message is
//! kept per thread and read with [`locald_last_error`]. Objects are opaque
//! heap handles released with their `_free` function. Panics never cross
//! the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use locald::graph::{generate, Decomposition, FamilySpec, Graph};
use locald::ilp::{json::from_json, IlpInstance, Sense};
use locald::sim::{ConstantProfile, SimContext, Topology};
use locald::{classic, covering, packing, whp, Error};

/// Version of this ABI. Bumped on any incompatible change.
pub const LOCALD_ABI_VERSION: u32 = 1;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocaldStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string was not UTF-8, a buffer was too small, or a parameter was out of range.
    InvalidArgument = 2,
    /// A graph could not be built or parsed.
    Graph = 3,
    /// An ILP instance could not be built or parsed, or a local solve failed.
    Ilp = 4,
    /// An internal invariant failed; the result would be wrong.
    Invariant = 5,
    /// A panic was caught.
    Panic = 6,
}

/// A simple undirected graph.
pub struct LocaldGraph(Graph);

/// A partition of a graph's vertices into clusters and deleted vertices.
pub struct LocaldDecomposition(Decomposition);

/// A packing or covering instance.
pub struct LocaldIlp(IlpInstance);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(LocaldStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            _ if e.is_invariant() => LocaldStatus::Invariant,
            Error::Graph(_) | Error::NotHypergraph => LocaldStatus::Graph,
            Error::Ilp(_) | Error::Component { .. } | Error::Uncovered(_) => LocaldStatus::Ilp,
            _ => LocaldStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(LocaldStatus::InvalidArgument, msg.into())
}

fn null(name: &str) -> Fail {
    Fail(LocaldStatus::NullPointer, format!("{name} is null"))
}

/// Runs `f`, records any failure, and converts panics into [`LocaldStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LocaldStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LocaldStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            LocaldStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{name} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Null means the desk profile.
unsafe fn profile(name: *const c_char) -> Result<ConstantProfile, Fail> {
    if name.is_null() {
        return Ok(ConstantProfile::desk());
    }
    Ok(ConstantProfile::by_name(c_str(name, "profile")?)?)
}

unsafe fn free_handle<T>(p: *mut T) {
    if !p.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(p))));
    }
}

/// ABI version; compare against `LOCALD_ABI_VERSION`.
#[no_mangle]
pub extern "C" fn locald_abi_version() -> u32 {
    LOCALD_ABI_VERSION
}

/// The message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn locald_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a graph on `n` vertices from `edge_count` pairs stored flat in `edges`.
///
/// # Safety
/// `edges` must point to `2 * edge_count` values (it may be null when
/// `edge_count` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locald_graph_from_edges(
    n: usize,
    edges: *const usize,
    edge_count: usize,
    out: *mut *mut LocaldGraph,
) -> LocaldStatus {
    guard(|| {
        let flat = if edge_count == 0 {
            &[][..]
        } else {
            if edges.is_null() {
                return Err(null("edges"));
            }
            let len = edge_count.checked_mul(2).ok_or_else(|| invalid("edge_count overflows"))?;
            std::slice::from_raw_parts(edges, len)
        };
        let pairs: Vec<(usize, usize)> = flat.chunks_exact(2).map(|p| (p[0], p[1])).collect();
        let g = Graph::from_edges(n, &pairs).map_err(Error::from)?;
        write_out(out, LocaldGraph(g))
    })
}

/// Generates a graph from a family such as `cycle:200` or `gnp:500:0.006`.
///
/// # Safety
/// `family` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locald_graph_generate(
    family: *const c_char,
    seed: u64,
    out: *mut *mut LocaldGraph,
) -> LocaldStatus {
    guard(|| {
        let spec: FamilySpec = c_str(family, "family")?.parse().map_err(Error::from)?;
        let g = generate(&spec, seed).map_err(Error::from)?;
        write_out(out, LocaldGraph(g))
    })
}

/// Vertex count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn locald_graph_vertex_count(g: *const LocaldGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.vertex_count())
}

/// Edge count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn locald_graph_edge_count(g: *const LocaldGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// # Safety
/// `g` must be null or a graph handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn locald_graph_free(g: *mut LocaldGraph) {
    free_handle(g)
}

unsafe fn graph_context(
    g: *const LocaldGraph,
    n_tilde: usize,
    seed: u64,
    profile_name: *const c_char,
) -> Result<SimContext, Fail> {
    let g = &deref(g, "graph")?.0;
    let n_tilde = if n_tilde == 0 { g.vertex_count().max(2) } else { n_tilde };
    Ok(SimContext::new(Topology::Graph(g.clone()), n_tilde, seed, profile(profile_name)?)?)
}

/// Exponential-clock decomposition with rate `lambda`. `n_tilde` = 0 uses
/// the vertex count; a null `profile` means `desk`.
///
/// # Safety
/// `g` must be a live graph handle, `profile` null or a NUL-terminated
/// string, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn locald_exp_clock_ldd(
    g: *const LocaldGraph,
    lambda: f64,
    n_tilde: usize,
    seed: u64,
    profile: *const c_char,
    out: *mut *mut LocaldDecomposition,
) -> LocaldStatus {
    guard(|| {
        let mut ctx = graph_context(g, n_tilde, seed, profile)?;
        let d = classic::exp_clock_ldd(&mut ctx, lambda)?;
        write_out(out, LocaldDecomposition(d))
    })
}

/// High-probability decomposition deleting at most an `eps` fraction; with
/// `refine`, clusters are split into balls of small strong diameter.
///
/// # Safety
/// As for [`locald_exp_clock_ldd`].
#[no_mangle]
pub unsafe extern "C" fn locald_whp_ldd(
    g: *const LocaldGraph,
    eps: f64,
    refine: bool,
    n_tilde: usize,
    seed: u64,
    profile: *const c_char,
    out: *mut *mut LocaldDecomposition,
) -> LocaldStatus {
    guard(|| {
        let mut ctx = graph_context(g, n_tilde, seed, profile)?;
        let d = whp::whp_ldd(&mut ctx, eps, refine)?;
        write_out(out, LocaldDecomposition(d))
    })
}

/// Number of vertices covered by the decomposition, or 0 for null.
///
/// # Safety
/// `d` must be null or a live decomposition handle.
#[no_mangle]
pub unsafe extern "C" fn locald_decomposition_vertex_count(d: *const LocaldDecomposition) -> usize {
    d.as_ref().map_or(0, |d| d.0.vertex_count())
}

/// Number of clusters, or 0 for null.
///
/// # Safety
/// `d` must be null or a live decomposition handle.
#[no_mangle]
pub unsafe extern "C" fn locald_decomposition_cluster_count(d: *const LocaldDecomposition) -> usize {
    d.as_ref().map_or(0, |d| d.0.cluster_count())
}

/// Number of deleted vertices, or 0 for null.
///
/// # Safety
/// `d` must be null or a live decomposition handle.
#[no_mangle]
pub unsafe extern "C" fn locald_decomposition_deleted_count(d: *const LocaldDecomposition) -> usize {
    d.as_ref().map_or(0, |d| d.0.deleted_count())
}

/// Writes each vertex's cluster id into `labels`, with -1 for deleted
/// vertices. `len` must be at least the vertex count.
///
/// # Safety
/// `d` must be a live decomposition handle and `labels` must have room for
/// `len` values.
#[no_mangle]
pub unsafe extern "C" fn locald_decomposition_labels(
    d: *const LocaldDecomposition,
    labels: *mut i64,
    len: usize,
) -> LocaldStatus {
    guard(|| {
        let d = &deref(d, "decomposition")?.0;
        if labels.is_null() {
            return Err(null("labels"));
        }
        if len < d.vertex_count() {
            return Err(invalid(format!("labels holds {len} values, {} needed", d.vertex_count())));
        }
        let dst = std::slice::from_raw_parts_mut(labels, d.vertex_count());
        for (slot, l) in dst.iter_mut().zip(d.labels()) {
            *slot = l.map_or(-1, |c| c as i64);
        }
        Ok(())
    })
}

/// # Safety
/// `d` must be null or a decomposition handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn locald_decomposition_free(d: *mut LocaldDecomposition) {
    free_handle(d)
}

/// Parses an instance from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locald_ilp_from_json(json: *const c_char, out: *mut *mut LocaldIlp) -> LocaldStatus {
    guard(|| {
        let inst = from_json(c_str(json, "json")?).map_err(Error::from)?;
        write_out(out, LocaldIlp(inst))
    })
}

/// Number of variables, or 0 for null.
///
/// # Safety
/// `ilp` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn locald_ilp_var_count(ilp: *const LocaldIlp) -> usize {
    ilp.as_ref().map_or(0, |i| i.0.var_count())
}

/// True for packing instances, false for covering ones or null.
///
/// # Safety
/// `ilp` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn locald_ilp_is_packing(ilp: *const LocaldIlp) -> bool {
    ilp.as_ref().is_some_and(|i| i.0.sense() == Sense::Packing)
}

/// # Safety
/// `ilp` must be null or an instance handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn locald_ilp_free(ilp: *mut LocaldIlp) {
    free_handle(ilp)
}

#[allow(clippy::too_many_arguments)]
unsafe fn solve(
    ilp: *const LocaldIlp,
    sense: Sense,
    eps: f64,
    n_tilde: usize,
    seed: u64,
    profile_name: *const c_char,
    values: *mut u8,
    len: usize,
    weight: *mut u64,
) -> Result<(), Fail> {
    let inst = &deref(ilp, "ilp")?.0;
    if inst.sense() != sense {
        return Err(invalid("instance has the wrong sense for this solver"));
    }
    if values.is_null() {
        return Err(null("values"));
    }
    if len < inst.var_count() {
        return Err(invalid(format!("values holds {len} entries, {} needed", inst.var_count())));
    }
    let n_tilde = if n_tilde == 0 {
        inst.var_count().max(inst.total_weight() as usize).max(2)
    } else {
        n_tilde
    };
    let topology = Topology::Hypergraph(inst.associated_hypergraph());
    let mut ctx = SimContext::new(topology, n_tilde, seed, profile(profile_name)?)?;
    let a = match sense {
        Sense::Packing => packing::approx_pack(&mut ctx, inst, eps)?,
        Sense::Covering => covering::approx_cover(&mut ctx, inst, eps)?,
    };
    let dst = std::slice::from_raw_parts_mut(values, inst.var_count());
    for (slot, &b) in dst.iter_mut().zip(&a.values) {
        *slot = u8::from(b);
    }
    if let Some(w) = weight.as_mut() {
        *w = a.total(inst.weights());
    }
    Ok(())
}

/// Approximate packing. Writes one 0/1 byte per variable into `values` and,
/// if `weight` is non-null, the solution weight. `n_tilde` = 0 uses
/// max(variables, total weight).
///
/// # Safety
/// `ilp` must be a live instance handle, `values` must have room for `len`
/// bytes, `profile` null or a NUL-terminated string, `weight` null or writable.
#[no_mangle]
pub unsafe extern "C" fn locald_approx_pack(
    ilp: *const LocaldIlp,
    eps: f64,
    n_tilde: usize,
    seed: u64,
    profile: *const c_char,
    values: *mut u8,
    len: usize,
    weight: *mut u64,
) -> LocaldStatus {
    guard(|| solve(ilp, Sense::Packing, eps, n_tilde, seed, profile, values, len, weight))
}

/// Approximate covering; arguments as for [`locald_approx_pack`].
///
/// # Safety
/// As for [`locald_approx_pack`].
#[no_mangle]
pub unsafe extern "C" fn locald_approx_cover(
    ilp: *const LocaldIlp,
    eps: f64,
    n_tilde: usize,
    seed: u64,
    profile: *const c_char,
    values: *mut u8,
    len: usize,
    weight: *mut u64,
) -> LocaldStatus {
    guard(|| solve(ilp, Sense::Covering, eps, n_tilde, seed, profile, values, len, weight))
}
