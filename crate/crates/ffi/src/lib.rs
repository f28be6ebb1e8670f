//! C ABI for `incr-pagerank`.
//!
//! Every object crosses the boundary as an opaque pointer created by an
//! `ipr_*_new` / `ipr_script_build_*` function and released with the
//! matching `ipr_*_free`. Fallible calls return an [`IprStatus`] and write
//! results through out-pointers; out-pointers are left untouched on error.
//! Panics are caught at the boundary and reported as
//! [`IprStatus::Panic`].

#![allow(clippy::missing_safety_doc)]

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use incr_pagerank::adversary::{
    build_binary, build_dary, harmonic, predicted_row_updates, predicted_total, random_order,
    ArrivalScript,
};
use incr_pagerank::experiment::replay;
use incr_pagerank::pagerank::estimate;
use incr_pagerank::{DynGraph, Error, NodeId, RngStream, WalkStore};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IprStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NodeOutOfRange = 3,
    DuplicateEdge = 4,
    SelfLoop = 5,
    EdgeNotInGraph = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

impl From<&Error> for IprStatus {
    fn from(err: &Error) -> Self {
        match err {
            Error::NodeOutOfRange { .. } | Error::NeighborOutOfRange { .. } => {
                IprStatus::NodeOutOfRange
            }
            Error::DuplicateEdge(..) => IprStatus::DuplicateEdge,
            Error::SelfLoop(_) => IprStatus::SelfLoop,
            Error::EdgeNotInGraph(..) => IprStatus::EdgeNotInGraph,
            _ => IprStatus::InvalidArgument,
        }
    }
}

/// Opaque directed graph.
pub struct IprGraph(DynGraph);

/// Opaque walk store together with its random stream.
pub struct IprWalkStore {
    store: WalkStore,
    rng: RngStream,
}

/// Opaque arrival script.
pub struct IprScript(ArrivalScript);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IprUpdateStats {
    pub reroute_events: u64,
    pub steps_regenerated: u64,
    pub coin_flips: u64,
}

impl From<incr_pagerank::UpdateStats> for IprUpdateStats {
    fn from(s: incr_pagerank::UpdateStats) -> Self {
        Self {
            reroute_events: s.reroute_events,
            steps_regenerated: s.steps_regenerated,
            coin_flips: s.coin_flips,
        }
    }
}

/// Scalar counters of one replay.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IprRunSummary {
    pub node_count: u64,
    pub edge_count: u64,
    pub reroutes_total: u64,
    pub reroutes_toprow: u64,
    pub top_edge_reroutes: u64,
    pub steps_regenerated: u64,
    pub coin_flips: u64,
    pub wall_ms: f64,
}

fn guard(f: impl FnOnce() -> Result<(), IprStatus>) -> IprStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IprStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => IprStatus::Panic,
    }
}

unsafe fn as_ref<'a, T>(ptr: *const T) -> Result<&'a T, IprStatus> {
    ptr.as_ref().ok_or(IprStatus::NullPointer)
}

unsafe fn as_mut<'a, T>(ptr: *mut T) -> Result<&'a mut T, IprStatus> {
    ptr.as_mut().ok_or(IprStatus::NullPointer)
}

fn check<T>(result: incr_pagerank::Result<T>) -> Result<T, IprStatus> {
    result.map_err(|e| IprStatus::from(&e))
}

unsafe fn free<T>(ptr: *mut T) {
    if !ptr.is_null() {
        drop(Box::from_raw(ptr));
    }
}

/// Static, NUL-terminated description of `status`.
#[no_mangle]
pub extern "C" fn ipr_status_message(status: IprStatus) -> *const c_char {
    let text: &'static [u8] = match status {
        IprStatus::Ok => b"ok\0",
        IprStatus::NullPointer => b"null pointer argument\0",
        IprStatus::InvalidArgument => b"invalid argument\0",
        IprStatus::NodeOutOfRange => b"node or neighbor index out of range\0",
        IprStatus::DuplicateEdge => b"edge already present\0",
        IprStatus::SelfLoop => b"self-loops are not allowed\0",
        IprStatus::EdgeNotInGraph => b"edge must be added to the graph first\0",
        IprStatus::BufferTooSmall => b"output buffer too small\0",
        IprStatus::Panic => b"internal panic\0",
    };
    text.as_ptr().cast()
}

/// Creates a graph with `node_count` isolated nodes.
#[no_mangle]
pub unsafe extern "C" fn ipr_graph_new(node_count: usize, out: *mut *mut IprGraph) -> IprStatus {
    guard(|| {
        let out = as_mut(out)?;
        let g = check(DynGraph::new(node_count))?;
        *out = Box::into_raw(Box::new(IprGraph(g)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ipr_graph_free(graph: *mut IprGraph) {
    free(graph)
}

#[no_mangle]
pub unsafe extern "C" fn ipr_graph_node_count(graph: *const IprGraph, out: *mut usize) -> IprStatus {
    guard(|| {
        let g = as_ref(graph)?;
        *as_mut(out)? = g.0.node_count();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ipr_graph_edge_count(graph: *const IprGraph, out: *mut usize) -> IprStatus {
    guard(|| {
        let g = as_ref(graph)?;
        *as_mut(out)? = g.0.edge_count();
        Ok(())
    })
}

/// Inserts `(u, v)`; `out_degree` (may be null) receives the new outdegree of `u`.
#[no_mangle]
pub unsafe extern "C" fn ipr_graph_add_edge(
    graph: *mut IprGraph,
    u: u32,
    v: u32,
    out_degree: *mut usize,
) -> IprStatus {
    guard(|| {
        let g = as_mut(graph)?;
        let degree = check(g.0.add_edge(NodeId(u), NodeId(v)))?;
        if let Some(out) = out_degree.as_mut() {
            *out = degree;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ipr_graph_outdegree(
    graph: *const IprGraph,
    u: u32,
    out: *mut usize,
) -> IprStatus {
    guard(|| {
        let g = as_ref(graph)?;
        let out = as_mut(out)?;
        *out = check(g.0.outdegree(NodeId(u)))?;
        Ok(())
    })
}

/// The `k`-th out-neighbor of `u` in arrival order.
#[no_mangle]
pub unsafe extern "C" fn ipr_graph_out_neighbor(
    graph: *const IprGraph,
    u: u32,
    k: usize,
    out: *mut u32,
) -> IprStatus {
    guard(|| {
        let g = as_ref(graph)?;
        let out = as_mut(out)?;
        *out = check(g.0.out_neighbor(NodeId(u), k))?.0;
        Ok(())
    })
}

/// Builds `walks_per_node` walks from every node of `graph`. The store owns
/// a random stream seeded with `seed` and uses it for all later updates.
#[no_mangle]
pub unsafe extern "C" fn ipr_store_new(
    graph: *const IprGraph,
    walks_per_node: usize,
    epsilon: f64,
    seed: u64,
    out: *mut *mut IprWalkStore,
) -> IprStatus {
    guard(|| {
        let g = as_ref(graph)?;
        let out = as_mut(out)?;
        let mut rng = RngStream::new(seed);
        let store = check(WalkStore::init(&g.0, walks_per_node, epsilon, &mut rng))?;
        *out = Box::into_raw(Box::new(IprWalkStore { store, rng }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ipr_store_free(store: *mut IprWalkStore) {
    free(store)
}

/// Walk maintenance after `(u, v)` was added to `graph`. `out_delta` (may
/// be null) receives the work done by this arrival.
#[no_mangle]
pub unsafe extern "C" fn ipr_store_on_edge_arrival(
    store: *mut IprWalkStore,
    graph: *const IprGraph,
    u: u32,
    v: u32,
    out_delta: *mut IprUpdateStats,
) -> IprStatus {
    guard(|| {
        let s = as_mut(store)?;
        let g = as_ref(graph)?;
        let delta = check(s.store.on_edge_arrival(&g.0, NodeId(u), NodeId(v), &mut s.rng))?;
        if let Some(out) = out_delta.as_mut() {
            *out = delta.into();
        }
        Ok(())
    })
}

/// Totals over every arrival processed by this store.
#[no_mangle]
pub unsafe extern "C" fn ipr_store_stats(
    store: *const IprWalkStore,
    out: *mut IprUpdateStats,
) -> IprStatus {
    guard(|| {
        let s = as_ref(store)?;
        *as_mut(out)? = s.store.stats().into();
        Ok(())
    })
}

/// Writes the visit-frequency estimate into `scores[0..node_count]`.
#[no_mangle]
pub unsafe extern "C" fn ipr_store_estimate(
    store: *const IprWalkStore,
    scores: *mut f64,
    len: usize,
) -> IprStatus {
    guard(|| {
        let s = as_ref(store)?;
        if scores.is_null() {
            return Err(IprStatus::NullPointer);
        }
        let n = s.store.node_count();
        if len < n {
            return Err(IprStatus::BufferTooSmall);
        }
        let out = std::slice::from_raw_parts_mut(scores, n);
        out.copy_from_slice(&estimate(&s.store).0);
        Ok(())
    })
}

/// Per-node occurrence counts over all walk positions.
#[no_mangle]
pub unsafe extern "C" fn ipr_store_visit_counts(
    store: *const IprWalkStore,
    counts: *mut u64,
    len: usize,
) -> IprStatus {
    guard(|| {
        let s = as_ref(store)?;
        if counts.is_null() {
            return Err(IprStatus::NullPointer);
        }
        let n = s.store.node_count();
        if len < n {
            return Err(IprStatus::BufferTooSmall);
        }
        std::slice::from_raw_parts_mut(counts, n).copy_from_slice(&s.store.visit_counts());
        Ok(())
    })
}

fn boxed_script(result: incr_pagerank::Result<ArrivalScript>, out: &mut *mut IprScript) -> Result<(), IprStatus> {
    *out = Box::into_raw(Box::new(IprScript(check(result)?)));
    Ok(())
}

/// Binary family of top-row width `n_top` (a power of two, at least 2).
#[no_mangle]
pub unsafe extern "C" fn ipr_script_build_binary(n_top: usize, out: *mut *mut IprScript) -> IprStatus {
    guard(|| boxed_script(build_binary(n_top), as_mut(out)?))
}

/// `d`-ary family of top-row width `n_top`.
#[no_mangle]
pub unsafe extern "C" fn ipr_script_build_dary(
    n_top: usize,
    d: usize,
    out: *mut *mut IprScript,
) -> IprStatus {
    guard(|| boxed_script(build_dary(n_top, d), as_mut(out)?))
}

/// A uniformly permuted copy of `script`.
#[no_mangle]
pub unsafe extern "C" fn ipr_script_random_order(
    script: *const IprScript,
    seed: u64,
    out: *mut *mut IprScript,
) -> IprStatus {
    guard(|| {
        let s = as_ref(script)?;
        let out = as_mut(out)?;
        let shuffled = random_order(&s.0, &mut RngStream::with_stream(seed, 1));
        *out = Box::into_raw(Box::new(IprScript(shuffled)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ipr_script_free(script: *mut IprScript) {
    free(script)
}

#[no_mangle]
pub unsafe extern "C" fn ipr_script_node_count(script: *const IprScript, out: *mut usize) -> IprStatus {
    guard(|| {
        let s = as_ref(script)?;
        *as_mut(out)? = s.0.node_count;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ipr_script_edge_count(script: *const IprScript, out: *mut usize) -> IprStatus {
    guard(|| {
        let s = as_ref(script)?;
        *as_mut(out)? = s.0.edge_count();
        Ok(())
    })
}

/// Edge `index` in arrival order and its row label (−1 for top-row edges).
#[no_mangle]
pub unsafe extern "C" fn ipr_script_edge(
    script: *const IprScript,
    index: usize,
    out_u: *mut u32,
    out_v: *mut u32,
    out_row: *mut i32,
) -> IprStatus {
    guard(|| {
        let s = as_ref(script)?;
        let (out_u, out_v, out_row) = (as_mut(out_u)?, as_mut(out_v)?, as_mut(out_row)?);
        let &(u, v) = s.0.edges.get(index).ok_or(IprStatus::InvalidArgument)?;
        *out_u = u.0;
        *out_v = v.0;
        *out_row = s.0.rows[index];
        Ok(())
    })
}

/// Replays `script` from an empty graph and reports the counters.
#[no_mangle]
pub unsafe extern "C" fn ipr_replay(
    script: *const IprScript,
    walks_per_node: usize,
    epsilon: f64,
    seed: u64,
    out: *mut IprRunSummary,
) -> IprStatus {
    guard(|| {
        let s = as_ref(script)?;
        let out = as_mut(out)?;
        let r = check(replay(&s.0, walks_per_node, epsilon, seed))?;
        *out = IprRunSummary {
            node_count: r.n as u64,
            edge_count: r.m as u64,
            reroutes_total: r.reroutes_total,
            reroutes_toprow: r.reroutes_toprow,
            top_edge_reroutes: r.top_edge_reroutes,
            steps_regenerated: r.steps_regenerated,
            coin_flips: r.coin_flips,
            wall_ms: r.wall_ms,
        };
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ipr_harmonic(d: usize) -> f64 {
    harmonic(d)
}

#[no_mangle]
pub extern "C" fn ipr_predicted_row_updates(
    walks_per_node: usize,
    n_top: usize,
    epsilon: f64,
    d: usize,
    row: u32,
) -> f64 {
    predicted_row_updates(walks_per_node, n_top, epsilon, d, row)
}

#[no_mangle]
pub extern "C" fn ipr_predicted_total(walks_per_node: usize, n_top: usize, epsilon: f64, d: usize) -> f64 {
    predicted_total(walks_per_node, n_top, epsilon, d)
}
