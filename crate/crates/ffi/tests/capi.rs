use std::ffi::CStr;
use std::ptr;

use incr_pagerank::adversary::{build_binary, harmonic, predicted_total};
use incr_pagerank::experiment::replay;
use incr_pagerank_ffi::*;

fn graph(n: usize) -> *mut IprGraph {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ipr_graph_new(n, &mut g) }, IprStatus::Ok);
    assert!(!g.is_null());
    g
}

#[test]
fn graph_round_trip_and_error_codes() {
    let g = graph(3);
    unsafe {
        let mut degree = 0usize;
        assert_eq!(ipr_graph_add_edge(g, 0, 1, &mut degree), IprStatus::Ok);
        assert_eq!(degree, 1);
        assert_eq!(ipr_graph_add_edge(g, 0, 2, ptr::null_mut()), IprStatus::Ok);
        assert_eq!(ipr_graph_add_edge(g, 0, 1, &mut degree), IprStatus::DuplicateEdge);
        assert_eq!(ipr_graph_add_edge(g, 2, 2, &mut degree), IprStatus::SelfLoop);
        assert_eq!(ipr_graph_add_edge(g, 0, 9, &mut degree), IprStatus::NodeOutOfRange);
        assert_eq!(degree, 1, "out-param untouched on error");

        ipr_graph_outdegree(g, 0, &mut degree);
        assert_eq!(degree, 2);
        let mut count = 0usize;
        ipr_graph_edge_count(g, &mut count);
        assert_eq!(count, 2);
        ipr_graph_node_count(g, &mut count);
        assert_eq!(count, 3);
        let mut v = 0u32;
        assert_eq!(ipr_graph_out_neighbor(g, 0, 1, &mut v), IprStatus::Ok);
        assert_eq!(v, 2);
        assert_eq!(ipr_graph_out_neighbor(g, 0, 2, &mut v), IprStatus::NodeOutOfRange);
        ipr_graph_free(g);
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        assert_eq!(ipr_graph_new(3, ptr::null_mut()), IprStatus::NullPointer);
        assert_eq!(
            ipr_graph_add_edge(ptr::null_mut(), 0, 1, ptr::null_mut()),
            IprStatus::NullPointer
        );
        let mut n = 0usize;
        assert_eq!(ipr_script_edge_count(ptr::null(), &mut n), IprStatus::NullPointer);
        ipr_graph_free(ptr::null_mut());
        ipr_store_free(ptr::null_mut());
        ipr_script_free(ptr::null_mut());
    }
}

#[test]
fn invalid_arguments() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(ipr_graph_new(0, &mut out), IprStatus::InvalidArgument);
        let mut s = ptr::null_mut();
        assert_eq!(ipr_script_build_binary(6, &mut s), IprStatus::InvalidArgument);
        assert!(s.is_null());
        let g = graph(2);
        let mut store = ptr::null_mut();
        assert_eq!(ipr_store_new(g, 1, 1.5, 0, &mut store), IprStatus::InvalidArgument);
        assert_eq!(ipr_store_new(g, 0, 0.2, 0, &mut store), IprStatus::InvalidArgument);
        ipr_graph_free(g);
    }
}

#[test]
fn store_tracks_arrivals() {
    let g = graph(4);
    let mut store = ptr::null_mut();
    unsafe {
        assert_eq!(ipr_store_new(g, 20, 0.2, 7, &mut store), IprStatus::Ok);
        assert_eq!(
            ipr_store_on_edge_arrival(store, g, 0, 1, ptr::null_mut()),
            IprStatus::EdgeNotInGraph
        );

        let mut total = IprUpdateStats::default();
        for (u, v) in [(0, 1), (1, 2), (2, 0), (2, 3)] {
            assert_eq!(ipr_graph_add_edge(g, u, v, ptr::null_mut()), IprStatus::Ok);
            let mut delta = IprUpdateStats::default();
            assert_eq!(ipr_store_on_edge_arrival(store, g, u, v, &mut delta), IprStatus::Ok);
            total.reroute_events += delta.reroute_events;
            total.steps_regenerated += delta.steps_regenerated;
            total.coin_flips += delta.coin_flips;
        }
        let mut stats = IprUpdateStats::default();
        ipr_store_stats(store, &mut stats);
        assert_eq!(stats, total);
        // First arrival at a dangling node reroutes every walk that visits it.
        assert!(stats.reroute_events > 0);

        let mut small = [0.0; 3];
        assert_eq!(ipr_store_estimate(store, small.as_mut_ptr(), 3), IprStatus::BufferTooSmall);
        let mut scores = [0.0; 4];
        assert_eq!(ipr_store_estimate(store, scores.as_mut_ptr(), 4), IprStatus::Ok);
        assert!((scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let mut counts = [0u64; 4];
        assert_eq!(ipr_store_visit_counts(store, counts.as_mut_ptr(), 4), IprStatus::Ok);
        let visits: u64 = counts.iter().sum();
        for (c, s) in counts.iter().zip(scores) {
            assert!((*c as f64 / visits as f64 - s).abs() < 1e-12);
        }
        ipr_store_free(store);
        ipr_graph_free(g);
    }
}

#[test]
fn scripts_match_core_builders() {
    let expected = build_binary(8).unwrap();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(ipr_script_build_binary(8, &mut s), IprStatus::Ok);
        let (mut n, mut m) = (0usize, 0usize);
        ipr_script_node_count(s, &mut n);
        ipr_script_edge_count(s, &mut m);
        assert_eq!((n, m), (expected.node_count, expected.edge_count()));
        for i in 0..m {
            let (mut u, mut v, mut row) = (0u32, 0u32, 0i32);
            assert_eq!(ipr_script_edge(s, i, &mut u, &mut v, &mut row), IprStatus::Ok);
            assert_eq!((u, v), (expected.edges[i].0 .0, expected.edges[i].1 .0));
            assert_eq!(row, expected.rows[i]);
        }
        let (mut u, mut v, mut row) = (0u32, 0u32, 0i32);
        assert_eq!(ipr_script_edge(s, m, &mut u, &mut v, &mut row), IprStatus::InvalidArgument);

        let mut shuffled = ptr::null_mut();
        assert_eq!(ipr_script_random_order(s, 3, &mut shuffled), IprStatus::Ok);
        let mut m2 = 0usize;
        ipr_script_edge_count(shuffled, &mut m2);
        assert_eq!(m2, m);
        ipr_script_free(shuffled);

        let mut d = ptr::null_mut();
        assert_eq!(ipr_script_build_dary(9, 3, &mut d), IprStatus::Ok);
        ipr_script_free(d);
        assert_eq!(ipr_script_build_dary(9, 1, &mut d), IprStatus::InvalidArgument);
        ipr_script_free(s);
    }
}

#[test]
fn replay_matches_core() {
    let script = build_binary(16).unwrap();
    let record = replay(&script, 5, 0.2, 11).unwrap();
    let mut s = ptr::null_mut();
    let mut summary = IprRunSummary::default();
    unsafe {
        ipr_script_build_binary(16, &mut s);
        assert_eq!(ipr_replay(s, 5, 0.2, 11, &mut summary), IprStatus::Ok);
        ipr_script_free(s);
    }
    assert_eq!(summary.node_count, record.n as u64);
    assert_eq!(summary.edge_count, record.m as u64);
    assert_eq!(summary.reroutes_total, record.reroutes_total);
    assert_eq!(summary.reroutes_toprow, record.reroutes_toprow);
    assert_eq!(summary.top_edge_reroutes, record.top_edge_reroutes);
    assert_eq!(summary.steps_regenerated, record.steps_regenerated);
    assert_eq!(summary.coin_flips, record.coin_flips);
}

#[test]
fn predictors_forward() {
    assert_eq!(ipr_harmonic(2), 1.5);
    assert_eq!(ipr_harmonic(3), harmonic(3));
    assert_eq!(ipr_predicted_total(10, 64, 0.2, 2), predicted_total(10, 64, 0.2, 2));
    assert!(ipr_predicted_row_updates(10, 64, 0.2, 2, 1) > ipr_predicted_row_updates(10, 64, 0.2, 2, 0));
}

#[test]
fn status_messages_are_c_strings() {
    for status in [IprStatus::Ok, IprStatus::BufferTooSmall, IprStatus::Panic] {
        let text = unsafe { CStr::from_ptr(ipr_status_message(status)) };
        assert!(!text.to_str().unwrap().is_empty());
    }
}

#[test]
fn header_declares_the_api() {
    let header = include_str!("../include/incr_pagerank.h");
    assert!(header.contains("#ifndef INCR_PAGERANK_H"));
    assert!(header.contains("typedef struct IprGraph IprGraph;"));
    assert!(header.contains("typedef struct IprWalkStore IprWalkStore;"));
    assert!(header.contains("IPR_STATUS_OK = 0"));
    assert!(header.contains("IPR_STATUS_PANIC = 8"));
    for name in [
        "ipr_graph_new", "ipr_graph_add_edge", "ipr_graph_free", "ipr_store_new",
        "ipr_store_on_edge_arrival", "ipr_store_estimate", "ipr_store_free",
        "ipr_script_build_binary", "ipr_script_edge", "ipr_replay", "ipr_predicted_total",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}
