//! Replay harness: runs arrival scripts through the walk engine, sweeps
//! family sizes, writes CSV, and fits log-log growth exponents.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{
    build_binary, build_dary, predicted_row_updates, random_order, ArrivalScript, OrderMode,
};
use crate::error::{Error, Result};
use crate::graph::DynGraph;
use crate::rng::RngStream;
use crate::walk::{UpdateStats, WalkStore};

/// Which construction a sweep builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Binary,
    Dary { d: usize },
}

impl FamilyKind {
    pub fn build(&self, n_top: usize) -> Result<ArrivalScript> {
        match *self {
            FamilyKind::Binary => build_binary(n_top),
            FamilyKind::Dary { d } => build_dary(n_top, d),
        }
    }

    pub fn branching(&self) -> usize {
        match *self {
            FamilyKind::Binary => 2,
            FamilyKind::Dary { d } => d,
        }
    }
}

/// Builds the family member of width `n_top` in the requested order. The
/// random permutation draws from stream 1 of `seed`, so it never overlaps
/// the walk sampler of a replay with the same seed.
pub fn family_script(
    kind: FamilyKind,
    n_top: usize,
    order: OrderMode,
    seed: u64,
) -> Result<ArrivalScript> {
    let script = kind.build(n_top)?;
    Ok(match order {
        OrderMode::Adversarial => script,
        OrderMode::Random => random_order(&script, &mut RngStream::with_stream(seed, 1)),
    })
}

/// Counters for one replay of one script.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub family: String,
    pub d: usize,
    pub n_top: usize,
    pub n: usize,
    pub m: usize,
    pub walks_per_node: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub order: OrderMode,
    pub reroutes_total: u64,
    /// Reroutes of walks whose source is a top-row node.
    pub reroutes_toprow: u64,
    pub steps_regenerated: u64,
    pub coin_flips: u64,
    /// Reroutes (all walks) during arrivals of top-row edges.
    pub top_edge_reroutes: u64,
    /// Reroutes (all walks) bucketed by the arriving edge's row.
    pub row_counts: Vec<u64>,
    /// Top-row-sourced reroutes bucketed by the arriving edge's row. Not
    /// part of the CSV.
    pub toprow_row_counts: Vec<u64>,
    pub wall_ms: f64,
}

impl RunRecord {
    /// Total reroutes normalized by the `R N` walks of the top row.
    pub fn normalized_reroutes(&self) -> f64 {
        self.reroutes_total as f64 / (self.walks_per_node * self.n_top.max(1)) as f64
    }

    /// Equality ignoring wall-clock time.
    pub fn same_counts(&self, other: &RunRecord) -> bool {
        let mut a = self.clone();
        a.wall_ms = other.wall_ms;
        &a == other
    }
}

/// Result of [`replay_full`]: the record plus the final graph and walks.
#[derive(Debug)]
pub struct ReplayOutcome {
    pub record: RunRecord,
    pub graph: DynGraph,
    pub store: WalkStore,
}

/// Starts from the script's nodes with no edges, builds the walk store, then
/// for each edge inserts it and runs walk maintenance.
pub fn replay(
    script: &ArrivalScript,
    walks_per_node: usize,
    epsilon: f64,
    seed: u64,
) -> Result<RunRecord> {
    replay_full(script, walks_per_node, epsilon, seed).map(|out| out.record)
}

pub fn replay_full(
    script: &ArrivalScript,
    walks_per_node: usize,
    epsilon: f64,
    seed: u64,
) -> Result<ReplayOutcome> {
    replay_inner(script, walks_per_node, epsilon, seed, |_, _| {})
}

/// [`replay_full`] with a callback after every arrival, for checking
/// invariants between events.
pub fn replay_checked<F>(
    script: &ArrivalScript,
    walks_per_node: usize,
    epsilon: f64,
    seed: u64,
    after_arrival: F,
) -> Result<ReplayOutcome>
where
    F: FnMut(&DynGraph, &WalkStore),
{
    replay_inner(script, walks_per_node, epsilon, seed, after_arrival)
}

fn replay_inner<F>(
    script: &ArrivalScript,
    walks_per_node: usize,
    epsilon: f64,
    seed: u64,
    mut after_arrival: F,
) -> Result<ReplayOutcome>
where
    F: FnMut(&DynGraph, &WalkStore),
{
    let started = Instant::now();
    let mut rng = RngStream::new(seed);
    let mut graph = DynGraph::new(script.node_count)?;
    let mut store = WalkStore::init(&graph, walks_per_node, epsilon, &mut rng)?;

    let rows = script.max_row().map_or(0, |r| r as usize + 1);
    let mut row_counts = vec![0u64; rows];
    let mut toprow_row_counts = vec![0u64; rows];
    let mut top_edge_reroutes = 0u64;
    let mut reroutes_toprow = 0u64;
    let mut totals = UpdateStats::default();

    for (&(u, v), &row) in script.edges.iter().zip(&script.rows) {
        graph.add_edge(u, v)?;
        let mut from_top = 0u64;
        let delta = store.on_edge_arrival_observed(&graph, u, v, &mut rng, |_, walk| {
            if script.is_top_row(walk.source()) {
                from_top += 1;
            }
        })?;
        totals += delta;
        reroutes_toprow += from_top;
        if row < 0 {
            top_edge_reroutes += delta.reroute_events;
        } else {
            row_counts[row as usize] += delta.reroute_events;
            toprow_row_counts[row as usize] += from_top;
        }
        after_arrival(&graph, &store);
    }

    let record = RunRecord {
        family: script.family.name().to_string(),
        d: script.family.branching(),
        n_top: script.family.top_width(),
        n: script.node_count,
        m: script.edge_count(),
        walks_per_node,
        epsilon,
        seed,
        order: script.order,
        reroutes_total: totals.reroute_events,
        reroutes_toprow,
        steps_regenerated: totals.steps_regenerated,
        coin_flips: totals.coin_flips,
        top_edge_reroutes,
        row_counts,
        toprow_row_counts,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    Ok(ReplayOutcome {
        record,
        graph,
        store,
    })
}

/// One replay of `script` per seed, run in parallel, returned in seed order.
pub fn replay_seeds(
    script: &ArrivalScript,
    walks_per_node: usize,
    epsilon: f64,
    seeds: &[u64],
) -> Result<Vec<RunRecord>> {
    seeds
        .par_iter()
        .map(|&seed| replay(script, walks_per_node, epsilon, seed))
        .collect()
}

/// Parameters of a sweep over family widths.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub family: FamilyKind,
    pub widths: Vec<usize>,
    pub walks_per_node: usize,
    pub epsilon: f64,
    pub seeds: Vec<u64>,
    pub orders: Vec<OrderMode>,
}

impl SweepConfig {
    /// At least three widths spanning at least two octaves.
    pub fn validate(&self) -> Result<()> {
        let mut widths = self.widths.clone();
        widths.sort_unstable();
        widths.dedup();
        let (Some(&lo), Some(&hi)) = (widths.first(), widths.last()) else {
            return Err(Error::TooFewPoints(0));
        };
        if widths.len() < 3 || hi < 4 * lo {
            return Err(Error::TooFewPoints(widths.len()));
        }
        Ok(())
    }
}

/// One record per (width, seed, order), in that nesting order. Runs execute
/// in parallel; the output order does not depend on scheduling.
pub fn sweep(config: &SweepConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let jobs: Vec<(usize, u64, OrderMode)> = config
        .widths
        .iter()
        .flat_map(|&w| {
            config
                .seeds
                .iter()
                .flat_map(move |&s| config.orders.iter().map(move |&o| (w, s, o)))
        })
        .collect();
    jobs.par_iter()
        .map(|&(width, seed, order)| {
            let script = family_script(config.family, width, order, seed)?;
            replay(&script, config.walks_per_node, config.epsilon, seed)
        })
        .collect()
}

/// Flat CSV row; column names follow the published header.
#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    family: String,
    d: usize,
    #[serde(rename = "N")]
    n_top: usize,
    n: usize,
    m: usize,
    #[serde(rename = "R")]
    walks_per_node: usize,
    epsilon: f64,
    seed: u64,
    order: OrderMode,
    reroutes_total: u64,
    reroutes_toprow: u64,
    steps_regenerated: u64,
    row_counts: String,
    wall_ms: f64,
}

pub const CSV_HEADER: &str = "family,d,N,n,m,R,epsilon,seed,order,reroutes_total,reroutes_toprow,steps_regenerated,row_counts,wall_ms";

pub fn write_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for r in records {
        wtr.serialize(CsvRow {
            family: r.family.clone(),
            d: r.d,
            n_top: r.n_top,
            n: r.n,
            m: r.m,
            walks_per_node: r.walks_per_node,
            epsilon: r.epsilon,
            seed: r.seed,
            order: r.order,
            reroutes_total: r.reroutes_total,
            reroutes_toprow: r.reroutes_toprow,
            steps_regenerated: r.steps_regenerated,
            row_counts: r
                .row_counts
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(";"),
            wall_ms: r.wall_ms,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads records written by [`write_csv`]. Fields the CSV does not carry
/// (`coin_flips`, `top_edge_reroutes`, `toprow_row_counts`) come back as
/// zero or empty, except `top_edge_reroutes`, which is recovered from the
/// row sums.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut records = Vec::new();
    for (i, row) in rdr.deserialize::<CsvRow>().enumerate() {
        let row = row?;
        let row_counts = if row.row_counts.is_empty() {
            Vec::new()
        } else {
            row.row_counts
                .split(';')
                .map(|x| {
                    x.trim().parse::<u64>().map_err(|e| Error::Parse {
                        line: i + 2,
                        message: format!("bad row count {x:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        };
        let row_sum: u64 = row_counts.iter().sum();
        records.push(RunRecord {
            family: row.family,
            d: row.d,
            n_top: row.n_top,
            n: row.n,
            m: row.m,
            walks_per_node: row.walks_per_node,
            epsilon: row.epsilon,
            seed: row.seed,
            order: row.order,
            reroutes_total: row.reroutes_total,
            reroutes_toprow: row.reroutes_toprow,
            steps_regenerated: row.steps_regenerated,
            coin_flips: 0,
            top_edge_reroutes: row.reroutes_total.saturating_sub(row_sum),
            row_counts,
            toprow_row_counts: Vec::new(),
            wall_ms: row.wall_ms,
        });
    }
    Ok(records)
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `ln y = slope · ln x + intercept`. Needs three distinct `x`.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<Fit> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::TooFewPoints(xs.len()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(Fit {
        slope,
        intercept,
        r_squared,
        points: logs.len(),
    })
}

/// Mean of `reroutes_total / (R N)` over seeds at each `m`, for one order
/// mode. Returns `(m, mean)` pairs sorted by `m`.
pub fn mean_normalized_by_m(records: &[RunRecord], order: OrderMode) -> Vec<(f64, f64)> {
    let mut by_m: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.order == order) {
        let entry = by_m.entry(r.m).or_default();
        entry.0 += r.normalized_reroutes();
        entry.1 += 1;
    }
    by_m.into_iter()
        .map(|(m, (sum, k))| (m as f64, sum / k as f64))
        .collect()
}

/// Growth exponent of normalized reroutes in `m`: seeds are averaged at
/// each `m` before taking logs.
pub fn fit_exponent(records: &[RunRecord], order: OrderMode) -> Result<Fit> {
    fit_loglog(&mean_normalized_by_m(records, order))
}

/// Empirical top-row reroutes of one row against the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowCheck {
    pub row: u32,
    pub empirical: f64,
    pub predicted: f64,
}

impl RowCheck {
    pub fn relative_error(&self) -> f64 {
        (self.empirical - self.predicted).abs() / self.predicted
    }
}

/// Averages `toprow_row_counts` over `records` (all from the same family
/// member) and pairs each row with `R N ((1 − ε) H_d)^row`.
pub fn row_table(records: &[RunRecord]) -> Vec<RowCheck> {
    let Some(first) = records.first() else {
        return Vec::new();
    };
    let rows = records
        .iter()
        .map(|r| r.toprow_row_counts.len())
        .max()
        .unwrap_or(0);
    (0..rows)
        .map(|row| {
            let sum: u64 = records
                .iter()
                .map(|r| r.toprow_row_counts.get(row).copied().unwrap_or(0))
                .sum();
            RowCheck {
                row: row as u32,
                empirical: sum as f64 / records.len() as f64,
                predicted: predicted_row_updates(
                    first.walks_per_node,
                    first.n_top,
                    first.epsilon,
                    first.d,
                    row as u32,
                ),
            }
        })
        .collect()
}
