//! Visit-frequency PageRank estimate from stored walks, and the exact
//! expected visit counts of the same walk process used to check it.

use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{DynGraph, NodeId};
use crate::walk::WalkStore;

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Score of each node, indexed by node id.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(pub Vec<f64>);

impl ScoreVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Rescaled to sum to one. An all-zero vector is returned unchanged.
    pub fn normalized(&self) -> ScoreVector {
        let total = self.sum();
        if total == 0.0 {
            return self.clone();
        }
        ScoreVector(self.0.iter().map(|x| x / total).collect())
    }

    /// Half the L1 distance; both vectors are expected to be normalized.
    pub fn total_variation(&self, other: &ScoreVector) -> f64 {
        assert_eq!(self.len(), other.len(), "score vectors differ in length");
        0.5 * self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// CSV with header `node,score`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["node", "score"])?;
        for (node, score) in self.0.iter().enumerate() {
            wtr.write_record([node.to_string(), score.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// `visits(v) / Σ visits`.
pub fn estimate(store: &WalkStore) -> ScoreVector {
    let counts = store.visit_counts();
    let total: u64 = counts.iter().sum();
    ScoreVector(counts.iter().map(|&c| c as f64 / total as f64).collect())
}

/// Expected number of times one walk from `source` occupies each node.
///
/// Position `t` of the walk exists iff the budget is at least `t`, which has
/// probability `(1 − ε)^t`; the occupancy distribution at step `t` follows the
/// walk's transition rule (uniform out-neighbor, or back to `source` from a
/// dangling node). The sum stops once `(1 − ε)^t < tail_tol`.
pub fn expected_visits(
    g: &DynGraph,
    epsilon: f64,
    source: NodeId,
    tail_tol: f64,
) -> Result<ScoreVector> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    assert!(tail_tol > 0.0, "tail_tol must be positive");
    g.check_node(source)?;

    let n = g.node_count();
    let mut counts = vec![0.0; n];
    let mut occupancy = vec![0.0; n];
    let mut next = vec![0.0; n];
    occupancy[source.index()] = 1.0;
    let mut survival = 1.0;
    while survival >= tail_tol {
        for (c, q) in counts.iter_mut().zip(&occupancy) {
            *c += survival * q;
        }
        next.iter_mut().for_each(|x| *x = 0.0);
        for (u, &mass) in occupancy.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let nbrs = g.neighbors(NodeId::from(u));
            if nbrs.is_empty() {
                next[source.index()] += mass;
            } else {
                let share = mass / nbrs.len() as f64;
                for v in nbrs {
                    next[v.index()] += share;
                }
            }
        }
        std::mem::swap(&mut occupancy, &mut next);
        survival *= 1.0 - epsilon;
    }
    Ok(ScoreVector(counts))
}

/// Normalized average of [`expected_visits`] over every source: the value
/// [`estimate`] converges to when each node holds the same number of walks.
pub fn aggregate_expected(g: &DynGraph, epsilon: f64, tail_tol: f64) -> Result<ScoreVector> {
    let mut total = vec![0.0; g.node_count()];
    for s in g.nodes() {
        let visits = expected_visits(g, epsilon, s, tail_tol)?;
        for (t, x) in total.iter_mut().zip(visits.0) {
            *t += x;
        }
    }
    Ok(ScoreVector(total).normalized())
}
