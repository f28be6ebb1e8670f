//! Stored random walks and their maintenance under edge arrivals.
//!
//! Every node owns `R` walks. A walk has a budget `L` drawn once from
//! `P(L = k) = ε(1 − ε)^k` and always consists of exactly `L` transitions:
//! from a node with out-neighbors the next node is uniform among them, from a
//! dangling node the walk jumps back to its own source (consuming one
//! transition).
//!
//! [`WalkStore`] keeps an inverted index from each node to the `(walk,
//! position)` pairs where the walk sits at that node with budget left to
//! spend. When an edge `(u, v)` arrives, each walk listed under `u` tries its
//! occurrences in position order with a `1/d(u)` coin; the first success
//! cuts the walk after that position, sends it to `v` and regenerates the
//! remaining transitions on the current graph.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};
use crate::graph::{DynGraph, NodeId};

pub type WalkId = u32;

/// Work done by walk maintenance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateStats {
    pub reroute_events: u64,
    pub steps_regenerated: u64,
    pub coin_flips: u64,
}

impl std::ops::AddAssign for UpdateStats {
    fn add_assign(&mut self, rhs: Self) {
        self.reroute_events += rhs.reroute_events;
        self.steps_regenerated += rhs.steps_regenerated;
        self.coin_flips += rhs.coin_flips;
    }
}

/// One place where a walk sits at a node with at least one transition left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occurrence {
    pub walk: WalkId,
    pub position: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    source: NodeId,
    budget: usize,
    steps: Vec<NodeId>,
}

impl Walk {
    /// Wraps an explicit node sequence; the budget is `steps.len() - 1`.
    pub fn from_steps(steps: Vec<NodeId>) -> Result<Self> {
        let source = *steps.first().ok_or(Error::Parse {
            line: 0,
            message: "a walk needs at least its source".into(),
        })?;
        Ok(Self {
            source,
            budget: steps.len() - 1,
            steps,
        })
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn steps(&self) -> &[NodeId] {
        &self.steps
    }

    /// Appends transitions until the walk has spent its whole budget.
    fn extend<R: Rng + ?Sized>(&mut self, g: &DynGraph, rng: &mut R) {
        let mut cur = *self.steps.last().expect("walk is never empty");
        while self.steps.len() <= self.budget {
            cur = next_node(g, self.source, cur, rng);
            self.steps.push(cur);
        }
    }
}

#[inline]
fn next_node<R: Rng + ?Sized>(g: &DynGraph, source: NodeId, cur: NodeId, rng: &mut R) -> NodeId {
    let nbrs = g.neighbors(cur);
    match nbrs.len() {
        0 => source,
        1 => nbrs[0],
        d => nbrs[rng.random_range(0..d)],
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

/// Draws a walk budget with `P(L >= i) = (1 - ε)^i`.
pub fn sample_budget<R: Rng + ?Sized>(epsilon: f64, rng: &mut R) -> Result<usize> {
    check_epsilon(epsilon)?;
    let geo = Geometric::new(epsilon).map_err(|_| Error::InvalidEpsilon(epsilon))?;
    Ok(geo.sample(rng) as usize)
}

/// A fresh walk of exactly `budget` transitions from `source`.
pub fn generate_walk<R: Rng + ?Sized>(
    g: &DynGraph,
    source: NodeId,
    budget: usize,
    rng: &mut R,
) -> Result<Walk> {
    g.check_node(source)?;
    let mut walk = Walk {
        source,
        budget,
        steps: Vec::with_capacity(budget + 1),
    };
    walk.steps.push(source);
    walk.extend(g, rng);
    Ok(walk)
}

#[derive(Debug, Clone)]
pub struct WalkStore {
    walks: Vec<Walk>,
    /// `slots[w][p]` is where `(w, p)` lives inside `index[walks[w].steps[p]]`.
    slots: Vec<Vec<u32>>,
    index: Vec<Vec<Occurrence>>,
    epsilon: f64,
    walks_per_node: Option<usize>,
    stats: UpdateStats,
    scratch: Vec<Occurrence>,
}

impl WalkStore {
    /// `walks_per_node` walks from every node of `g`, each with its own
    /// sampled budget. Walk ids are source-major: walk `s * R + r` is the
    /// `r`-th walk of node `s`.
    pub fn init<R: Rng + ?Sized>(
        g: &DynGraph,
        walks_per_node: usize,
        epsilon: f64,
        rng: &mut R,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        if walks_per_node == 0 {
            return Err(Error::ZeroWalksPerNode);
        }
        let mut walks = Vec::with_capacity(g.node_count() * walks_per_node);
        for source in g.nodes() {
            for _ in 0..walks_per_node {
                let budget = sample_budget(epsilon, rng)?;
                walks.push(generate_walk(g, source, budget, rng)?);
            }
        }
        let mut store = Self::with_walks(g.node_count(), epsilon, walks);
        store.walks_per_node = Some(walks_per_node);
        Ok(store)
    }

    /// A store over explicit walks. Sources need not be balanced; every node
    /// must lie below `node_count`.
    pub fn from_walks(node_count: usize, epsilon: f64, walks: Vec<Walk>) -> Result<Self> {
        check_epsilon(epsilon)?;
        if node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        for &node in walks.iter().flat_map(|w| w.steps.iter()) {
            if node.index() >= node_count {
                return Err(Error::NodeOutOfRange { node, node_count });
            }
        }
        Ok(Self::with_walks(node_count, epsilon, walks))
    }

    fn with_walks(node_count: usize, epsilon: f64, walks: Vec<Walk>) -> Self {
        let mut store = Self {
            slots: walks.iter().map(|w| Vec::with_capacity(w.budget)).collect(),
            walks,
            index: vec![Vec::new(); node_count],
            epsilon,
            walks_per_node: None,
            stats: UpdateStats::default(),
            scratch: Vec::new(),
        };
        for w in 0..store.walks.len() {
            store.index_suffix(w, 0);
        }
        store
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn node_count(&self) -> usize {
        self.index.len()
    }

    /// `R`, when the store was built by [`WalkStore::init`].
    pub fn walks_per_node(&self) -> Option<usize> {
        self.walks_per_node
    }

    pub fn walks(&self) -> &[Walk] {
        &self.walks
    }

    pub fn walk(&self, id: WalkId) -> &Walk {
        &self.walks[id as usize]
    }

    /// Occurrences of `node` at positions with budget remaining, in no
    /// particular order.
    pub fn occurrences(&self, node: NodeId) -> &[Occurrence] {
        &self.index[node.index()]
    }

    /// Totals accumulated over every arrival processed so far.
    pub fn stats(&self) -> UpdateStats {
        self.stats
    }

    /// Walk maintenance for an edge `(u, v)` that is already in `g`.
    pub fn on_edge_arrival<R: Rng + ?Sized>(
        &mut self,
        g: &DynGraph,
        u: NodeId,
        v: NodeId,
        rng: &mut R,
    ) -> Result<UpdateStats> {
        self.on_edge_arrival_observed(g, u, v, rng, |_, _| {})
    }

    /// Like [`WalkStore::on_edge_arrival`], calling `observe` with each
    /// rerouted walk right after its suffix has been regenerated.
    pub fn on_edge_arrival_observed<R, F>(
        &mut self,
        g: &DynGraph,
        u: NodeId,
        v: NodeId,
        rng: &mut R,
        mut observe: F,
    ) -> Result<UpdateStats>
    where
        R: Rng + ?Sized,
        F: FnMut(WalkId, &Walk),
    {
        if g.node_count() != self.node_count() {
            return Err(Error::NodeCountMismatch {
                store: self.node_count(),
                graph: g.node_count(),
            });
        }
        g.check_node(u)?;
        g.check_node(v)?;
        if !g.has_edge(u, v) {
            return Err(Error::EdgeNotInGraph(u, v));
        }
        let degree = g.neighbors(u).len();

        let mut pending = std::mem::take(&mut self.scratch);
        pending.clear();
        pending.extend_from_slice(&self.index[u.index()]);
        pending.sort_unstable();

        let mut delta = UpdateStats::default();
        let mut i = 0;
        while i < pending.len() {
            let walk = pending[i].walk;
            let mut hit = None;
            while i < pending.len() && pending[i].walk == walk {
                if hit.is_none() {
                    delta.coin_flips += 1;
                    if degree == 1 || rng.random_range(0..degree) == 0 {
                        hit = Some(pending[i].position as usize);
                    }
                }
                i += 1;
            }
            if let Some(position) = hit {
                let w = walk as usize;
                delta.reroute_events += 1;
                delta.steps_regenerated += (self.walks[w].budget - position) as u64;
                self.reroute(g, w, position, v, rng);
                observe(walk, &self.walks[w]);
            }
        }

        self.scratch = pending;
        self.stats += delta;
        Ok(delta)
    }

    /// Replaces everything after `position` with `target` followed by a
    /// freshly generated remainder of the same length.
    fn reroute<R: Rng + ?Sized>(
        &mut self,
        g: &DynGraph,
        w: usize,
        position: usize,
        target: NodeId,
        rng: &mut R,
    ) {
        let budget = self.walks[w].budget;
        for p in position + 1..budget {
            self.unindex(w, p);
        }
        self.slots[w].truncate(position + 1);
        let walk = &mut self.walks[w];
        walk.steps.truncate(position + 1);
        walk.steps.push(target);
        walk.extend(g, rng);
        self.index_suffix(w, position + 1);
    }

    fn index_suffix(&mut self, w: usize, from: usize) {
        let walk = &self.walks[w];
        let slots = &mut self.slots[w];
        debug_assert_eq!(slots.len(), from);
        for p in from..walk.budget {
            let list = &mut self.index[walk.steps[p].index()];
            slots.push(list.len() as u32);
            list.push(Occurrence {
                walk: w as WalkId,
                position: p as u32,
            });
        }
    }

    fn unindex(&mut self, w: usize, p: usize) {
        let node = self.walks[w].steps[p];
        let slot = self.slots[w][p] as usize;
        let list = &mut self.index[node.index()];
        list.swap_remove(slot);
        if let Some(moved) = list.get(slot) {
            self.slots[moved.walk as usize][moved.position as usize] = slot as u32;
        }
    }

    /// Occurrences of each node over all positions, terminal ones included.
    pub fn visit_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.node_count()];
        for &node in self.walks.iter().flat_map(|w| w.steps.iter()) {
            counts[node.index()] += 1;
        }
        counts
    }

    /// Rebuilds the inverted index from walk contents and compares it, as
    /// sets, with the maintained one. Also checks walk lengths and the slot
    /// back-pointers.
    pub fn index_is_consistent(&self) -> bool {
        let mut rebuilt = vec![Vec::new(); self.node_count()];
        for (w, walk) in self.walks.iter().enumerate() {
            if walk.steps.len() != walk.budget + 1 || walk.steps[0] != walk.source {
                return false;
            }
            for p in 0..walk.budget {
                rebuilt[walk.steps[p].index()].push(Occurrence {
                    walk: w as WalkId,
                    position: p as u32,
                });
            }
        }
        for (node, expected) in rebuilt.iter_mut().enumerate() {
            let mut actual = self.index[node].clone();
            actual.sort_unstable();
            expected.sort_unstable();
            if &actual != expected {
                return false;
            }
        }
        self.slots.iter().enumerate().all(|(w, slots)| {
            let walk = &self.walks[w];
            slots.len() == walk.budget
                && slots.iter().enumerate().all(|(p, &slot)| {
                    self.index[walk.steps[p].index()].get(slot as usize)
                        == Some(&Occurrence {
                            walk: w as WalkId,
                            position: p as u32,
                        })
                })
        })
    }

    /// Transitions that are neither an edge of `g` nor a jump from a
    /// currently dangling node back to the walk's source.
    pub fn invalid_transitions(&self, g: &DynGraph) -> Vec<(WalkId, usize)> {
        let mut bad = Vec::new();
        for (w, walk) in self.walks.iter().enumerate() {
            for (p, pair) in walk.steps.windows(2).enumerate() {
                let (a, b) = (pair[0], pair[1]);
                let dangling_reset = g.neighbors(a).is_empty() && b == walk.source;
                if !dangling_reset && !g.has_edge(a, b) {
                    bad.push((w as WalkId, p));
                }
            }
        }
        bad
    }

    /// One line per walk: `walk_id source budget: v0 v1 ... vL`.
    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        for (w, walk) in self.walks.iter().enumerate() {
            write!(out, "{w} {} {}:", walk.source, walk.budget)?;
            for node in &walk.steps {
                write!(out, " {node}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}
