//! Adversarial arrival scripts and their predicted reroute counts.
//!
//! Both families are a top row of `N` nodes pointing at the root of a tree.
//! The top edges arrive first, then the tree edges in preorder, children of a
//! node in index order. A walk from the top row therefore reaches a row-`i`
//! node `u` only through ancestors whose already-arrived children it picks
//! uniformly, which is where the `((1 − ε) H_d)^i` growth per row comes from.
//!
//! Node numbering: top-row nodes are `0..N`; tree node `t` (1-based heap
//! index, root `t = 1`, children of `t` are `d(t − 1) + 2 ..= d(t − 1) + d + 1`)
//! is node `N + t − 1`. Row labels are depths in the tree with the root at 0.
//! A tree edge carries the row of its tail; top-row edges carry −1.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{parse_node, DynGraph, NodeId};

/// Row label of edges that are not tree edges.
pub const TOP_ROW: i32 = -1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Top row of `n_top` nodes over a binary tree of `n_top − 1` nodes.
    Binary { n_top: usize },
    /// Top row of `n_top` nodes over a `d`-ary tree of `n_top` nodes.
    Dary { n_top: usize, d: usize },
    /// Imported edge list without construction metadata.
    Custom,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Binary { .. } => "binary",
            Family::Dary { .. } => "dary",
            Family::Custom => "custom",
        }
    }

    pub fn branching(&self) -> usize {
        match *self {
            Family::Binary { .. } => 2,
            Family::Dary { d, .. } => d,
            Family::Custom => 0,
        }
    }

    /// Width `N` of the top row; 0 for custom scripts.
    pub fn top_width(&self) -> usize {
        match *self {
            Family::Binary { n_top } | Family::Dary { n_top, .. } => n_top,
            Family::Custom => 0,
        }
    }
}

/// How an arrival script orders its edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OrderMode {
    /// The construction's own order (or the file's order for imported lists).
    Adversarial,
    /// A uniform permutation of the construction's edges.
    Random,
}

impl OrderMode {
    pub fn name(&self) -> &'static str {
        match self {
            OrderMode::Adversarial => "adversarial",
            OrderMode::Random => "random",
        }
    }
}

/// Edges in arrival order with a row label per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalScript {
    pub node_count: usize,
    pub edges: Vec<(NodeId, NodeId)>,
    pub rows: Vec<i32>,
    pub family: Family,
    pub order: OrderMode,
}

impl ArrivalScript {
    /// A custom script; every edge is labeled [`TOP_ROW`].
    pub fn from_edges(node_count: usize, edges: Vec<(NodeId, NodeId)>) -> Result<Self> {
        let script = Self {
            node_count,
            rows: vec![TOP_ROW; edges.len()],
            edges,
            family: Family::Custom,
            order: OrderMode::Adversarial,
        };
        script.to_graph()?;
        Ok(script)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Whether `node` belongs to the top row of the construction.
    pub fn is_top_row(&self, node: NodeId) -> bool {
        node.index() < self.family.top_width()
    }

    /// Largest row label, or `None` if no edge is a tree edge.
    pub fn max_row(&self) -> Option<i32> {
        self.rows.iter().copied().filter(|&r| r >= 0).max()
    }

    /// The final graph. Fails on duplicate edges, self-loops or bad ids.
    pub fn to_graph(&self) -> Result<DynGraph> {
        crate::graph::graph_from_edges(self.node_count, &self.edges)
    }

    /// Writes a `# ...` metadata header and one `u v row` line per edge.
    pub fn write_labeled<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# family={} d={} N={} n={} m={} order={}",
            self.family.name(),
            self.family.branching(),
            self.family.top_width(),
            self.node_count,
            self.edges.len(),
            self.order.name()
        )?;
        for (&(u, v), row) in self.edges.iter().zip(&self.rows) {
            writeln!(out, "{u} {v} {row}")?;
        }
        Ok(())
    }

    /// Reads the format of [`ArrivalScript::write_labeled`]. Plain `u v`
    /// edge lists are accepted too; missing metadata makes the script
    /// custom with `n = max id + 1`.
    pub fn read_labeled<R: BufRead>(input: R) -> Result<Self> {
        let mut header: Option<(String, usize, usize, usize)> = None;
        let mut order = OrderMode::Adversarial;
        let mut edges = Vec::new();
        let mut rows = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let lineno = lineno + 1;
            if let Some(comment) = line.strip_prefix('#') {
                if header.is_none() && comment.contains("family=") {
                    header = Some(parse_header(comment, lineno)?);
                    if comment.split_whitespace().any(|f| f == "order=random") {
                        order = OrderMode::Random;
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let u = parse_node(fields.next(), lineno)?;
            let v = parse_node(fields.next(), lineno)?;
            let row = match fields.next() {
                Some(f) => f.parse::<i32>().map_err(|e| Error::Parse {
                    line: lineno,
                    message: format!("bad row label {f:?}: {e}"),
                })?,
                None => TOP_ROW,
            };
            edges.push((u, v));
            rows.push(row);
        }
        let max_id = edges
            .iter()
            .map(|&(u, v)| u.index().max(v.index()) + 1)
            .max()
            .unwrap_or(1);
        let (family, node_count) = match header {
            Some((name, d, n_top, n)) => {
                let family = match name.as_str() {
                    "binary" => Family::Binary { n_top },
                    "dary" => Family::Dary { n_top, d },
                    _ => Family::Custom,
                };
                (family, n)
            }
            None => (Family::Custom, max_id),
        };
        let script = Self {
            node_count,
            edges,
            rows,
            family,
            order,
        };
        script.to_graph()?;
        Ok(script)
    }
}

fn parse_header(comment: &str, line: usize) -> Result<(String, usize, usize, usize)> {
    let mut name = String::new();
    let (mut d, mut n_top, mut n) = (0, 0, 0);
    for field in comment.split_whitespace() {
        let Some((key, value)) = field.split_once('=') else {
            continue;
        };
        let number = || {
            value.parse::<usize>().map_err(|e| Error::Parse {
                line,
                message: format!("bad header field {field:?}: {e}"),
            })
        };
        match key {
            "family" => name = value.to_string(),
            "d" => d = number()?,
            "N" => n_top = number()?,
            "n" => n = number()?,
            _ => {}
        }
    }
    Ok((name, d, n_top, n))
}

/// Depth of heap node `t` (1-based) in a `d`-ary heap.
pub fn heap_depth(t: usize, d: usize) -> usize {
    debug_assert!(t >= 1 && d >= 2);
    let mut depth = 0;
    let mut level_start = 1;
    let mut level_size = 1;
    while t >= level_start + level_size {
        level_start += level_size;
        level_size *= d;
        depth += 1;
    }
    depth
}

fn build_tree(n_top: usize, tree_size: usize, d: usize, family: Family) -> ArrivalScript {
    let node_of = |t: usize| NodeId::from(n_top + t - 1);
    let mut edges = Vec::with_capacity(n_top + tree_size - 1);
    let mut rows = Vec::with_capacity(edges.capacity());
    for s in 0..n_top {
        edges.push((NodeId::from(s), node_of(1)));
        rows.push(TOP_ROW);
    }
    preorder(1, tree_size, d, &mut |parent, child| {
        edges.push((node_of(parent), node_of(child)));
        rows.push(heap_depth(parent, d) as i32);
    });
    ArrivalScript {
        node_count: n_top + tree_size,
        edges,
        rows,
        family,
        order: OrderMode::Adversarial,
    }
}

/// Preorder: a child's whole subtree arrives before its next sibling's edge.
/// Recursion depth is the tree height, ⌊log_d size⌋.
fn preorder(t: usize, tree_size: usize, d: usize, emit: &mut impl FnMut(usize, usize)) {
    let first = d * (t - 1) + 2;
    for child in (first..first + d).take_while(|&c| c <= tree_size) {
        emit(t, child);
        preorder(child, tree_size, d, emit);
    }
}

/// Top row of `n_top` nodes over a balanced binary tree of `n_top − 1`
/// nodes: `n = 2N − 1`, `m = 2N − 2`.
pub fn build_binary(n_top: usize) -> Result<ArrivalScript> {
    if n_top < 2 || !n_top.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n_top));
    }
    Ok(build_tree(n_top, n_top - 1, 2, Family::Binary { n_top }))
}

/// Top row of `n_top` nodes over a complete `d`-ary tree of `n_top` nodes
/// filled level by level: `n = 2N`, `m = 2N − 1`.
pub fn build_dary(n_top: usize, d: usize) -> Result<ArrivalScript> {
    if n_top == 0 {
        return Err(Error::EmptyTree(n_top));
    }
    if d < 2 {
        return Err(Error::InvalidBranching(d));
    }
    Ok(build_tree(n_top, n_top, d, Family::Dary { n_top, d }))
}

/// The same edges in a uniformly random order, labels kept with their edges.
pub fn random_order<R: Rng + ?Sized>(script: &ArrivalScript, rng: &mut R) -> ArrivalScript {
    let mut order: Vec<usize> = (0..script.edges.len()).collect();
    order.shuffle(rng);
    ArrivalScript {
        node_count: script.node_count,
        edges: order.iter().map(|&i| script.edges[i]).collect(),
        rows: order.iter().map(|&i| script.rows[i]).collect(),
        family: script.family,
        order: OrderMode::Random,
    }
}

/// `H_d = 1 + 1/2 + ... + 1/d`.
pub fn harmonic(d: usize) -> f64 {
    (1..=d).map(|j| 1.0 / j as f64).sum()
}

/// Per-row amplification `(1 − ε) H_d`.
pub fn growth_factor(epsilon: f64, d: usize) -> f64 {
    (1.0 - epsilon) * harmonic(d)
}

/// `log_d((1 − ε) H_d)`: the exponent of `m` in the total update count.
pub fn growth_exponent(epsilon: f64, d: usize) -> f64 {
    growth_factor(epsilon, d).ln() / (d as f64).ln()
}

/// Expected reroutes of top-row walks while row-`row` edges arrive:
/// `R N ((1 − ε) H_d)^row`.
pub fn predicted_row_updates(
    walks_per_node: usize,
    n_top: usize,
    epsilon: f64,
    d: usize,
    row: u32,
) -> f64 {
    let base = (walks_per_node * n_top) as f64;
    base * growth_factor(epsilon, d).powi(row as i32)
}

/// `⌊log_d N⌋`, computed without floating point.
pub fn full_rows(n_top: usize, d: usize) -> u32 {
    let mut rows = 0;
    let mut size = d;
    while size <= n_top {
        rows += 1;
        match size.checked_mul(d) {
            Some(next) => size = next,
            None => break,
        }
    }
    rows
}

/// Sum of [`predicted_row_updates`] over rows `0..⌊log_d N⌋`:
/// `R N (x^rows − 1) / (x − 1)` with `x = (1 − ε) H_d`, or `rows R N` when
/// `x = 1`.
pub fn predicted_total(walks_per_node: usize, n_top: usize, epsilon: f64, d: usize) -> f64 {
    let rows = full_rows(n_top, d);
    let base = (walks_per_node * n_top) as f64;
    let x = growth_factor(epsilon, d);
    if (x - 1.0).abs() < 1e-12 {
        rows as f64 * base
    } else {
        base * (x.powi(rows as i32) - 1.0) / (x - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn id(i: usize) -> NodeId {
        NodeId::from(i)
    }

    #[test]
    fn binary_smallest_member() {
        let s = build_binary(2).unwrap();
        assert_eq!((s.node_count, s.edge_count()), (3, 2));
        assert_eq!(s.edges, vec![(id(0), id(2)), (id(1), id(2))]);
        assert_eq!(s.rows, vec![TOP_ROW, TOP_ROW]);
    }

    #[test]
    fn binary_rejects_non_power_of_two() {
        for bad in [0, 1, 3, 12] {
            assert!(matches!(build_binary(bad), Err(Error::NotPowerOfTwo(_))));
        }
    }

    #[test]
    fn binary_sixteen_rows() {
        let s = build_binary(16).unwrap();
        assert_eq!((s.node_count, s.edge_count()), (31, 30));
        // Nodes per tree row, read off the child endpoints.
        let mut per_row = [0usize; 4];
        per_row[0] = 1;
        for (&(_, v), &row) in s.edges.iter().zip(&s.rows) {
            if row >= 0 {
                per_row[row as usize + 1] += 1;
                assert_eq!(heap_depth(v.index() - 16 + 1, 2), row as usize + 1);
            }
        }
        assert_eq!(per_row, [1, 2, 4, 8]);
        let g = s.to_graph().unwrap();
        assert_eq!(g.edge_count(), 30);
        assert_eq!(g.outdegree(id(16)).unwrap(), 2);
    }

    #[test]
    fn binary_eight_emission_order() {
        let s = build_binary(8).unwrap();
        let root = id(8);
        assert!(s.edges[..8].iter().all(|&(_, v)| v == root));
        // Root is heap node 1, its left child heap node 2 = id 9.
        assert_eq!(s.edges[8], (root, id(9)));
        // Then the left subtree (2 -> 4, 2 -> 5) before the root's right edge.
        assert_eq!(
            &s.edges[9..],
            &[(id(9), id(11)), (id(9), id(12)), (root, id(10)), (id(10), id(13)), (id(10), id(14))]
        );
    }

    #[test]
    fn dary_counts() {
        let s = build_dary(13, 3).unwrap();
        assert_eq!((s.node_count, s.edge_count()), (26, 25));
        let g = s.to_graph().unwrap();
        let tree_row = |t: usize| heap_depth(t, 3);
        let mut per_row = [0usize; 3];
        for t in 1..=13 {
            per_row[tree_row(t)] += 1;
        }
        assert_eq!(per_row, [1, 3, 9]);
        assert_eq!(g.outdegree(id(13)).unwrap(), 3);

        let s = build_dary(1, 4).unwrap();
        assert_eq!((s.node_count, s.edge_count()), (2, 1));
        assert!(matches!(build_dary(0, 2), Err(Error::EmptyTree(0))));
        assert!(matches!(build_dary(4, 1), Err(Error::InvalidBranching(1))));
    }

    #[test]
    fn dary_two_extends_binary_by_one_node() {
        let b = build_binary(16).unwrap();
        let d = build_dary(16, 2).unwrap();
        assert_eq!(d.node_count, b.node_count + 1);
        // Shift ids: binary tree nodes sit at 16.., same as d-ary. The only
        // extra edge is heap 8 -> heap 16, the left child of the first leaf
        // row's first node.
        let extra: Vec<_> = d.edges.iter().filter(|e| !b.edges.contains(e)).collect();
        assert_eq!(extra, vec![&(id(16 + 7), id(16 + 15))]);
        let common: Vec<_> = d.edges.iter().filter(|e| b.edges.contains(e)).copied().collect();
        assert_eq!(common, b.edges);
    }

    #[test]
    fn dary_has_at_least_floor_log_rows() {
        for (n_top, d) in [(243, 3), (100, 4), (17, 2), (1, 5)] {
            let s = build_dary(n_top, d).unwrap();
            let deepest_node = heap_depth(n_top, d) as u32;
            assert_eq!(s.max_row().map_or(0, |r| r as u32 + 1), deepest_node);
            assert!(deepest_node >= full_rows(n_top, d));
        }
    }

    #[test]
    fn preorder_puts_left_subtree_before_right_edge() {
        let s = build_binary(64).unwrap();
        let n_top = 64;
        let pos = |e: (NodeId, NodeId)| s.edges.iter().position(|&x| x == e).unwrap();
        let node = |t: usize| id(n_top + t - 1);
        for t in 1..n_top / 2 {
            let (l, r) = (2 * t, 2 * t + 1);
            let right_edge = pos((node(t), node(r)));
            assert!(pos((node(t), node(l))) < right_edge);
            // Every edge inside the left subtree precedes the right edge.
            let mut stack = vec![l];
            while let Some(x) = stack.pop() {
                for c in [2 * x, 2 * x + 1] {
                    if c < n_top {
                        assert!(pos((node(x), node(c))) < right_edge);
                        stack.push(c);
                    }
                }
            }
        }
    }

    #[test]
    fn binary_rows_split_binomially_by_right_turns() {
        // Heap node t at depth i: the bits of t below the leading one spell
        // the root path, 1 = right turn.
        for depth in 0..10u32 {
            let mut by_right = vec![0u64; depth as usize + 1];
            for t in (1usize << depth)..(1usize << (depth + 1)) {
                by_right[(t - (1 << depth)).count_ones() as usize] += 1;
            }
            let total: u64 = by_right.iter().sum();
            assert_eq!(total, 1 << depth);
            let mut binom = 1u64;
            for (k, &count) in by_right.iter().enumerate() {
                assert_eq!(count, binom);
                binom = binom * (depth as u64 - k as u64) / (k as u64 + 1);
            }
        }
    }

    #[test]
    fn count_identities() {
        for h in 1..=10 {
            let s = build_binary(1 << h).unwrap();
            assert_eq!(s.node_count, 2 * (1 << h) - 1);
            assert_eq!(s.edge_count(), 2 * (1 << h) - 2);
            assert_eq!(s.rows.len(), s.edge_count());
        }
        for (n_top, d) in [(1, 2), (5, 3), (40, 3), (81, 3), (100, 5)] {
            let s = build_dary(n_top, d).unwrap();
            assert_eq!(s.node_count, 2 * n_top);
            assert_eq!(s.edge_count(), 2 * n_top - 1);
            s.to_graph().unwrap();
        }
    }

    #[test]
    fn random_order_is_a_permutation() {
        let s = build_binary(16).unwrap();
        let shuffled = random_order(&s, &mut RngStream::new(3));
        let mut a: Vec<_> = s.edges.iter().zip(&s.rows).collect();
        let mut b: Vec<_> = shuffled.edges.iter().zip(&shuffled.rows).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(shuffled.order, OrderMode::Random);
        let other = random_order(&s, &mut RngStream::new(4));
        assert_ne!(shuffled.edges, other.edges);

        let one = ArrivalScript::from_edges(2, vec![(id(0), id(1))]).unwrap();
        assert_eq!(random_order(&one, &mut RngStream::new(0)).edges, one.edges);
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(1), 1.0);
        assert_eq!(harmonic(2), 1.5);
        assert!((harmonic(3) - 11.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn row_prediction_values() {
        assert_eq!(predicted_row_updates(7, 9, 0.4, 3, 0), 63.0);
        let v = predicted_row_updates(50, 4096, 0.2, 2, 5);
        assert!((v - 509_607.936).abs() < 1e-6, "{v}");
        assert_eq!(predicted_row_updates(1, 1, 1.0, 2, 1), 0.0);
    }

    #[test]
    fn exponents() {
        assert!((growth_exponent(0.2, 2) - 0.2630).abs() < 1e-4);
        assert!((growth_exponent(0.35, 3) - 0.160).abs() < 1e-3);
        // At ε >= 1/3 the binary factor drops to 1 or below.
        assert!(growth_factor(1.0 / 3.0, 2) <= 1.0 + 1e-15);
        let rows = full_rows(1024, 2) as f64;
        assert!(predicted_total(3, 1024, 0.4, 2) <= rows * 3.0 * 1024.0);
        assert!((predicted_total(3, 1024, 1.0 / 3.0, 2) - rows * 3.0 * 1024.0).abs() < 1e-6);
    }

    #[test]
    fn total_is_sum_of_rows() {
        for (n_top, d, eps) in [(1024, 2, 0.2), (729, 3, 0.35), (100, 4, 0.1)] {
            let sum: f64 = (0..full_rows(n_top, d))
                .map(|i| predicted_row_updates(10, n_top, eps, d, i))
                .sum();
            let total = predicted_total(10, n_top, eps, d);
            assert!((sum - total).abs() < 1e-9 * total);
        }
        assert_eq!(full_rows(4096, 2), 12);
        assert_eq!(full_rows(243, 3), 5);
        assert_eq!(full_rows(242, 3), 4);
    }

    #[test]
    fn labeled_text_round_trip() {
        let s = build_dary(10, 3).unwrap();
        let mut buf = Vec::new();
        s.write_labeled(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# family=dary d=3 N=10 n=20 m=19 order=adversarial\n0 10 -1\n"));
        assert_eq!(ArrivalScript::read_labeled(&buf[..]).unwrap(), s);

        let shuffled = random_order(&s, &mut RngStream::new(1));
        let mut buf = Vec::new();
        shuffled.write_labeled(&mut buf).unwrap();
        assert_eq!(ArrivalScript::read_labeled(&buf[..]).unwrap(), shuffled);

        let plain = ArrivalScript::read_labeled("0 1\n1 2\n".as_bytes()).unwrap();
        assert_eq!(plain.family, Family::Custom);
        assert_eq!(plain.node_count, 3);
        assert_eq!(plain.rows, vec![TOP_ROW, TOP_ROW]);
        assert!(ArrivalScript::read_labeled("0 1\n0 1\n".as_bytes()).is_err());
    }
}
