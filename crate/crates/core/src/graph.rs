//! Insertion-only directed graph.
//!
//! Out-adjacency lists are kept in arrival order. That order matters twice:
//! sampling a uniform out-neighbor is an O(1) index, and the adversarial
//! constructions identify "the j-th child" of a tree node with its j-th
//! arriving out-edge.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Dense node identifier in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(value: usize) -> Self {
        NodeId(u32::try_from(value).expect("node index exceeds u32"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynGraph {
    out_adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl DynGraph {
    /// A graph with `node_count` isolated nodes.
    pub fn new(node_count: usize) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(Self {
            out_adj: vec![Vec::new(); node_count],
            edge_count: 0,
        })
    }

    pub fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.out_adj.len()).map(NodeId::from)
    }

    pub fn check_node(&self, node: NodeId) -> Result<()> {
        if node.index() < self.out_adj.len() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node,
                node_count: self.out_adj.len(),
            })
        }
    }

    /// Appends `v` to the out-list of `u` and returns the new outdegree of `u`.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<usize> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let list = &mut self.out_adj[u.index()];
        if list.contains(&v) {
            return Err(Error::DuplicateEdge(u, v));
        }
        list.push(v);
        self.edge_count += 1;
        Ok(list.len())
    }

    pub fn outdegree(&self, u: NodeId) -> Result<usize> {
        self.check_node(u)?;
        Ok(self.out_adj[u.index()].len())
    }

    /// The `k`-th out-neighbor of `u` in arrival order.
    pub fn out_neighbor(&self, u: NodeId, k: usize) -> Result<NodeId> {
        self.check_node(u)?;
        let list = &self.out_adj[u.index()];
        list.get(k).copied().ok_or(Error::NeighborOutOfRange {
            node: u,
            index: k,
            degree: list.len(),
        })
    }

    /// Out-neighbors of `u` in arrival order. Panics if `u` is out of range.
    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.out_adj[u.index()]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.out_adj
            .get(u.index())
            .is_some_and(|list| list.contains(&v))
    }

    /// All edges, grouped by tail and in arrival order within each tail.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |&v| (NodeId::from(u), v)))
    }
}

/// Writes one `u v` pair per line.
pub fn write_edge_list<W: Write>(mut out: W, edges: &[(NodeId, NodeId)]) -> Result<()> {
    for (u, v) in edges {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

/// Reads `u v` pairs, one per line. Blank lines and `#` comments are skipped;
/// extra columns after the first two are ignored.
pub fn read_edge_list<R: BufRead>(input: R) -> Result<Vec<(NodeId, NodeId)>> {
    let mut edges = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let u = parse_node(fields.next(), lineno + 1)?;
        let v = parse_node(fields.next(), lineno + 1)?;
        edges.push((u, v));
    }
    Ok(edges)
}

pub(crate) fn parse_node(field: Option<&str>, line: usize) -> Result<NodeId> {
    let field = field.ok_or_else(|| Error::Parse {
        line,
        message: "expected two node ids".into(),
    })?;
    field.parse::<u32>().map(NodeId).map_err(|e| Error::Parse {
        line,
        message: format!("bad node id {field:?}: {e}"),
    })
}

/// Builds a graph by replaying `edges` in order.
pub fn graph_from_edges(node_count: usize, edges: &[(NodeId, NodeId)]) -> Result<DynGraph> {
    let mut g = DynGraph::new(node_count)?;
    for &(u, v) in edges {
        g.add_edge(u, v)?;
    }
    Ok(g)
}
