use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("a graph needs at least one node")]
    EmptyGraph,
    #[error("node {node} is out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("edge ({0}, {1}) is already present")]
    DuplicateEdge(NodeId, NodeId),
    #[error("self-loop at node {0} is not allowed")]
    SelfLoop(NodeId),
    #[error("neighbor index {index} out of range for node {node} with outdegree {degree}")]
    NeighborOutOfRange {
        node: NodeId,
        index: usize,
        degree: usize,
    },
    #[error("teleport probability must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("walks per node must be at least 1")]
    ZeroWalksPerNode,
    #[error("edge ({0}, {1}) must be inserted into the graph before walk maintenance")]
    EdgeNotInGraph(NodeId, NodeId),
    #[error("binary family needs N = 2^h with h >= 1, got {0}")]
    NotPowerOfTwo(usize),
    #[error("d-ary family needs N >= 1, got {0}")]
    EmptyTree(usize),
    #[error("branching factor must be at least 2, got {0}")]
    InvalidBranching(usize),
    #[error("store was built for {store} nodes but the graph has {graph}")]
    NodeCountMismatch { store: usize, graph: usize },
    #[error("exponent fit needs at least 3 distinct m values, got {0}")]
    TooFewPoints(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
