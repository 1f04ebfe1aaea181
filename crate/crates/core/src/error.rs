use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no edges")]
    NoEdges,

    #[error("empty graph")]
    EmptyGraph,

    #[error("no edges to weight")]
    NoEdgesToWeight,

    #[error("graph is not connected; distances are only defined on a connected graph")]
    Disconnected,

    #[error("node {node} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error(
        "distance matrix needs {cells} cells, above the cap of {cap}; \
         subsample the network or raise the cap"
    )]
    MatrixTooLarge { cells: u64, cap: u64 },

    #[error("level above cap ({level} > {cap})")]
    LevelAboveCap { level: u32, cap: u32 },

    #[error("degenerate scaling range: {found} usable box sizes, at least 3 are needed")]
    DegenerateScalingRange { found: usize },

    #[error(
        "too few points for a regression: {found} inside the fit range, at least 3 are needed"
    )]
    TooFewPoints { found: usize },

    #[error("internal error: non-positive mean box count {value} at l_B = {box_size}")]
    NonPositiveMean { box_size: f64, value: f64 },

    #[error("exhaustive search is limited to {max} nodes, got {n}")]
    TooLargeForExhaustive { n: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
