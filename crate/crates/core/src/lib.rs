//! Fractal (box) dimension of undirected networks.
//!
//! Two distance metrics are supported: the classic hop count and a
//! repulsion metric in which every edge carries the product of its endpoint
//! degrees. Networks are covered with boxes by randomized greedy coloring of
//! the implicit dual graph, and the dimension is the negated slope of a
//! log-log fit of box count against box size.
//!
//! The usual pipeline is [`dimension::analyze`]; the individual stages are
//! exposed for callers that want to inspect intermediate results.

pub mod boxcover;
pub mod dimension;
pub mod error;
pub mod graph;
pub mod metric;
pub mod netgen;

pub use boxcover::{
    brute_force_min_boxes, greedy_box_cover, run_trials, BoxCovering, TrialStatistics,
};
pub use dimension::{
    analyze, build_schedule, estimate_dimension, Analysis, AnalysisConfig, BoxSizeSchedule,
    DimensionEstimate, ScalingSeries, SelectionMode,
};
pub use error::{Error, Result};
pub use graph::{degrees, largest_component, load_edge_list, Graph, LoadOptions, Loaded};
pub use metric::{
    all_pairs, distinct_distances, edge_repulsive_force, DistanceMatrix, MetricKind, WeightedGraph,
};
pub use netgen::{generate_sierpinski, karate_fixture, SierpinskiModule};
