//! Edge repulsive forces and all-pairs shortest-path distances.
//!
//! Distances are exact integers under both metrics: hop counts, or sums of
//! degree-product edge weights.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default limit on stored distance cells, `n(n-1)/2`.
pub const DEFAULT_MATRIX_CAP: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    /// Edge count along a shortest path.
    Hop,
    /// Minimum total degree-product force along a path.
    Repulsion,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Hop => "hop",
            MetricKind::Repulsion => "repulsion",
        }
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hop" => Ok(MetricKind::Hop),
            "repulsion" => Ok(MetricKind::Repulsion),
            other => Err(Error::InvalidArgument(format!("unknown metric {other:?}"))),
        }
    }
}

/// A graph whose edges carry `degree(i) * degree(j)`.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    graph: Graph,
    /// Parallel to `graph.neighbors(i)`.
    weights: Vec<Vec<u64>>,
}

impl WeightedGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Weight of edge `(i, j)`, or `None` if the nodes are not adjacent.
    pub fn weight(&self, i: usize, j: usize) -> Option<u64> {
        let pos = self.graph.neighbors(i).binary_search(&j).ok()?;
        Some(self.weights[i][pos])
    }

    /// Weights in the order of [`Graph::edges`].
    pub fn edge_weights(&self) -> Vec<u64> {
        self.graph
            .edges()
            .iter()
            .map(|&(a, b)| self.weight(a, b).expect("edge present"))
            .collect()
    }

    fn neighbors_weighted(&self, i: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.graph
            .neighbors(i)
            .iter()
            .copied()
            .zip(self.weights[i].iter().copied())
    }
}

/// Weights every edge with the product of its endpoint degrees.
pub fn edge_repulsive_force(g: &Graph) -> Result<WeightedGraph> {
    if g.edge_count() == 0 {
        return Err(Error::NoEdgesToWeight);
    }
    let weights = (0..g.node_count())
        .map(|i| {
            let ki = g.degree(i) as u64;
            g.neighbors(i)
                .iter()
                .map(|&j| ki * g.degree(j) as u64)
                .collect()
        })
        .collect();
    Ok(WeightedGraph {
        graph: g.clone(),
        weights,
    })
}

/// A graph paired with the metric its distances are measured in.
#[derive(Debug, Clone)]
pub enum MetricGraph {
    Hop(Graph),
    Repulsion(WeightedGraph),
}

impl MetricGraph {
    pub fn new(g: &Graph, kind: MetricKind) -> Result<Self> {
        match kind {
            MetricKind::Hop => Ok(MetricGraph::Hop(g.clone())),
            MetricKind::Repulsion => edge_repulsive_force(g).map(MetricGraph::Repulsion),
        }
    }

    pub fn kind(&self) -> MetricKind {
        match self {
            MetricGraph::Hop(_) => MetricKind::Hop,
            MetricGraph::Repulsion(_) => MetricKind::Repulsion,
        }
    }

    pub fn graph(&self) -> &Graph {
        match self {
            MetricGraph::Hop(g) => g,
            MetricGraph::Repulsion(wg) => wg.graph(),
        }
    }

    /// Single-source distances; `None` marks unreachable nodes.
    pub fn shortest_paths_from(&self, source: usize) -> Result<Vec<Option<u64>>> {
        let n = self.graph().node_count();
        if source >= n {
            return Err(Error::NodeOutOfRange {
                node: source,
                node_count: n,
            });
        }
        Ok(match self {
            MetricGraph::Hop(g) => g.bfs(source),
            MetricGraph::Repulsion(wg) => dijkstra(wg, source),
        })
    }

    pub fn all_pairs(&self) -> Result<DistanceMatrix> {
        self.all_pairs_capped(DEFAULT_MATRIX_CAP)
    }

    /// All-pairs distances; rows are computed in parallel on the current
    /// rayon pool.
    pub fn all_pairs_capped(&self, cap: u64) -> Result<DistanceMatrix> {
        let g = self.graph();
        let n = g.node_count();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let cells = triangle_len(n) as u64;
        if cells > cap {
            return Err(Error::MatrixTooLarge { cells, cap });
        }
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        let mut data = vec![0u64; triangle_len(n)];
        // row i of the strict lower triangle holds dist(i, 0..i)
        let mut rows: Vec<(usize, &mut [u64])> = Vec::with_capacity(n);
        let mut rest = data.as_mut_slice();
        for i in 0..n {
            let (row, tail) = rest.split_at_mut(i);
            rows.push((i, row));
            rest = tail;
        }
        rows.into_par_iter().for_each(|(i, row)| {
            if i == 0 {
                return;
            }
            let dist = match self {
                MetricGraph::Hop(g) => g.bfs(i),
                MetricGraph::Repulsion(wg) => dijkstra(wg, i),
            };
            for (slot, d) in row.iter_mut().zip(dist) {
                *slot = d.expect("graph is connected");
            }
        });
        let diameter = data.iter().copied().max().unwrap_or(0);
        Ok(DistanceMatrix {
            kind: self.kind(),
            n,
            data,
            diameter,
        })
    }
}

fn dijkstra(wg: &WeightedGraph, source: usize) -> Vec<Option<u64>> {
    let n = wg.graph.node_count();
    let mut dist: Vec<Option<u64>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(0);
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some_and(|best| d > best) {
            continue;
        }
        for (v, w) in wg.neighbors_weighted(u) {
            let nd = d + w;
            if dist[v].is_none_or(|cur| nd < cur) {
                dist[v] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

fn triangle_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Symmetric all-pairs distances of a connected graph, stored as the strict
/// lower triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    kind: MetricKind,
    n: usize,
    data: Vec<u64>,
    diameter: u64,
}

impl DistanceMatrix {
    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Largest pairwise distance (`d` for hops, `fd` for repulsion).
    pub fn diameter(&self) -> u64 {
        self.diameter
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 0,
            Greater => self.data[i * (i - 1) / 2 + j],
            Less => self.data[j * (j - 1) / 2 + i],
        }
    }

    /// Distances from `i` to the nodes `0..i`.
    #[inline]
    pub fn lower_row(&self, i: usize) -> &[u64] {
        let start = triangle_len(i);
        &self.data[start..start + i]
    }

    /// Builds a matrix from a full square table, e.g. an oracle's output.
    /// The table must be symmetric with a zero diagonal.
    pub fn from_square(kind: MetricKind, table: &[Vec<u64>]) -> Result<Self> {
        let n = table.len();
        let mut data = Vec::with_capacity(triangle_len(n));
        for (i, row) in table.iter().enumerate() {
            if row.len() != n || row[i] != 0 {
                return Err(Error::InvalidArgument(
                    "table is not square with zero diagonal".into(),
                ));
            }
            for j in 0..i {
                if row[j] != table[j][i] {
                    return Err(Error::InvalidArgument(format!(
                        "table is not symmetric at ({i}, {j})"
                    )));
                }
                data.push(row[j]);
            }
        }
        let diameter = data.iter().copied().max().unwrap_or(0);
        Ok(DistanceMatrix {
            kind,
            n,
            data,
            diameter,
        })
    }

    pub fn to_square(&self) -> Vec<Vec<u64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Full matrix as CSV, one row per node, no header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut line = String::new();
        for i in 0..self.n {
            line.clear();
            for j in 0..self.n {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&self.get(i, j).to_string());
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        out.flush()
    }
}

/// All-pairs distances of `g` under `kind`.
pub fn all_pairs(g: &Graph, kind: MetricKind) -> Result<DistanceMatrix> {
    MetricGraph::new(g, kind)?.all_pairs()
}

/// Sorted unique off-diagonal distances.
pub fn distinct_distances(dm: &DistanceMatrix) -> Vec<u64> {
    let mut values = dm.data.clone();
    values.par_sort_unstable();
    values.dedup();
    values
}
