//! Test oracles, kept independent of the library's distance and coloring
//! code.

#![allow(dead_code)]

use netfractal::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The six-node worked example, labels 1..6 mapped to ids 0..5.
pub const EXAMPLE_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 5)];

pub fn example_graph() -> Graph {
    Graph::from_edges(6, EXAMPLE_EDGES).unwrap()
}

/// Floyd-Warshall over an edge list. Weights are either 1 or the product of
/// endpoint degrees, with degrees counted straight from the edge list.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)], repulsion: bool) -> Vec<Vec<u64>> {
    let mut degree = vec![0u64; n];
    for &(a, b) in edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let inf = u64::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in edges {
        let w = if repulsion { degree[a] * degree[b] } else { 1 };
        d[a][b] = d[a][b].min(w);
        d[b][a] = d[b][a].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Random connected simple graph: a random spanning tree plus extra edges
/// with probability `p`.
pub fn random_connected(n: usize, p: f64, seed: u64) -> (usize, Vec<(usize, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        let parent = rng.random_range(0..v);
        edges.push((parent, v));
    }
    for a in 0..n {
        for b in (a + 1)..n {
            // tree edges are stored as (smaller, larger)
            if rng.random_bool(p) && !edges.contains(&(a, b)) {
                edges.push((a, b));
            }
        }
    }
    (n, edges)
}
