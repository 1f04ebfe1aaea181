//! Deterministic test networks: the Sierpinski triangle network and
//! Zachary's karate club.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest level accepted by [`generate_sierpinski`] (16384 nodes).
pub const DEFAULT_SIERPINSKI_CAP: u32 = 6;

/// One module of the recursive Sierpinski construction.
#[derive(Debug, Clone)]
pub struct SierpinskiModule {
    pub graph: Graph,
    pub center: usize,
    pub corners: [usize; 3],
    pub level: u32,
}

/// Edge skeleton of a module, kept separate from [`Graph`] so replicas can be
/// offset cheaply.
struct Skeleton {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    center: usize,
    corners: [usize; 3],
}

/// Base module: a 4-clique with node 0 as the center.
fn base_module() -> Skeleton {
    Skeleton {
        nodes: 4,
        edges: vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        center: 0,
        corners: [1, 2, 3],
    }
}

fn grow(m: Skeleton) -> Skeleton {
    let n = m.nodes;
    let mut edges = Vec::with_capacity(4 * m.edges.len() + 12);
    edges.extend_from_slice(&m.edges);
    // replicas A, B, C occupy id blocks [n, 2n), [2n, 3n), [3n, 4n)
    for r in 1..=3 {
        let off = r * n;
        edges.extend(m.edges.iter().map(|&(a, b)| (a + off, b + off)));
    }
    let centers = [m.center + n, m.center + 2 * n, m.center + 3 * n];
    edges.push((centers[0], centers[1]));
    edges.push((centers[0], centers[2]));
    edges.push((centers[1], centers[2]));
    for r in 1..=3 {
        for &c in &m.corners {
            edges.push((c + r * n, m.center));
        }
    }
    Skeleton {
        nodes: 4 * n,
        edges,
        center: m.center,
        corners: [m.corners[0] + n, m.corners[1] + 2 * n, m.corners[2] + 3 * n],
    }
}

/// Builds the level-`level` Sierpinski network (`4^(level+1)` nodes).
pub fn generate_sierpinski(level: u32) -> Result<SierpinskiModule> {
    generate_sierpinski_capped(level, DEFAULT_SIERPINSKI_CAP)
}

pub fn generate_sierpinski_capped(level: u32, cap: u32) -> Result<SierpinskiModule> {
    if level > cap {
        return Err(Error::LevelAboveCap { level, cap });
    }
    let mut m = base_module();
    for _ in 0..level {
        m = grow(m);
    }
    let graph = Graph::from_edges(m.nodes, m.edges)?;
    Ok(SierpinskiModule {
        graph,
        center: m.center,
        corners: m.corners,
        level,
    })
}

// Zachary (1977), 1-based member ids.
#[rustfmt::skip]
const KARATE_EDGES: [(u8, u8); 78] = [
    (1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7), (1, 8), (1, 9), (1, 11), (1, 12),
    (1, 13), (1, 14), (1, 18), (1, 20), (1, 22), (1, 32), (2, 3), (2, 4), (2, 8), (2, 14),
    (2, 18), (2, 20), (2, 22), (2, 31), (3, 4), (3, 8), (3, 9), (3, 10), (3, 14), (3, 28),
    (3, 29), (3, 33), (4, 8), (4, 13), (4, 14), (5, 7), (5, 11), (6, 7), (6, 11), (6, 17),
    (7, 17), (9, 31), (9, 33), (9, 34), (10, 34), (14, 34), (15, 33), (15, 34), (16, 33), (16, 34),
    (19, 33), (19, 34), (20, 34), (21, 33), (21, 34), (23, 33), (23, 34), (24, 26), (24, 28), (24, 30),
    (24, 33), (24, 34), (25, 26), (25, 28), (25, 32), (26, 32), (27, 30), (27, 34), (28, 34), (29, 32),
    (29, 34), (30, 33), (30, 34), (31, 33), (31, 34), (32, 33), (32, 34), (33, 34),
];

/// Zachary's karate club: 34 members, 78 friendships. Labels are the
/// conventional 1-based member numbers.
pub fn karate_fixture() -> Graph {
    let labels = (1..=34).map(|i| i.to_string()).collect();
    let edges = KARATE_EDGES
        .iter()
        .map(|&(a, b)| (a as usize - 1, b as usize - 1));
    let (g, _) = Graph::with_labels(labels, edges).expect("fixture ids are in range");
    g
}
