//! Simple undirected graphs with dense node ids, plus edge-list I/O.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};

/// A simple undirected graph.
///
/// Node ids are dense `0..node_count`. Edges are stored once as `(i, j)`
/// with `i < j`, sorted; adjacency lists are sorted as well.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    labels: Vec<String>,
}

impl Graph {
    /// Builds a graph from `node_count` nodes and an edge iterator.
    ///
    /// Self-loops and duplicate edges are dropped. Nodes are labelled by
    /// their id.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let labels = (0..node_count).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges).map(|(g, _)| g)
    }

    /// Same as [`Graph::from_edges`] with explicit labels. Also returns the
    /// number of dropped duplicates and self-loops.
    pub fn with_labels<I>(labels: Vec<String>, edges: I) -> Result<(Self, DropCounts)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let node_count = labels.len();
        let mut seen = HashSet::new();
        let mut drops = DropCounts::default();
        let mut kept = Vec::new();
        for (a, b) in edges {
            for node in [a, b] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if a == b {
                drops.self_loops += 1;
                continue;
            }
            let e = (a.min(b), a.max(b));
            if seen.insert(e) {
                kept.push(e);
            } else {
                drops.duplicates += 1;
            }
        }
        kept.sort_unstable();
        let mut adjacency = vec![Vec::new(); node_count];
        for &(a, b) in &kept {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok((
            Graph {
                adjacency,
                edges: kept,
                labels,
            },
            drops,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j)` with `i < j`, in ascending order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    /// Breadth-first hop distances from `source`; `None` for unreachable nodes.
    pub(crate) fn bfs(&self, source: usize) -> Vec<Option<u64>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        match self.node_count() {
            0 => false,
            _ => self.bfs(0).iter().all(Option::is_some),
        }
    }

    /// Component id per node, numbered in order of each component's
    /// smallest node id.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &v in &self.adjacency[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Writes one `label label` line per edge, in ascending id-pair order.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for &(a, b) in &self.edges {
            writeln!(out, "{} {}", self.labels[a], self.labels[b])?;
        }
        out.flush()
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("labels are UTF-8")
    }
}

/// Counts of edges dropped while building a simple graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DropCounts {
    pub duplicates: usize,
    pub self_loops: usize,
}

impl DropCounts {
    pub fn total(&self) -> usize {
        self.duplicates + self.self_loops
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub comment_prefix: String,
    /// `None` splits on any run of whitespace.
    pub delimiter: Option<char>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            comment_prefix: "#".to_string(),
            delimiter: None,
        }
    }
}

/// Result of [`load_edge_list`].
#[derive(Debug, Clone)]
pub struct Loaded {
    pub graph: Graph,
    pub dropped: DropCounts,
}

/// Parses an edge list. Labels become ids in order of first appearance.
pub fn load_edge_list<R: BufRead>(reader: R, options: &LoadOptions) -> Result<Loaded> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut raw = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty()
            || (!options.comment_prefix.is_empty() && trimmed.starts_with(&options.comment_prefix))
        {
            continue;
        }
        let tokens: Vec<&str> = match options.delimiter {
            Some(d) => trimmed.split(d).map(str::trim).collect(),
            None => trimmed.split_whitespace().collect(),
        };
        if tokens.len() != 2 || tokens.iter().any(|t| t.is_empty()) {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 2 node labels, found {}", tokens.len()),
            });
        }
        let mut pair = [0usize; 2];
        for (slot, token) in pair.iter_mut().zip(&tokens) {
            *slot = *ids.entry(token.to_string()).or_insert_with(|| {
                labels.push(token.to_string());
                labels.len() - 1
            });
        }
        raw.push((pair[0], pair[1]));
    }
    if raw.is_empty() {
        return Err(Error::NoEdges);
    }
    let (graph, dropped) = Graph::with_labels(labels, raw)?;
    Ok(Loaded { graph, dropped })
}

/// Induced subgraph on the largest connected component, plus the number of
/// discarded nodes. Ties go to the component holding the smallest node id.
pub fn largest_component(g: &Graph) -> Result<(Graph, usize)> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let comp = g.components();
    let count = comp.iter().max().map_or(0, |&c| c + 1);
    let mut sizes = vec![0usize; count];
    for &c in &comp {
        sizes[c] += 1;
    }
    // components are numbered by smallest member, so the first maximum wins ties
    let best = (0..count).fold(0, |best, c| if sizes[c] > sizes[best] { c } else { best });
    if sizes[best] == n {
        return Ok((g.clone(), 0));
    }
    let mut remap = vec![usize::MAX; n];
    let mut labels = Vec::with_capacity(sizes[best]);
    for (old, &c) in comp.iter().enumerate() {
        if c == best {
            remap[old] = labels.len();
            labels.push(g.labels[old].clone());
        }
    }
    let edges = g
        .edges
        .iter()
        .filter(|&&(a, _)| comp[a] == best)
        .map(|&(a, b)| (remap[a], remap[b]));
    let (sub, _) = Graph::with_labels(labels, edges)?;
    Ok((sub, n - sizes[best]))
}

pub fn degrees(g: &Graph) -> Vec<usize> {
    (0..g.node_count()).map(|i| g.degree(i)).collect()
}
