//! Box covering by greedy coloring of the implicit dual graph.
//!
//! Two nodes are adjacent in the dual graph when their distance is at least
//! the box size `l_B`. A proper coloring of the dual graph is a valid box
//! covering; the dual graph is never built, the distance matrix is queried
//! directly instead.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

/// Node limit for [`brute_force_min_boxes`].
pub const EXHAUSTIVE_MAX_NODES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxCovering {
    pub box_size: u64,
    /// Box index per node.
    pub colors: Vec<usize>,
    pub box_count: usize,
}

impl BoxCovering {
    /// True when every pair sharing a box lies at distance `< box_size`.
    pub fn is_valid(&self, dm: &DistanceMatrix) -> bool {
        let n = self.colors.len();
        n == dm.node_count()
            && (0..n).all(|i| {
                (0..i).all(|j| self.colors[i] != self.colors[j] || dm.get(i, j) < self.box_size)
            })
    }
}

/// Colors nodes in `order`, giving each the smallest box index not used by
/// an already colored node at distance `>= box_size`.
///
/// Panics if `order` is not a permutation of `0..n`.
pub fn greedy_box_cover(dm: &DistanceMatrix, box_size: u64, order: &[usize]) -> BoxCovering {
    let mut colors = vec![usize::MAX; dm.node_count()];
    let box_count = greedy_into(dm, box_size, order, &mut colors, &mut Vec::new());
    assert!(
        colors.iter().all(|&c| c != usize::MAX),
        "order must be a permutation of the nodes"
    );
    BoxCovering {
        box_size,
        colors,
        box_count,
    }
}

/// Greedy coloring with caller-owned buffers; returns the box count.
///
/// The smallest color not used by a far node is the first box all of whose
/// members are near, so boxes are scanned in index order with an early exit
/// on the first far member.
fn greedy_into(
    dm: &DistanceMatrix,
    box_size: u64,
    order: &[usize],
    colors: &mut [usize],
    boxes: &mut Vec<Vec<usize>>,
) -> usize {
    assert_eq!(
        order.len(),
        dm.node_count(),
        "order length must equal node count"
    );
    for members in boxes.iter_mut() {
        members.clear();
    }
    let mut used = 0;
    for &v in order {
        let chosen = boxes[..used]
            .iter()
            .position(|members| members.iter().all(|&u| dm.get(u, v) < box_size));
        let c = match chosen {
            Some(c) => c,
            None => {
                if used == boxes.len() {
                    boxes.push(Vec::new());
                }
                used += 1;
                used - 1
            }
        };
        boxes[c].push(v);
        colors[v] = c;
    }
    used
}

/// Node order for one trial. The generator for trial `t` is ChaCha8 seeded
/// from `master_seed` on stream `t`, so each order depends only on
/// `(master_seed, t)`.
pub fn trial_order(n: usize, master_seed: u64, trial: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    order
}

/// Upper bound on stored pair-list entries for one box size.
const PAIR_LIST_BUDGET: usize = 1 << 24;

/// Per-node lists of the nodes on one side of the box-size threshold, in
/// CSR layout.
struct PairLists {
    offsets: Vec<usize>,
    nodes: Vec<u32>,
}

impl PairLists {
    fn build(dm: &DistanceMatrix, keep: impl Fn(u64) -> bool) -> Self {
        let n = dm.node_count();
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            for (j, &d) in dm.lower_row(i).iter().enumerate() {
                if keep(d) {
                    offsets[i + 1] += 1;
                    offsets[j + 1] += 1;
                }
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets[..n].to_vec();
        let mut nodes = vec![0u32; offsets[n]];
        for i in 0..n {
            for (j, &d) in dm.lower_row(i).iter().enumerate() {
                if keep(d) {
                    nodes[fill[i]] = j as u32;
                    fill[i] += 1;
                    nodes[fill[j]] = i as u32;
                    fill[j] += 1;
                }
            }
        }
        PairLists { offsets, nodes }
    }

    fn of(&self, v: usize) -> &[u32] {
        &self.nodes[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// How greedy coloring queries the threshold at one box size. All three
/// produce the same coloring.
enum Strategy {
    /// Scan boxes in index order against the distance matrix.
    Scan,
    /// Lists of nodes at distance `< box_size`.
    Near(PairLists),
    /// Lists of nodes at distance `>= box_size` (the dual graph).
    Far(PairLists),
}

impl Strategy {
    /// Picks whichever pair list is shorter, or a scan if both exceed
    /// `budget` entries.
    fn choose(dm: &DistanceMatrix, box_size: u64, budget: usize) -> Self {
        let n = dm.node_count();
        let near: usize = (0..n)
            .map(|i| dm.lower_row(i).iter().filter(|&&d| d < box_size).count())
            .sum();
        let far = n * n.saturating_sub(1) / 2 - near;
        if 2 * near.min(far) > budget {
            Strategy::Scan
        } else if near <= far {
            Strategy::Near(PairLists::build(dm, |d| d < box_size))
        } else {
            Strategy::Far(PairLists::build(dm, |d| d >= box_size))
        }
    }
}

/// Scratch buffers for the list-driven colorings.
#[derive(Default)]
struct Scratch {
    sizes: Vec<u32>,
    hits: Vec<u32>,
    touched: Vec<usize>,
    stamp: Vec<usize>,
}

/// A box accepts `v` exactly when all of its members are near `v`, i.e. when
/// the number of near members equals the box size.
fn greedy_near(
    near: &PairLists,
    order: &[usize],
    colors: &mut [usize],
    scratch: &mut Scratch,
) -> usize {
    colors.fill(usize::MAX);
    scratch.sizes.clear();
    scratch.hits.clear();
    for &v in order {
        scratch.touched.clear();
        for &u in near.of(v) {
            let c = colors[u as usize];
            if c != usize::MAX {
                if scratch.hits[c] == 0 {
                    scratch.touched.push(c);
                }
                scratch.hits[c] += 1;
            }
        }
        let mut chosen = usize::MAX;
        for &c in &scratch.touched {
            if scratch.hits[c] == scratch.sizes[c] && c < chosen {
                chosen = c;
            }
            scratch.hits[c] = 0;
        }
        if chosen == usize::MAX {
            chosen = scratch.sizes.len();
            scratch.sizes.push(0);
            scratch.hits.push(0);
        }
        scratch.sizes[chosen] += 1;
        colors[v] = chosen;
    }
    scratch.sizes.len()
}

/// Plain greedy coloring of the dual graph given as adjacency lists.
fn greedy_far(
    far: &PairLists,
    order: &[usize],
    colors: &mut [usize],
    scratch: &mut Scratch,
) -> usize {
    colors.fill(usize::MAX);
    scratch.stamp.clear();
    let mut used = 0;
    for (step, &v) in order.iter().enumerate() {
        for &u in far.of(v) {
            let c = colors[u as usize];
            if c != usize::MAX {
                scratch.stamp[c] = step + 1;
            }
        }
        let c = (0..used)
            .find(|&c| scratch.stamp[c] != step + 1)
            .unwrap_or_else(|| {
                scratch.stamp.push(0);
                used += 1;
                used - 1
            });
        colors[v] = c;
    }
    used
}

/// Box counts for every trial at every box size, indexed `[trial][size]`.
///
/// Each trial draws one node order and reuses it for all sizes. Trials run
/// in parallel on the current rayon pool; the result does not depend on the
/// pool size.
pub fn trial_box_counts(
    dm: &DistanceMatrix,
    box_sizes: &[u64],
    trials: usize,
    master_seed: u64,
) -> Vec<Vec<u32>> {
    let n = dm.node_count();
    let strategies: Vec<Strategy> = box_sizes
        .par_iter()
        .map(|&l| Strategy::choose(dm, l, PAIR_LIST_BUDGET))
        .collect();
    (0..trials as u64)
        .into_par_iter()
        .map_init(
            || (vec![0usize; n], Vec::new(), Scratch::default()),
            |(colors, boxes, scratch), t| {
                let order = trial_order(n, master_seed, t);
                box_sizes
                    .iter()
                    .zip(&strategies)
                    .map(|(&l, strategy)| {
                        let count = match strategy {
                            Strategy::Scan => greedy_into(dm, l, &order, colors, boxes),
                            Strategy::Near(lists) => greedy_near(lists, &order, colors, scratch),
                            Strategy::Far(lists) => greedy_far(lists, &order, colors, scratch),
                        };
                        count as u32
                    })
                    .collect()
            },
        )
        .collect()
}

/// Summary of box counts at one box size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStatistics {
    pub box_size: u64,
    pub trials: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: u32,
    pub max: u32,
}

impl TrialStatistics {
    /// Aggregates counts in the given order. Panics on an empty slice.
    pub fn from_counts(box_size: u64, counts: &[u32]) -> Self {
        assert!(!counts.is_empty(), "at least one trial is required");
        let t = counts.len() as f64;
        let sum: u64 = counts.iter().map(|&c| u64::from(c)).sum();
        let mean = sum as f64 / t;
        let var = counts
            .iter()
            .map(|&c| {
                let d = f64::from(c) - mean;
                d * d
            })
            .sum::<f64>()
            / t;
        TrialStatistics {
            box_size,
            trials: counts.len(),
            mean,
            std: var.sqrt(),
            min: *counts.iter().min().unwrap(),
            max: *counts.iter().max().unwrap(),
        }
    }
}

/// Runs `trials` randomized greedy coverings at one box size.
pub fn run_trials(
    dm: &DistanceMatrix,
    box_size: u64,
    trials: usize,
    master_seed: u64,
) -> Result<TrialStatistics> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if box_size == 0 {
        return Err(Error::InvalidArgument("box size must be positive".into()));
    }
    let counts: Vec<u32> = trial_box_counts(dm, &[box_size], trials, master_seed)
        .into_iter()
        .map(|row| row[0])
        .collect();
    Ok(TrialStatistics::from_counts(box_size, &counts))
}

/// Exact minimum number of boxes, by branch and bound over node-to-box
/// assignments. Limited to [`EXHAUSTIVE_MAX_NODES`] nodes.
pub fn brute_force_min_boxes(dm: &DistanceMatrix, box_size: u64) -> Result<usize> {
    let n = dm.node_count();
    if n > EXHAUSTIVE_MAX_NODES {
        return Err(Error::TooLargeForExhaustive {
            n,
            max: EXHAUSTIVE_MAX_NODES,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    let identity: Vec<usize> = (0..n).collect();
    let mut best = greedy_box_cover(dm, box_size, &identity).box_count;
    let mut boxes: Vec<Vec<usize>> = Vec::new();
    search(dm, box_size, 0, &mut boxes, &mut best);
    Ok(best)
}

fn search(
    dm: &DistanceMatrix,
    box_size: u64,
    v: usize,
    boxes: &mut Vec<Vec<usize>>,
    best: &mut usize,
) {
    if boxes.len() >= *best {
        return;
    }
    if v == dm.node_count() {
        *best = boxes.len();
        return;
    }
    for b in 0..boxes.len() {
        if boxes[b].iter().all(|&u| dm.get(u, v) < box_size) {
            boxes[b].push(v);
            search(dm, box_size, v + 1, boxes, best);
            boxes[b].pop();
        }
    }
    if boxes.len() + 1 < *best {
        boxes.push(vec![v]);
        search(dm, box_size, v + 1, boxes, best);
        boxes.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::metric::{all_pairs, distinct_distances, MetricKind};

    fn example_matrix() -> DistanceMatrix {
        let g = Graph::from_edges(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        all_pairs(&g, MetricKind::Repulsion).unwrap()
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn example_greedy_over_all_orders() {
        // enumerated independently: 640 of the 720 orders reach the 2-box
        // optimum, the other 80 need 3 boxes
        let dm = example_matrix();
        let orders = permutations(6);
        assert_eq!(orders.len(), 720);
        let mut histogram = [0usize; 7];
        for order in &orders {
            let cover = greedy_box_cover(&dm, 10, order);
            assert!(cover.is_valid(&dm));
            histogram[cover.box_count] += 1;
            if cover.box_count == 2 {
                let c = &cover.colors;
                assert!(c[0] == c[1] && c[1] == c[2]);
                assert!(c[3] == c[4] && c[4] == c[5]);
                assert_ne!(c[0], c[3]);
            }
        }
        assert_eq!(histogram, [0, 0, 640, 80, 0, 0, 0]);
        assert_eq!(greedy_box_cover(&dm, 10, &[3, 2, 5, 4, 1, 0]).box_count, 3);
        assert_eq!(brute_force_min_boxes(&dm, 10).unwrap(), 2);
    }

    #[test]
    fn endpoints() {
        let dm = example_matrix();
        let order: Vec<usize> = (0..6).collect();
        assert_eq!(
            greedy_box_cover(&dm, dm.diameter() + 1, &order).box_count,
            1
        );
        let smallest = distinct_distances(&dm)[0];
        assert_eq!(greedy_box_cover(&dm, smallest, &order).box_count, 6);
        assert_eq!(brute_force_min_boxes(&dm, dm.diameter() + 1).unwrap(), 1);
        assert_eq!(brute_force_min_boxes(&dm, smallest).unwrap(), 6);
    }

    #[test]
    fn invalid_covering_is_detected() {
        let dm = example_matrix();
        let cover = BoxCovering {
            box_size: 10,
            colors: vec![0, 0, 0, 0, 1, 1],
            box_count: 2,
        };
        assert!(!cover.is_valid(&dm));
    }

    #[test]
    fn trials_statistics() {
        let dm = example_matrix();
        let s = run_trials(&dm, dm.diameter() + 1, 5, 7).unwrap();
        assert_eq!((s.mean, s.std, s.min, s.max), (1.0, 0.0, 1, 1));
        let s = run_trials(&dm, 10, 100, 42).unwrap();
        assert_eq!((s.min, s.max), (2, 3));
        assert!(s.mean > 2.0 && s.mean < 2.3 && s.std > 0.0);
        let one = run_trials(&dm, 6, 1, 3).unwrap();
        assert_eq!(one.std, 0.0);
        assert!(run_trials(&dm, 10, 0, 1).is_err());
    }

    #[test]
    fn from_counts_population_std() {
        let s = TrialStatistics::from_counts(3, &[2, 4, 4, 4, 5, 5, 7, 9]);
        assert_eq!(s.mean, 5.0);
        assert_eq!(s.std, 2.0);
        assert_eq!((s.min, s.max), (2, 9));
    }

    #[test]
    fn trial_orders_are_reproducible_permutations() {
        let a = trial_order(50, 42, 3);
        assert_eq!(a, trial_order(50, 42, 3));
        assert_ne!(a, trial_order(50, 42, 4));
        assert_ne!(a, trial_order(50, 43, 3));
        let mut sorted = a.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn exhaustive_limit() {
        let g = Graph::from_edges(13, (0..12).map(|i| (i, i + 1))).unwrap();
        let dm = all_pairs(&g, MetricKind::Hop).unwrap();
        assert!(matches!(
            brute_force_min_boxes(&dm, 2),
            Err(Error::TooLargeForExhaustive { n: 13, .. })
        ));
    }

    #[test]
    fn strategies_match_box_scan() {
        let g = crate::netgen::karate_fixture();
        for kind in [MetricKind::Hop, MetricKind::Repulsion] {
            let dm = all_pairs(&g, kind).unwrap();
            let mut scratch = Scratch::default();
            let mut colors = vec![0; 34];
            for l in distinct_distances(&dm) {
                let near = PairLists::build(&dm, |d| d < l);
                let far = PairLists::build(&dm, |d| d >= l);
                for t in 0..10 {
                    let order = trial_order(34, 9, t);
                    let reference = greedy_box_cover(&dm, l, &order);
                    let n = greedy_near(&near, &order, &mut colors, &mut scratch);
                    assert_eq!((n, &colors), (reference.box_count, &reference.colors));
                    let n = greedy_far(&far, &order, &mut colors, &mut scratch);
                    assert_eq!((n, &colors), (reference.box_count, &reference.colors));
                }
            }
            assert!(matches!(
                Strategy::choose(&dm, dm.diameter() / 2, 10),
                Strategy::Scan
            ));
            assert!(matches!(
                Strategy::choose(&dm, 1, usize::MAX),
                Strategy::Near(_)
            ));
            assert!(matches!(
                Strategy::choose(&dm, dm.diameter(), usize::MAX),
                Strategy::Far(_)
            ));
        }
    }

    #[test]
    fn path_minimum() {
        // path of 7 nodes with l_B = 3: boxes hold 3 consecutive nodes
        let g = Graph::from_edges(7, (0..6).map(|i| (i, i + 1))).unwrap();
        let dm = all_pairs(&g, MetricKind::Hop).unwrap();
        assert_eq!(brute_force_min_boxes(&dm, 3).unwrap(), 3);
    }
}
