mod common;

use std::collections::HashSet;

use netfractal::boxcover::trial_order;
use netfractal::dimension::{fit_line, fit_mean_series};
use netfractal::metric::MetricGraph;
use netfractal::{
    all_pairs, brute_force_min_boxes, build_schedule, degrees, distinct_distances,
    greedy_box_cover, largest_component, load_edge_list, Graph, LoadOptions, MetricKind,
};
use proptest::prelude::*;

use common::{floyd_warshall, random_connected};

fn arb_graph(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (1..=max_nodes).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..3 * n)
            .prop_map(move |edges| Graph::from_edges(n, edges).unwrap())
    })
}

fn arb_connected(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (2..=max_nodes, 0.0..0.5f64, any::<u64>()).prop_map(|(n, p, seed)| {
        let (n, edges) = random_connected(n, p, seed);
        Graph::from_edges(n, edges).unwrap()
    })
}

fn degree_multiset(g: &Graph) -> Vec<usize> {
    let mut d = degrees(g);
    d.sort_unstable();
    d
}

proptest! {
    #[test]
    fn handshake(g in arb_graph(30)) {
        prop_assert_eq!(degrees(&g).iter().sum::<usize>(), 2 * g.edge_count());
        for &(a, b) in g.edges() {
            prop_assert!(a < b);
            prop_assert!(g.neighbors(a).contains(&b) && g.neighbors(b).contains(&a));
        }
        let unique: HashSet<_> = g.edges().iter().collect();
        prop_assert_eq!(unique.len(), g.edge_count());
    }

    #[test]
    fn edge_list_reload_is_isomorphic(g in arb_graph(30)) {
        prop_assume!(g.edge_count() > 0);
        let text = g.to_edge_list_string();
        let back = load_edge_list(text.as_bytes(), &LoadOptions::default()).unwrap().graph;
        prop_assert_eq!(back.edge_count(), g.edge_count());
        // isolated nodes are not representable in an edge list
        let mut expected: Vec<usize> = degree_multiset(&g).into_iter().filter(|&d| d > 0).collect();
        expected.sort_unstable();
        prop_assert_eq!(degree_multiset(&back), expected);
    }

    #[test]
    fn largest_component_is_connected(g in arb_graph(30)) {
        let (c, discarded) = largest_component(&g).unwrap();
        prop_assert!(c.is_connected());
        prop_assert_eq!(c.node_count() + discarded, g.node_count());
    }

    #[test]
    fn metric_axioms(g in arb_connected(25)) {
        let hop = all_pairs(&g, MetricKind::Hop).unwrap();
        let rep = all_pairs(&g, MetricKind::Repulsion).unwrap();
        let wg = netfractal::edge_repulsive_force(&g).unwrap();
        let n = g.node_count();
        for dm in [&hop, &rep] {
            for i in 0..n {
                prop_assert_eq!(dm.get(i, i), 0);
                for j in 0..n {
                    prop_assert_eq!(dm.get(i, j), dm.get(j, i));
                    for k in 0..n {
                        prop_assert!(dm.get(i, k) <= dm.get(i, j) + dm.get(j, k));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                prop_assert!(rep.get(i, j) >= hop.get(i, j));
            }
        }
        for &(a, b) in g.edges() {
            let f = wg.weight(a, b).unwrap();
            prop_assert_eq!(f, (g.degree(a) * g.degree(b)) as u64);
            prop_assert_eq!(Some(f), wg.weight(b, a));
            prop_assert_eq!(hop.get(a, b), 1);
            prop_assert!(rep.get(a, b) <= f);
        }
        prop_assert_eq!(hop.diameter(), (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| hop.get(i, j)).max().unwrap());
    }

    #[test]
    fn all_pairs_matches_floyd_warshall(n in 2usize..=50, p in 0.0..0.3f64, seed in any::<u64>()) {
        let (n, edges) = random_connected(n, p, seed);
        let g = Graph::from_edges(n, edges.clone()).unwrap();
        for (kind, repulsion) in [(MetricKind::Hop, false), (MetricKind::Repulsion, true)] {
            let dm = all_pairs(&g, kind).unwrap();
            prop_assert_eq!(dm.to_square(), floyd_warshall(n, &edges, repulsion));
            let mg = MetricGraph::new(&g, kind).unwrap();
            let row = mg.shortest_paths_from(n - 1).unwrap();
            prop_assert!(row.iter().enumerate().all(|(j, d)| *d == Some(dm.get(n - 1, j))));
        }
    }

    #[test]
    fn greedy_is_valid_and_never_beats_optimum(g in arb_connected(10), seed in any::<u64>()) {
        for kind in [MetricKind::Hop, MetricKind::Repulsion] {
            let dm = all_pairs(&g, kind).unwrap();
            let order = trial_order(g.node_count(), seed, 0);
            for l in distinct_distances(&dm) {
                let cover = greedy_box_cover(&dm, l, &order);
                prop_assert!(cover.is_valid(&dm));
                prop_assert!(cover.box_count >= brute_force_min_boxes(&dm, l).unwrap());
            }
        }
    }

    #[test]
    fn schedule_contract(g in arb_connected(40), max_points in 3usize..20) {
        for kind in [MetricKind::Hop, MetricKind::Repulsion] {
            let dm = all_pairs(&g, kind).unwrap();
            let distinct = distinct_distances(&dm);
            match build_schedule(&dm, max_points) {
                Ok(s) => {
                    prop_assert!(s.values.len() <= max_points && s.values.len() >= 3);
                    prop_assert!(s.values.windows(2).all(|w| w[0] < w[1]));
                    prop_assert!(s.values.iter().all(|v| distinct.binary_search(v).is_ok()));
                    prop_assert_eq!(s.values[0], distinct[0]);
                    prop_assert_eq!(*s.values.last().unwrap(), dm.diameter());
                }
                Err(netfractal::Error::DegenerateScalingRange { .. }) => prop_assert!(distinct.len() < 3 || max_points < distinct.len()),
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }

    #[test]
    fn power_law_exponent_recovered(d in 0.1..4.0f64, c in 1.0..1e4f64, scale in 0.01..100.0f64) {
        let sizes = [1.0, 2.0, 3.0, 5.0, 8.0, 13.0];
        let means: Vec<f64> = sizes.iter().map(|l: &f64| c * l.powf(-d)).collect();
        let (fit, used) = fit_mean_series(&sizes, &means, None).unwrap();
        prop_assert_eq!(used, 6);
        prop_assert!(((-fit.slope) - d).abs() / d < 1e-9);
        // rescaling every box size leaves the slope unchanged
        let scaled: Vec<f64> = sizes.iter().map(|l| l * scale).collect();
        let (fit2, _) = fit_mean_series(&scaled, &means, None).unwrap();
        prop_assert!((fit2.slope - fit.slope).abs() < 1e-9);
    }

    #[test]
    fn r_squared_in_unit_interval(ys in proptest::collection::vec(-5.0..5.0f64, 3..12)) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        prop_assert!((0.0..=1.0).contains(&fit.r_squared));
        prop_assert!(fit.slope_stderr >= 0.0);
    }
}
