use std::collections::BTreeSet;

use critnode::{InterdependentSystem, UndirectedGraph};
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = UndirectedGraph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
        let len = pairs.len();
        proptest::collection::vec(any::<bool>(), len).prop_map(move |mask| {
            let edges = pairs.iter().zip(&mask).filter(|(_, &m)| m).map(|(&e, _)| e);
            UndirectedGraph::new(n, edges).unwrap()
        })
    })
}

/// Reachability by breadth-first search.
fn reachable(g: &UndirectedGraph, from: usize) -> BTreeSet<usize> {
    let adj = g.adjacency();
    let mut seen = BTreeSet::from([from]);
    let mut queue = vec![from];
    while let Some(v) = queue.pop() {
        for &w in &adj[v] {
            if seen.insert(w) {
                queue.push(w);
            }
        }
    }
    seen
}

proptest! {
    #[test]
    fn warshall_matches_union_find(g in graph_strategy(9)) {
        let w = g.warshall_closure();
        let c = g.connectivity_closure();
        for i in 1..=g.node_count() {
            let reach = reachable(&g, i);
            for j in 1..=g.node_count() {
                if i != j {
                    prop_assert_eq!(w.get(i, j), c.get(i, j));
                    prop_assert_eq!(w.get(i, j), reach.contains(&j));
                }
            }
        }
    }

    #[test]
    fn components_partition_nodes(g in graph_strategy(10)) {
        let comps = g.connected_components();
        let mut all: Vec<usize> = comps.iter().flatten().copied().collect();
        all.sort();
        prop_assert_eq!(all, (1..=g.node_count()).collect::<Vec<_>>());
        for c in &comps {
            prop_assert_eq!(reachable(&g, c[0]), c.iter().copied().collect::<BTreeSet<_>>());
        }
        prop_assert_eq!(g.is_connected(), comps.len() == 1);
    }

    #[test]
    fn articulation_matches_removal(g in graph_strategy(9)) {
        let base = g.component_count();
        let expected: BTreeSet<usize> = (1..=g.node_count())
            .filter(|&v| {
                // Removing v also removes its own singleton component.
                let h = g.without_node(v);
                h.component_count() - 1 > base - usize::from(g.degree(v) == 0)
            })
            .collect();
        prop_assert_eq!(g.articulation_nodes(), expected);
    }

    #[test]
    fn instance_json_round_trip(a in graph_strategy(8), seed in any::<u64>()) {
        let n = a.node_count();
        let b = if seed % 2 == 0 { UndirectedGraph::complete(n) } else { UndirectedGraph::empty(n) };
        let sys = InterdependentSystem::new(a, b).unwrap();
        let text = sys.to_json();
        let back = InterdependentSystem::from_json(&text).unwrap();
        prop_assert_eq!(&back, &sys);
        prop_assert_eq!(back.to_json(), text);
    }
}


#[test]
fn malformed_instances_are_rejected() {
    for text in [
        r#"{"n":3,"edges_a":[[1,1]],"edges_b":[]}"#,
        r#"{"n":3,"edges_a":[[1,4]],"edges_b":[]}"#,
        r#"{"n":3,"edges_a":[[1,2],[2,1]],"edges_b":[]}"#,
        r#"{"n":0,"edges_a":[],"edges_b":[]}"#,
        r#"{"n":3,"edges_a":[]}"#,
    ] {
        assert!(InterdependentSystem::from_json(text).is_err(), "{text}");
    }
}
