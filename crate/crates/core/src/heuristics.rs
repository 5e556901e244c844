//! Greedy and articulation-first (modified Max-Cas) attack selection.
//!
//! Both heuristics build the attack one node per round. Ties on the
//! simulated score are broken by the larger degree sum over the working
//! graphs, then by the smaller node id.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::cascade::severity;
use crate::error::{invalid, Result};
use crate::graph::{AttackSet, InterdependentSystem, UndirectedGraph};
use crate::oracle::check_k;

/// Which system a candidate is scored on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoringPolicy {
    /// Simulate `K ∪ {i}` on the original system.
    #[default]
    OriginalSystem,
    /// Simulate `{i}` on the working graphs, from which the nodes already
    /// chosen have been removed.
    WorkingGraphs,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepChoice {
    /// Nodes tied for the best score, or every remaining node when
    /// Max-Cas finds no articulation node.
    pub candidates: Vec<usize>,
    pub chosen: usize,
    /// Largest surviving component per scored node. Empty when the round
    /// scored nothing.
    pub scores: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeuristicResult {
    /// Nodes in selection order.
    pub selection: Vec<usize>,
    pub attack_set: AttackSet,
    /// Severity of `attack_set` on the original system.
    pub f: usize,
    pub per_step_choices: Vec<StepChoice>,
    /// Number of cascade simulations spent on scoring.
    pub scoring_calls: usize,
    pub duration: Duration,
}

/// `deg_g1(node) + deg_g2(node)`.
pub fn degree_sum(node: usize, g1: &UndirectedGraph, g2: &UndirectedGraph) -> Result<usize> {
    if !g1.contains_node(node) || !g2.contains_node(node) {
        return Err(invalid(format!("node {node} is not in both graphs")));
    }
    Ok(g1.degree(node) + g2.degree(node))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Algo {
    Greedy,
    MaxCas,
}

pub fn greedy_select(system: &InterdependentSystem, k: usize) -> Result<HeuristicResult> {
    run(system, k, Algo::Greedy, ScoringPolicy::default())
}

pub fn maxcas_select(system: &InterdependentSystem, k: usize) -> Result<HeuristicResult> {
    run(system, k, Algo::MaxCas, ScoringPolicy::default())
}

pub fn greedy_select_with(system: &InterdependentSystem, k: usize, policy: ScoringPolicy) -> Result<HeuristicResult> {
    run(system, k, Algo::Greedy, policy)
}

pub fn maxcas_select_with(system: &InterdependentSystem, k: usize, policy: ScoringPolicy) -> Result<HeuristicResult> {
    run(system, k, Algo::MaxCas, policy)
}

fn score(
    system: &InterdependentSystem,
    working: &InterdependentSystem,
    chosen: &[usize],
    node: usize,
    policy: ScoringPolicy,
) -> Result<usize> {
    let n = system.node_count();
    match policy {
        ScoringPolicy::OriginalSystem => {
            let attack = AttackSet::new(n, chosen.iter().copied().chain([node]))?;
            severity(system, &attack)
        }
        ScoringPolicy::WorkingGraphs => severity(working, &AttackSet::new(n, [node])?),
    }
}

fn run(system: &InterdependentSystem, k: usize, algo: Algo, policy: ScoringPolicy) -> Result<HeuristicResult> {
    let start = Instant::now();
    let n = system.node_count();
    check_k(n, k)?;
    let mut g1 = system.graph_a().clone();
    let mut g2 = system.graph_b().clone();
    let mut remaining: BTreeSet<usize> = (1..=n).collect();
    let mut selection = Vec::with_capacity(k);
    let mut steps = Vec::with_capacity(k);
    let mut scoring_calls = 0;

    for _ in 0..k {
        let pool: Vec<usize> = match algo {
            Algo::Greedy => remaining.iter().copied().collect(),
            Algo::MaxCas => {
                let mut art = g1.articulation_nodes();
                art.extend(g2.articulation_nodes());
                art.retain(|v| remaining.contains(v));
                art.into_iter().collect()
            }
        };

        let (candidates, scores) = if pool.is_empty() {
            (remaining.iter().copied().collect::<Vec<_>>(), BTreeMap::new())
        } else {
            let working = InterdependentSystem::new(g1.clone(), g2.clone())?;
            let scored: Vec<(usize, usize)> = pool
                .par_iter()
                .map(|&v| score(system, &working, &selection, v, policy).map(|s| (v, s)))
                .collect::<Result<_>>()?;
            scoring_calls += scored.len();
            let best = scored.iter().map(|&(_, s)| s).min().unwrap_or(0);
            let tied = scored.iter().filter(|&&(_, s)| s == best).map(|&(v, _)| v).collect();
            (tied, scored.into_iter().collect())
        };

        let mut chosen = None;
        let mut chosen_deg = 0;
        for &v in &candidates {
            let d = degree_sum(v, &g1, &g2)?;
            if chosen.is_none() || d > chosen_deg {
                chosen = Some(v);
                chosen_deg = d;
            }
        }
        let chosen = chosen.ok_or_else(|| invalid("no candidate node left"))?;

        g1 = g1.without_node(chosen);
        g2 = g2.without_node(chosen);
        remaining.remove(&chosen);
        selection.push(chosen);
        steps.push(StepChoice {
            candidates,
            chosen,
            scores,
        });
    }

    let attack_set = AttackSet::new(n, selection.iter().copied())?;
    let f = severity(system, &attack_set)?;
    Ok(HeuristicResult {
        selection,
        attack_set,
        f,
        per_step_choices: steps,
        scoring_calls,
        duration: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_node() -> InterdependentSystem {
        InterdependentSystem::from_edges(3, [(1, 3), (2, 3)], [(1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn k4() -> InterdependentSystem {
        InterdependentSystem::new(UndirectedGraph::complete(4), UndirectedGraph::complete(4)).unwrap()
    }

    #[test]
    fn greedy_three_node() {
        let r = greedy_select(&three_node(), 1).unwrap();
        assert_eq!(r.selection, vec![3]);
        assert_eq!(r.f, 1);
        let scores: Vec<_> = r.per_step_choices[0].scores.iter().map(|(&v, &s)| (v, s)).collect();
        assert_eq!(scores, vec![(1, 2), (2, 2), (3, 1)]);
        assert_eq!(r.per_step_choices[0].candidates, vec![3]);
    }

    #[test]
    fn maxcas_three_node() {
        let r = maxcas_select(&three_node(), 1).unwrap();
        assert_eq!(r.selection, vec![3]);
        assert_eq!(r.f, 1);
        assert_eq!(r.scoring_calls, 1);
    }

    #[test]
    fn complete_ties_go_to_lowest_id() {
        let g = greedy_select(&k4(), 1).unwrap();
        assert_eq!((g.selection.clone(), g.f), (vec![1], 3));
        assert_eq!(g.per_step_choices[0].candidates, vec![1, 2, 3, 4]);
        let m = maxcas_select(&k4(), 1).unwrap();
        assert_eq!((m.selection, m.f), (vec![1], 3));
        assert!(m.per_step_choices[0].scores.is_empty());
        assert_eq!(m.scoring_calls, 0);
    }

    #[test]
    fn degree_sums() {
        let s = three_node();
        assert_eq!(degree_sum(3, s.graph_a(), s.graph_b()).unwrap(), 4);
        let k = k4();
        assert_eq!(degree_sum(2, k.graph_a(), k.graph_b()).unwrap(), 6);
        let e = UndirectedGraph::empty(3);
        assert_eq!(degree_sum(1, &e, &e).unwrap(), 0);
        assert!(degree_sum(4, &e, &e).is_err());
    }

    #[test]
    fn degree_breaks_score_ties() {
        // Every single attack leaves a component of size 3; node 2 has the
        // largest degree sum.
        let s = InterdependentSystem::from_edges(4, [(1, 2), (2, 3), (2, 4), (3, 4)], [(1, 2), (2, 3), (3, 4), (1, 4), (2, 4)])
            .unwrap();
        let r = greedy_select(&s, 1).unwrap();
        assert_eq!(r.selection, vec![2]);
    }

    #[test]
    fn multi_round_selection_is_distinct() {
        let s = k4();
        for k in 1..4 {
            let r = greedy_select(&s, k).unwrap();
            assert_eq!(r.selection, (1..=k).collect::<Vec<_>>());
            assert_eq!(r.f, 4 - k);
        }
        assert!(greedy_select(&s, 4).is_err());
        assert!(maxcas_select(&s, 0).is_err());
    }

    #[test]
    fn working_graph_policy_agrees_on_first_round() {
        let r = greedy_select_with(&three_node(), 1, ScoringPolicy::WorkingGraphs).unwrap();
        assert_eq!(r.selection, vec![3]);
    }
}
