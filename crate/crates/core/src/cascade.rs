//! Stage-by-stage cascading failure between two interdependent layers.
//!
//! Stage 1 removes every link incident to an attack node in both layers.
//! Even stages remove layer-B links whose endpoints are disconnected in
//! layer A at the start of the stage; odd stages (3, 5, ...) do the reverse.
//! A quiet stage 2 does not end the cascade: links of layer A can still fail
//! in stage 3 because layer A was never checked against the post-attack
//! layer B. From stage 3 on, a quiet stage is a fixpoint.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::graph::{AttackSet, Edge, InterdependentSystem, UndirectedGraph};

/// Which layer a stage modifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Layer {
    A,
    B,
}

/// Surviving links of both layers at the end of one stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageSnapshot {
    pub stage: usize,
    pub edges_a: Vec<Edge>,
    pub edges_b: Vec<Edge>,
    pub removed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CascadeTrace {
    /// Snapshots for stages `1..=last_failure_stage`.
    pub stages: Vec<StageSnapshot>,
    pub last_failure_stage: usize,
    pub final_components: Vec<Vec<usize>>,
    pub largest_component_size: usize,
}

impl CascadeTrace {
    /// Snapshot at the end of `stage`; stages past the fixpoint repeat the
    /// final state.
    pub fn snapshot(&self, stage: usize) -> &StageSnapshot {
        assert!(stage >= 1, "stages start at 1");
        let idx = (stage - 1).min(self.stages.len() - 1);
        &self.stages[idx]
    }

    /// Whether link `{i,j}` of `layer` survives the end of `stage`.
    pub fn link_alive(&self, layer: Layer, stage: usize, e: Edge) -> bool {
        let snap = self.snapshot(stage);
        let edges = match layer {
            Layer::A => &snap.edges_a,
            Layer::B => &snap.edges_b,
        };
        edges.binary_search(&e).is_ok()
    }

    /// Whether `stage` removed at least one link.
    pub fn removed_at(&self, stage: usize) -> bool {
        stage >= 1 && stage <= self.stages.len() && self.stages[stage - 1].removed > 0
    }
}

/// Layer updated in `stage` (`stage >= 2`).
pub fn stage_target(stage: usize) -> Layer {
    if stage.is_multiple_of(2) {
        Layer::B
    } else {
        Layer::A
    }
}

fn validate(system: &InterdependentSystem, attack: &AttackSet) -> Result<()> {
    let n = system.node_count();
    if attack.is_empty() {
        return Err(invalid("attack set is empty"));
    }
    if let Some(v) = attack.iter().find(|&v| v == 0 || v > n) {
        return Err(invalid(format!("attack node {v} outside 1..={n}")));
    }
    Ok(())
}

/// Runs the cascade to its fixpoint.
pub fn simulate(system: &InterdependentSystem, attack: &AttackSet) -> Result<CascadeTrace> {
    validate(system, attack)?;
    let n = system.node_count();

    let strip = |g: &UndirectedGraph| -> BTreeSet<Edge> {
        g.edges().filter(|e| !attack.contains(e.lo()) && !attack.contains(e.hi())).collect()
    };
    let mut a = strip(system.graph_a());
    let mut b = strip(system.graph_b());
    let removed = system.total_edges() - a.len() - b.len();

    let mut stages = vec![StageSnapshot {
        stage: 1,
        edges_a: a.iter().copied().collect(),
        edges_b: b.iter().copied().collect(),
        removed,
    }];
    let mut last_failure_stage = 1;

    let mut stage = 2;
    loop {
        let (source, target) = match stage_target(stage) {
            Layer::B => (&a, &mut b),
            Layer::A => (&b, &mut a),
        };
        let labels = UndirectedGraph::from_edge_set(n, source.clone()).component_labels();
        let before = target.len();
        target.retain(|e| labels[e.lo()] == labels[e.hi()]);
        let removed = before - target.len();

        if removed > 0 {
            last_failure_stage = stage;
        } else if stage >= 3 {
            break;
        }
        stages.push(StageSnapshot {
            stage,
            edges_a: a.iter().copied().collect(),
            edges_b: b.iter().copied().collect(),
            removed,
        });
        stage += 1;
    }
    stages.truncate(last_failure_stage);

    let final_a = UndirectedGraph::from_edge_set(n, a);
    let final_components = final_a.connected_components();
    debug_assert_eq!(
        final_components,
        UndirectedGraph::from_edge_set(n, b).connected_components()
    );
    let largest_component_size = final_components.iter().map(Vec::len).max().unwrap_or(0);

    Ok(CascadeTrace {
        stages,
        last_failure_stage,
        final_components,
        largest_component_size,
    })
}

/// Size of the largest failure-induced connected component.
pub fn severity(system: &InterdependentSystem, attack: &AttackSet) -> Result<usize> {
    Ok(simulate(system, attack)?.largest_component_size)
}
