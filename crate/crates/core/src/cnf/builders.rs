//! Sub-formulas of the stage encoding and the per-stage query formula
//! `M_l = S & AB_2 & BA_3 & ... & P_l`.

use super::{CnfFormula, Expr, Formula, Literal, SemanticVar};
use crate::cascade::{stage_target, Layer};
use crate::error::{invalid, Result};
use crate::graph::{all_pairs, InterdependentSystem, UndirectedGraph};

fn layer_var(layer: Layer, s: usize, k: usize, i: usize, j: usize) -> SemanticVar {
    match layer {
        Layer::A => SemanticVar::x(s, k, i, j),
        Layer::B => SemanticVar::y(s, k, i, j),
    }
}

/// Variable stage index holding the state of `layer` after `stage`.
/// Layer B's stage-1 state lives at index 0.
fn state_index(layer: Layer, stage: usize) -> usize {
    match layer {
        Layer::A => stage,
        Layer::B if stage == 1 => 0,
        Layer::B => stage,
    }
}

fn graph_of(system: &InterdependentSystem, layer: Layer) -> &UndirectedGraph {
    match layer {
        Layer::A => system.graph_a(),
        Layer::B => system.graph_b(),
    }
}

/// Stage-1 link definitions for both layers (no cardinality).
pub fn build_stage1_links(system: &InterdependentSystem) -> Formula {
    let n = system.node_count();
    let mut f = Formula::new();
    for layer in [Layer::A, Layer::B] {
        let g = graph_of(system, layer);
        let s = state_index(layer, 1);
        for e in g.edges() {
            f.push(Expr::IffAnd(
                Literal::pos(layer_var(layer, s, 0, e.lo(), e.hi())),
                Literal::neg(SemanticVar::z(e.lo())),
                Literal::neg(SemanticVar::z(e.hi())),
            ));
        }
        for (i, j) in all_pairs(n).filter(|&(i, j)| !g.has_edge(i, j)) {
            f.push(Expr::Unit(Literal::neg(layer_var(layer, s, 0, i, j))));
        }
    }
    f
}

/// `S`: stage-1 links plus exactly `k` attacked nodes.
pub fn build_stage1(system: &InterdependentSystem, k: usize) -> Result<Formula> {
    let n = system.node_count();
    crate::oracle::check_k(n, k)?;
    let mut f = build_stage1_links(system);
    let z: Vec<Literal> = (1..=n).map(|i| Literal::pos(SemanticVar::z(i))).collect();
    f.push(Expr::ExactlyK(z, k));
    Ok(f)
}

/// Warshall unrolling over the state variables of `layer` at variable
/// stage index `s`: `v(k) <-> v(k-1) | (v_ik(k-1) & v_kj(k-1))`, with the
/// plain chain `v(k) <-> v(k-1)` when `k` is an endpoint.
pub fn build_closure_chain(layer: Layer, s: usize, n: usize) -> Formula {
    let mut f = Formula::new();
    for (i, j) in all_pairs(n) {
        for k in 1..=n {
            let out = Literal::pos(layer_var(layer, s, k, i, j));
            let prev = Literal::pos(layer_var(layer, s, k - 1, i, j));
            if k == i || k == j {
                f.push(Expr::Iff(out, prev));
            } else {
                f.push(Expr::IffOrAnd(
                    out,
                    prev,
                    Literal::pos(layer_var(layer, s, k - 1, i, k)),
                    Literal::pos(layer_var(layer, s, k - 1, k, j)),
                ));
            }
        }
    }
    f
}

/// Link survival in the layer updated at `stage` (`stage >= 2`): a link
/// survives iff it survived two stages earlier and its endpoints are
/// connected in the other layer at the end of the previous stage.
pub fn build_propagation(system: &InterdependentSystem, stage: usize) -> Formula {
    debug_assert!(stage >= 2);
    let n = system.node_count();
    let target = stage_target(stage);
    let source = match target {
        Layer::A => Layer::B,
        Layer::B => Layer::A,
    };
    let g = graph_of(system, target);
    let src_s = state_index(source, stage - 1);
    let old_s = state_index(target, stage - 2);
    let mut f = Formula::new();
    for e in g.edges() {
        let (i, j) = (e.lo(), e.hi());
        f.push(Expr::IffAnd(
            Literal::pos(layer_var(target, stage, 0, i, j)),
            Literal::pos(layer_var(source, src_s, n, i, j)),
            Literal::pos(layer_var(target, old_s, 0, i, j)),
        ));
    }
    for (i, j) in all_pairs(n).filter(|&(i, j)| !g.has_edge(i, j)) {
        f.push(Expr::Unit(Literal::neg(layer_var(target, stage, 0, i, j))));
    }
    f
}

/// `AB_s`, `s` even: closure of A after stage `s-1`, then B link updates.
pub fn build_ab(system: &InterdependentSystem, s: usize) -> Result<Formula> {
    if s < 2 || !s.is_multiple_of(2) {
        return Err(invalid(format!("AB_s needs an even stage >= 2, got {s}")));
    }
    Ok(build_closure_chain(Layer::A, s - 1, system.node_count()).and(build_propagation(system, s)))
}

/// `BA_s`, `s` odd: closure of B after stage `s-1`, then A link updates.
pub fn build_ba(system: &InterdependentSystem, s: usize) -> Result<Formula> {
    if s < 3 || s % 2 != 1 {
        return Err(invalid(format!("BA_s needs an odd stage >= 3, got {s}")));
    }
    Ok(build_closure_chain(Layer::B, s - 1, system.node_count()).and(build_propagation(system, s)))
}

/// `P_l`: some link of the layer updated at stage `l` survived stage `l-2`
/// but not stage `l`.
pub fn build_p(system: &InterdependentSystem, l: usize) -> Result<Formula> {
    if l < 2 {
        return Err(invalid(format!("P_l needs l >= 2, got {l}")));
    }
    let target = stage_target(l);
    let old_s = state_index(target, l - 2);
    let terms = graph_of(system, target)
        .edges()
        .map(|e| {
            (
                Literal::pos(layer_var(target, old_s, 0, e.lo(), e.hi())),
                Literal::neg(layer_var(target, l, 0, e.lo(), e.hi())),
            )
        })
        .collect();
    let mut f = Formula::new();
    f.push(Expr::AnyOfPairs(terms));
    Ok(f)
}

/// `S & AB_2 & BA_3 & ...` through stage `last` (no `P`).
pub fn build_up_to(system: &InterdependentSystem, k: usize, last: usize) -> Result<Formula> {
    let mut f = build_stage1(system, k)?;
    for s in 2..=last {
        f = f.and(if s % 2 == 0 { build_ab(system, s)? } else { build_ba(system, s)? });
    }
    Ok(f)
}

/// `M_l` in CNF.
pub fn build_m(system: &InterdependentSystem, k: usize, l: usize) -> Result<CnfFormula> {
    if l < 2 {
        return Err(invalid(format!("M_l needs l >= 2, got {l}")));
    }
    Ok(build_up_to(system, k, l)?.and(build_p(system, l)?).to_cnf())
}

/// Closed-form count of non-auxiliary variables in `M_l` (`l >= 2`).
pub fn m_semantic_var_count(n: usize, l: usize) -> usize {
    let pairs = crate::graph::pair_count(n);
    let x_links = l.div_ceil(2);
    let x_chains = l / 2;
    let y_links = l / 2 + 1;
    let y_chains = (l - 1) / 2;
    n + pairs * (x_links + y_links + n * (x_chains + y_chains))
}
