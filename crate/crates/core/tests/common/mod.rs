#![allow(dead_code)]

use std::collections::HashMap;

use critnode::cascade::{simulate, Layer};
use critnode::cnf::SemanticVar;
use critnode::gen::{generate_system, GenConfig};
use critnode::graph::all_pairs;
use critnode::ilp::{Cmp, IlpModel};
use critnode::{AttackSet, Edge, InterdependentSystem, UndirectedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Erdős–Rényi layer; may be disconnected.
pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> UndirectedGraph {
    let mut edges = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    UndirectedGraph::new(n, edges).unwrap()
}

pub fn random_system(n: usize, seed: u64) -> InterdependentSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pa = rng.gen_range(0.25..0.6);
    let pb = rng.gen_range(0.25..0.6);
    let a = random_graph(n, pa, &mut rng);
    let b = random_graph(n, pb, &mut rng);
    InterdependentSystem::new(a, b).unwrap()
}

/// The seeded oracle-comparison suite: `(system, k)` pairs alternating
/// between uniform random layers and generated scale-free layers, with
/// `n` in `6..=10` and `k` in `1..=3`.
pub fn oracle_suite(count: usize, seed: u64) -> Vec<(InterdependentSystem, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|idx| {
            let n = rng.gen_range(6..=10);
            let k = rng.gen_range(1..=3);
            let s: u64 = rng.gen();
            let system = if idx % 2 == 0 {
                random_system(n, s)
            } else {
                generate_system(&GenConfig::new(n, s)).unwrap()
            };
            (system, k)
        })
        .collect()
}

/// Small instances for the exhaustive faithfulness checks.
pub fn small_suite(max_n: usize, per_n: usize, seed: u64) -> Vec<InterdependentSystem> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for idx in 0..per_n {
            out.push(random_system(n, seed ^ ((n as u64) << 16) ^ idx as u64));
        }
    }
    out
}

/// Link and closure variables of both layers for every stage up to
/// `last`, with the value the cascade gives them.
pub fn expected_values(
    system: &InterdependentSystem,
    attack: &AttackSet,
    last: usize,
) -> Vec<(SemanticVar, bool)> {
    let n = system.node_count();
    let trace = simulate(system, attack).unwrap();
    let mut out = Vec::new();
    for s in 1..=last {
        for layer in [Layer::A, Layer::B] {
            // Layer A has link variables at odd stages, layer B at even
            // stages and (as index 0) after stage 1.
            let (stage, idx) = match layer {
                Layer::A if s % 2 == 1 => (s, s),
                Layer::B if s == 1 => (1, 0),
                Layer::B if s % 2 == 0 => (s, s),
                _ => continue,
            };
            let snap = trace.snapshot(stage);
            let edges = match layer {
                Layer::A => &snap.edges_a,
                Layer::B => &snap.edges_b,
            };
            let g = UndirectedGraph::new(n, edges.iter().map(|e| (e.lo(), e.hi()))).unwrap();
            let closure = g.connectivity_closure();
            let has_chain = stage < last && idx > 0;
            for (i, j) in all_pairs(n) {
                let var = |k| match layer {
                    Layer::A => SemanticVar::x(idx, k, i, j),
                    Layer::B => SemanticVar::y(idx, k, i, j),
                };
                out.push((var(0), trace.link_alive(layer, stage, Edge::new(i, j).unwrap())));
                if has_chain {
                    out.push((var(n), closure.get(i, j)));
                }
            }
        }
    }
    out
}

/// Minimal DIMACS reader: skips comments, ignores the header, splits on 0.
pub fn read_dimacs(text: &str) -> (usize, Vec<Vec<i32>>) {
    let mut vars = 0;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for line in text.lines() {
        if line.starts_with('c') {
            continue;
        }
        if let Some(h) = line.strip_prefix("p cnf ") {
            vars = h.split(' ').next().unwrap().parse().unwrap();
            continue;
        }
        for t in line.split(' ').filter(|t| !t.is_empty()) {
            match t.parse::<i32>().unwrap() {
                0 => clauses.push(std::mem::take(&mut cur)),
                l => cur.push(l),
            }
        }
    }
    (vars, clauses)
}

pub type Row = (String, Vec<(String, i64)>, String, i64);

/// Rows, integer bounds, binaries and general integers of an LP file.
pub type LpParts = (Vec<Row>, HashMap<String, (i64, i64)>, Vec<String>, Vec<String>);

/// Minimal LP reader for the subset of the format the writer uses.
pub fn read_lp(text: &str) -> LpParts {
    let mut section = "";
    let mut rows: Vec<Row> = Vec::new();
    let mut pending = String::new();
    let mut bounds = HashMap::new();
    let mut binary = Vec::new();
    let mut general = Vec::new();
    let flush = |pending: &mut String, rows: &mut Vec<Row>| {
        if pending.is_empty() {
            return;
        }
        let (name, body) = pending.split_once(':').unwrap();
        let toks: Vec<&str> = body.split_whitespace().collect();
        let (lhs, rest) = toks.split_at(toks.len() - 2);
        let mut terms = Vec::new();
        let mut sign = 1;
        let mut coef = 1;
        for t in lhs {
            match *t {
                "+" => sign = 1,
                "-" => sign = -1,
                t if t.parse::<i64>().is_ok() => coef = t.parse().unwrap(),
                t => {
                    terms.push((t.to_string(), sign * coef));
                    sign = 1;
                    coef = 1;
                }
            }
        }
        terms.sort();
        rows.push((name.trim().to_string(), terms, rest[0].to_string(), rest[1].parse().unwrap()));
        pending.clear();
    };
    for line in text.lines() {
        if line.starts_with('\\') {
            continue;
        }
        match line.trim() {
            "Minimize" | "Subject To" | "Bounds" | "Binary" | "General" | "End" => {
                flush(&mut pending, &mut rows);
                section = match line.trim() {
                    "Minimize" => "obj",
                    "Subject To" => "st",
                    "Bounds" => "bounds",
                    "Binary" => "bin",
                    "General" => "gen",
                    _ => "end",
                };
                continue;
            }
            _ => {}
        }
        match section {
            "st" => {
                if line.starts_with("   ") {
                    pending.push(' ');
                    pending.push_str(line.trim());
                } else {
                    flush(&mut pending, &mut rows);
                    pending = line.trim().to_string();
                }
            }
            "bounds" => {
                let t: Vec<&str> = line.split_whitespace().collect();
                bounds.insert(t[2].to_string(), (t[0].parse().unwrap(), t[4].parse().unwrap()));
            }
            "bin" => binary.push(line.trim().to_string()),
            "gen" => general.push(line.trim().to_string()),
            _ => {}
        }
    }
    (rows, bounds, binary, general)
}

pub fn model_rows(m: &IlpModel) -> Vec<Row> {
    m.constraints
        .iter()
        .map(|c| {
            let mut terms: Vec<(String, i64)> = c.terms.iter().map(|&(v, a)| (m.vars[v].name.clone(), a)).collect();
            terms.sort();
            let cmp = match c.cmp {
                Cmp::Le => "<=",
                Cmp::Ge => ">=",
                Cmp::Eq => "=",
            };
            (c.name.clone(), terms, cmp.to_string(), c.rhs)
        })
        .collect()
}
