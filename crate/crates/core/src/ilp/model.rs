use std::collections::HashMap;
use std::fmt;

use crate::cnf::{
    build_closure_chain, build_propagation, build_stage1_links, Expr, Formula, Literal, SemanticVar,
};
use crate::cascade::Layer;
use crate::error::{invalid, Result};
use crate::graph::InterdependentSystem;

pub type VarId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer { lo: i64, hi: i64 },
}

impl VarKind {
    pub fn range(self) -> (i64, i64) {
        match self {
            VarKind::Binary => (0, 1),
            VarKind::Integer { lo, hi } => (lo, hi),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    pub semantic: Option<SemanticVar>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
            Cmp::Eq => "=",
        })
    }
}

/// `sum(coef * var) cmp rhs`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub name: String,
    pub terms: Vec<(VarId, i64)>,
    pub cmp: Cmp,
    pub rhs: i64,
}

impl LinearConstraint {
    pub fn activity(&self, values: &[i64]) -> i64 {
        self.terms.iter().map(|&(v, c)| c * values[v]).sum()
    }

    pub fn is_satisfied(&self, values: &[i64]) -> bool {
        let lhs = self.activity(values);
        match self.cmp {
            Cmp::Le => lhs <= self.rhs,
            Cmp::Ge => lhs >= self.rhs,
            Cmp::Eq => lhs == self.rhs,
        }
    }
}

/// Problem-level facts the decoder and the built-in solver rely on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInfo {
    pub n: usize,
    pub k: usize,
    pub l_max: usize,
    /// `z_1..z_n` in node order.
    pub z_vars: Vec<VarId>,
    pub bound: VarId,
}

/// A linear model with 0-1 and bounded integer variables, minimizing a
/// single variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IlpModel {
    pub vars: Vec<VarDecl>,
    pub constraints: Vec<LinearConstraint>,
    pub objective: Option<VarId>,
    by_name: HashMap<String, VarId>,
    by_semantic: HashMap<SemanticVar, VarId>,
    pub info: Option<ProblemInfo>,
}

impl IlpModel {
    pub fn new() -> Self {
        IlpModel::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind) -> VarId {
        let name = name.into();
        if let Some(&id) = self.by_name.get(&name) {
            return id;
        }
        let id = self.vars.len();
        self.by_name.insert(name.clone(), id);
        self.vars.push(VarDecl {
            name,
            kind,
            semantic: None,
        });
        id
    }

    pub fn semantic_var(&mut self, v: SemanticVar) -> VarId {
        if let Some(&id) = self.by_semantic.get(&v) {
            return id;
        }
        let id = self.add_var(v.lp_name(), VarKind::Binary);
        self.vars[id].semantic = Some(v);
        self.by_semantic.insert(v, id);
        id
    }

    pub fn add_constraint(&mut self, name: impl Into<String>, terms: Vec<(VarId, i64)>, cmp: Cmp, rhs: i64) {
        self.constraints.push(LinearConstraint {
            name: name.into(),
            terms,
            cmp,
            rhs,
        });
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn var_of(&self, v: SemanticVar) -> Option<VarId> {
        self.by_semantic.get(&v).copied()
    }

    pub fn constraint(&self, name: &str) -> Option<&LinearConstraint> {
        self.constraints.iter().find(|c| c.name == name)
    }

    /// Adds one clause as `sum(pos) + sum(1 - neg) >= 1`.
    fn add_clause(&mut self, name: String, clause: &[Literal]) {
        let mut terms = Vec::with_capacity(clause.len());
        let mut negatives = 0;
        for l in clause {
            let id = self.semantic_var(l.var);
            if l.positive {
                terms.push((id, 1));
            } else {
                terms.push((id, -1));
                negatives += 1;
            }
        }
        self.add_constraint(name, terms, Cmp::Ge, 1 - negatives);
    }

    /// Linearizes a Boolean part. Negative units become `v = 0` fixings and
    /// plain equivalences become `a - b = 0`; every other clause uses the
    /// `>= 1` form.
    fn add_expr(&mut self, family: &str, counter: &mut usize, e: &Expr) {
        match *e {
            Expr::Unit(Literal { var, positive }) => {
                let id = self.semantic_var(var);
                *counter += 1;
                self.add_constraint(format!("{family}_{counter}"), vec![(id, 1)], Cmp::Eq, positive as i64);
            }
            Expr::Iff(a, b) if a.positive && b.positive => {
                let (ia, ib) = (self.semantic_var(a.var), self.semantic_var(b.var));
                *counter += 1;
                self.add_constraint(format!("{family}_{counter}"), vec![(ia, 1), (ib, -1)], Cmp::Eq, 0);
            }
            _ => {
                let clauses = e.clauses().expect("phase-2 parts are auxiliary-free");
                for c in clauses {
                    *counter += 1;
                    self.add_clause(format!("{family}_{counter}"), &c);
                }
            }
        }
    }

    fn add_formula(&mut self, family: &str, f: &Formula) {
        let mut counter = 0;
        for e in &f.parts {
            self.add_expr(family, &mut counter, e);
        }
    }
}

/// Stages covered by each constraint family for a given `l_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Horizon {
    /// Even `s` whose layer-A closure (over stage `s-1`) is encoded.
    pub a_closures: Vec<usize>,
    /// Odd `s` whose layer-B closure (over stage `s-1`) is encoded.
    pub b_closures: Vec<usize>,
    /// Even stages with layer-B link updates.
    pub b_updates: Vec<usize>,
    /// Odd stages with layer-A link updates.
    pub a_updates: Vec<usize>,
}

impl Horizon {
    pub fn for_lmax(l_max: usize) -> Self {
        let a_closure_end = 2 * l_max.div_ceil(2);
        let b_closure_end = 2 * (l_max - 1).div_ceil(2) + 1;
        let b_update_end = 2 * (l_max / 2);
        let a_update_end = 2 * ((l_max - 1) / 2) + 1;
        Horizon {
            a_closures: (2..=a_closure_end).step_by(2).collect(),
            b_closures: (3..=b_closure_end).step_by(2).collect(),
            b_updates: (2..=b_update_end).step_by(2).collect(),
            a_updates: (3..=a_update_end).step_by(2).collect(),
        }
    }
}

/// Phase-2 model: the cascade through stage `l_max` plus one extra
/// closure so the final connectivity is available, and per-node component
/// size bounds on it.
pub fn build_ilp(system: &InterdependentSystem, k: usize, l_max: usize) -> Result<IlpModel> {
    let n = system.node_count();
    crate::oracle::check_k(n, k)?;
    if l_max < 1 {
        return Err(invalid(format!("l_max must be >= 1, got {l_max}")));
    }
    let h = Horizon::for_lmax(l_max);
    let mut m = IlpModel::new();

    // Declare variables up front in schema order for stable naming.
    let mut all = build_stage1_links(system);
    for &s in &h.a_closures {
        all = all.and(build_closure_chain(Layer::A, s - 1, n));
    }
    for &s in &h.b_closures {
        all = all.and(build_closure_chain(Layer::B, s - 1, n));
    }
    for &s in h.b_updates.iter().chain(&h.a_updates) {
        all = all.and(build_propagation(system, s));
    }
    for i in 1..=n {
        m.semantic_var(SemanticVar::z(i));
    }
    for v in all.semantic_vars() {
        m.semantic_var(v);
    }
    let bound = m.add_var("bound", VarKind::Integer { lo: 1, hi: n as i64 });
    m.objective = Some(bound);

    m.add_formula("stage1", &build_stage1_links(system));
    let z_vars: Vec<VarId> = (1..=n).map(|i| m.semantic_var(SemanticVar::z(i))).collect();
    m.add_constraint("cardinality", z_vars.iter().map(|&z| (z, 1)).collect(), Cmp::Eq, k as i64);

    // Interleave in stage order so the file reads like the cascade.
    let last = h
        .a_closures
        .iter()
        .chain(&h.b_closures)
        .copied()
        .max()
        .unwrap_or(1)
        .max(l_max);
    for s in 2..=last {
        if h.a_closures.contains(&s) {
            m.add_formula(&format!("closeA_s{s}"), &build_closure_chain(Layer::A, s - 1, n));
        }
        if h.b_closures.contains(&s) {
            m.add_formula(&format!("closeB_s{s}"), &build_closure_chain(Layer::B, s - 1, n));
        }
        if h.b_updates.contains(&s) {
            m.add_formula(&format!("updateB_s{s}"), &build_propagation(system, s));
        }
        if h.a_updates.contains(&s) {
            m.add_formula(&format!("updateA_s{s}"), &build_propagation(system, s));
        }
    }

    // size(component of i) = 1 + sum_j conn(i, j) <= bound
    for i in 1..=n {
        let mut terms: Vec<(VarId, i64)> = (1..=n)
            .filter(|&j| j != i)
            .map(|j| {
                let v = if l_max % 2 == 1 {
                    SemanticVar::x(l_max, n, i, j)
                } else {
                    SemanticVar::y(l_max, n, i, j)
                };
                (m.var_of(v).expect("final closure declared"), 1)
            })
            .collect();
        terms.push((bound, -1));
        m.add_constraint(format!("size_{i}"), terms, Cmp::Le, -1);
    }

    m.info = Some(ProblemInfo {
        n,
        k,
        l_max,
        z_vars,
        bound,
    });
    Ok(m)
}
