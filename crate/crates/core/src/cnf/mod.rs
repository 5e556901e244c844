//! Propositional encoding of the cascade: semantic variables, the
//! restricted formula shapes the encoding needs, and their CNF form.
//!
//! Variable schema (all pairs canonical `i < j`):
//!
//! * `z_i`: node `i` is attacked.
//! * `x(s, k, i, j)`, `s` odd: layer A at the end of stage `s`. `k = 0` is
//!   the link indicator; `k >= 1` is the Warshall chain ("connected using
//!   intermediates `1..=k` only"), so `k = n` is connectivity.
//! * `y(s, k, i, j)`, `s` even: the same for layer B, with `s = 0`
//!   standing for stage 1.

mod builders;
mod cardinality;
mod dimacs;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Not;

pub use builders::{
    build_ab, build_ba, build_closure_chain, build_m, build_p, build_propagation, build_stage1,
    build_stage1_links, build_up_to, m_semantic_var_count,
};
pub use cardinality::encode_cardinality;
pub use dimacs::{emit_dimacs, emit_var_map_json, parse_dimacs, parse_solver_output, DimacsCnf};

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemanticVar {
    Z(usize),
    X { s: usize, k: usize, i: usize, j: usize },
    Y { s: usize, k: usize, i: usize, j: usize },
    Aux(usize),
}

impl SemanticVar {
    pub fn z(i: usize) -> Self {
        SemanticVar::Z(i)
    }

    /// Layer-A variable; `(i, j)` and `(j, i)` are the same variable.
    pub fn x(s: usize, k: usize, a: usize, b: usize) -> Self {
        debug_assert!(s % 2 == 1, "x variables live on odd stages");
        let (i, j) = (a.min(b), a.max(b));
        SemanticVar::X { s, k, i, j }
    }

    /// Layer-B variable; `s = 0` is stage 1.
    pub fn y(s: usize, k: usize, a: usize, b: usize) -> Self {
        debug_assert!(s.is_multiple_of(2), "y variables live on even stages");
        let (i, j) = (a.min(b), a.max(b));
        SemanticVar::Y { s, k, i, j }
    }

    pub fn is_aux(self) -> bool {
        matches!(self, SemanticVar::Aux(_))
    }

    /// Name used in LP files: `z_i`, `x_i_j_s_k`, `y_i_j_s_k`.
    pub fn lp_name(self) -> String {
        match self {
            SemanticVar::Z(i) => format!("z_{i}"),
            SemanticVar::X { s, k, i, j } => format!("x_{i}_{j}_{s}_{k}"),
            SemanticVar::Y { s, k, i, j } => format!("y_{i}_{j}_{s}_{k}"),
            SemanticVar::Aux(n) => format!("aux_{n}"),
        }
    }
}

impl fmt::Display for SemanticVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SemanticVar::Z(i) => write!(f, "z_{i}"),
            SemanticVar::X { s, k, i, j } => write!(f, "x_{i}_{j}_s{s}_k{k}"),
            SemanticVar::Y { s, k, i, j } => write!(f, "y_{i}_{j}_s{s}_k{k}"),
            SemanticVar::Aux(n) => write!(f, "aux_{n}"),
        }
    }
}

/// A possibly negated semantic variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: SemanticVar,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: SemanticVar) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: SemanticVar) -> Self {
        Literal { var, positive: false }
    }
}

impl From<SemanticVar> for Literal {
    fn from(var: SemanticVar) -> Self {
        Literal::pos(var)
    }
}

impl Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }
}

/// The formula shapes the encoding is built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// A unit fact.
    Unit(Literal),
    /// `a <-> b`
    Iff(Literal, Literal),
    /// `a <-> (b & c)`
    IffAnd(Literal, Literal, Literal),
    /// `a <-> (b | (c & d))`
    IffOrAnd(Literal, Literal, Literal, Literal),
    /// `(p1 & q1) | (p2 & q2) | ...`; false when empty.
    AnyOfPairs(Vec<(Literal, Literal)>),
    /// Exactly `k` of the literals are true.
    ExactlyK(Vec<Literal>, usize),
}

impl Expr {
    /// Boolean value under a total assignment of the semantic variables.
    pub fn eval(&self, value: &impl Fn(SemanticVar) -> bool) -> bool {
        let lit = |l: &Literal| value(l.var) == l.positive;
        match self {
            Expr::Unit(a) => lit(a),
            Expr::Iff(a, b) => lit(a) == lit(b),
            Expr::IffAnd(a, b, c) => lit(a) == (lit(b) && lit(c)),
            Expr::IffOrAnd(a, b, c, d) => lit(a) == (lit(b) || (lit(c) && lit(d))),
            Expr::AnyOfPairs(terms) => terms.iter().any(|(p, q)| lit(p) && lit(q)),
            Expr::ExactlyK(lits, k) => lits.iter().filter(|l| lit(l)).count() == *k,
        }
    }

    /// Clause expansion for the auxiliary-free shapes; `None` for
    /// [`Expr::AnyOfPairs`] and [`Expr::ExactlyK`].
    pub fn clauses(&self) -> Option<Vec<Vec<Literal>>> {
        Some(match *self {
            Expr::Unit(a) => vec![vec![a]],
            Expr::Iff(a, b) => vec![vec![!a, b], vec![a, !b]],
            Expr::IffAnd(a, b, c) => vec![vec![!a, b], vec![!a, c], vec![a, !b, !c]],
            Expr::IffOrAnd(a, b, c, d) => vec![
                vec![!a, b, c],
                vec![!a, b, d],
                vec![!b, a],
                vec![!c, !d, a],
            ],
            Expr::AnyOfPairs(_) | Expr::ExactlyK(..) => return None,
        })
    }

    fn for_each_literal(&self, mut f: impl FnMut(Literal)) {
        match self {
            Expr::Unit(a) => f(*a),
            Expr::Iff(a, b) => {
                f(*a);
                f(*b);
            }
            Expr::IffAnd(a, b, c) => {
                f(*a);
                f(*b);
                f(*c);
            }
            Expr::IffOrAnd(a, b, c, d) => {
                f(*a);
                f(*b);
                f(*c);
                f(*d);
            }
            Expr::AnyOfPairs(terms) => terms.iter().for_each(|(p, q)| {
                f(*p);
                f(*q);
            }),
            Expr::ExactlyK(lits, _) => lits.iter().copied().for_each(f),
        }
    }
}

/// A conjunction of [`Expr`]s.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Formula {
    pub parts: Vec<Expr>,
}

impl Formula {
    pub fn new() -> Self {
        Formula::default()
    }

    pub fn push(&mut self, e: Expr) {
        self.parts.push(e);
    }

    pub fn and(mut self, other: Formula) -> Formula {
        self.parts.extend(other.parts);
        self
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn eval(&self, value: &impl Fn(SemanticVar) -> bool) -> bool {
        self.parts.iter().all(|p| p.eval(value))
    }

    /// Distinct semantic variables, in numbering order.
    pub fn semantic_vars(&self) -> BTreeSet<SemanticVar> {
        let mut vars = BTreeSet::new();
        for p in &self.parts {
            p.for_each_literal(|l| {
                vars.insert(l.var);
            });
        }
        vars
    }

    /// Converts to clauses. Semantic variables are numbered first in
    /// `SemanticVar` order (Z, then X by `(s,k,i,j)`, then Y), auxiliaries
    /// after them in construction order.
    pub fn to_cnf(&self) -> CnfFormula {
        let mut b = CnfBuilder::new();
        for v in self.semantic_vars() {
            b.var_of(v);
        }
        for part in &self.parts {
            b.add_expr(part);
        }
        b.finish()
    }
}

/// Bijection between DIMACS variable numbers (from 1) and semantic variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarMap {
    by_index: Vec<SemanticVar>,
    by_var: HashMap<SemanticVar, u32>,
}

impl VarMap {
    pub fn len(&self) -> usize {
        self.by_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_index.is_empty()
    }

    pub fn get(&self, v: SemanticVar) -> Option<u32> {
        self.by_var.get(&v).copied()
    }

    pub fn semantic(&self, num: u32) -> Option<SemanticVar> {
        self.by_index.get((num as usize).checked_sub(1)?).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, SemanticVar)> + '_ {
        self.by_index.iter().enumerate().map(|(i, v)| (i as u32 + 1, *v))
    }

    fn insert(&mut self, v: SemanticVar) -> u32 {
        if let Some(&n) = self.by_var.get(&v) {
            return n;
        }
        self.by_index.push(v);
        let n = self.by_index.len() as u32;
        self.by_var.insert(v, n);
        n
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
    pub var_map: VarMap,
}

impl CnfFormula {
    pub fn from_clauses(num_vars: u32, clauses: Vec<Vec<i32>>) -> Self {
        CnfFormula {
            num_vars,
            clauses,
            var_map: VarMap::default(),
        }
    }

    pub fn literal(&self, l: Literal) -> Option<i32> {
        let v = self.var_map.get(l.var)? as i32;
        Some(if l.positive { v } else { -v })
    }

    /// Count of non-auxiliary variables.
    pub fn semantic_var_count(&self) -> usize {
        self.var_map.iter().filter(|(_, v)| !v.is_aux()).count()
    }

    /// Value of a semantic variable in a model indexed by variable number
    /// (index 0 unused).
    pub fn value(&self, model: &[bool], v: SemanticVar) -> Option<bool> {
        self.var_map.get(v).map(|n| model[n as usize])
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        for (idx, c) in self.clauses.iter().enumerate() {
            for &l in c {
                if l == 0 || l.unsigned_abs() > self.num_vars {
                    return Err(invalid(format!("clause {idx} references variable {l} out of range")));
                }
                if c.contains(&-l) {
                    return Err(invalid(format!("clause {idx} is tautological on variable {}", l.abs())));
                }
            }
        }
        Ok(())
    }
}

/// Incremental clause construction with auxiliary allocation.
#[derive(Clone, Debug, Default)]
pub struct CnfBuilder {
    var_map: VarMap,
    clauses: Vec<Vec<i32>>,
    aux_serial: usize,
}

impl CnfBuilder {
    pub fn new() -> Self {
        CnfBuilder::default()
    }

    pub fn var_of(&mut self, v: SemanticVar) -> i32 {
        self.var_map.insert(v) as i32
    }

    pub fn lit(&mut self, l: Literal) -> i32 {
        let v = self.var_of(l.var);
        if l.positive {
            v
        } else {
            -v
        }
    }

    pub fn fresh_aux(&mut self) -> i32 {
        self.aux_serial += 1;
        self.var_of(SemanticVar::Aux(self.aux_serial))
    }

    pub fn add_clause(&mut self, mut clause: Vec<i32>) {
        clause.dedup();
        self.clauses.push(clause);
    }

    pub fn num_vars(&self) -> u32 {
        self.var_map.len() as u32
    }

    /// `a <-> (b & c)`
    pub fn iff_and(&mut self, a: i32, b: i32, c: i32) {
        self.add_clause(vec![-a, b]);
        self.add_clause(vec![-a, c]);
        self.add_clause(vec![a, -b, -c]);
    }

    /// `a <-> (b | (c & d))`
    pub fn iff_or_and(&mut self, a: i32, b: i32, c: i32, d: i32) {
        self.add_clause(vec![-a, b, c]);
        self.add_clause(vec![-a, b, d]);
        self.add_clause(vec![-b, a]);
        self.add_clause(vec![-c, -d, a]);
    }

    /// `a <-> (b | c)`
    pub fn iff_or(&mut self, a: i32, b: i32, c: i32) {
        self.add_clause(vec![-a, b, c]);
        self.add_clause(vec![-b, a]);
        self.add_clause(vec![-c, a]);
    }

    pub fn add_expr(&mut self, e: &Expr) {
        if let Some(clauses) = e.clauses() {
            for c in clauses {
                let c = c.into_iter().map(|l| self.lit(l)).collect();
                self.add_clause(c);
            }
            return;
        }
        match e {
            Expr::AnyOfPairs(terms) => {
                let mut outer = Vec::with_capacity(terms.len());
                for (p, q) in terms {
                    let (p, q) = (self.lit(*p), self.lit(*q));
                    let t = self.fresh_aux();
                    self.iff_and(t, p, q);
                    outer.push(t);
                }
                self.add_clause(outer);
            }
            Expr::ExactlyK(lits, k) => {
                let lits: Vec<i32> = lits.iter().map(|l| self.lit(*l)).collect();
                encode_cardinality(self, &lits, *k).expect("cardinality validated by the builder");
            }
            _ => unreachable!("handled by clause expansion"),
        }
    }

    pub fn finish(self) -> CnfFormula {
        CnfFormula {
            num_vars: self.var_map.len() as u32,
            clauses: self.clauses,
            var_map: self.var_map,
        }
    }
}
