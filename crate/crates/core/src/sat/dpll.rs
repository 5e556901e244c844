//! Complete DPLL search with two-watched-literal unit propagation and
//! chronological backtracking. Branching picks the lowest unassigned
//! variable and tries `true` first, so models are reproducible.

use super::SatResult;
use crate::cnf::CnfFormula;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Lit(u32);

impl Lit {
    fn from_dimacs(l: i32) -> Lit {
        Lit(l.unsigned_abs() << 1 | (l < 0) as u32)
    }

    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    fn negative(self) -> bool {
        self.0 & 1 == 1
    }

    fn neg(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const UNASSIGNED: i8 = 0;

fn lit_value(assign: &[i8], l: Lit) -> i8 {
    let v = assign[l.var()];
    if l.negative() {
        -v
    } else {
        v
    }
}

#[derive(Clone, Copy)]
struct Decision {
    trail_len: usize,
    lit: Lit,
    flipped: bool,
}

pub(crate) struct Solver {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    assign: Vec<i8>,
    trail: Vec<Lit>,
    qhead: usize,
    decisions: Vec<Decision>,
    /// Set when the clause set is trivially unsatisfiable.
    root_conflict: bool,
    units: Vec<Lit>,
}

impl Solver {
    pub fn new(f: &CnfFormula) -> Solver {
        let num_vars = f.num_vars as usize;
        let mut s = Solver {
            num_vars,
            clauses: Vec::with_capacity(f.clauses.len()),
            watches: vec![Vec::new(); 2 * (num_vars + 1)],
            assign: vec![UNASSIGNED; num_vars + 1],
            trail: Vec::with_capacity(num_vars),
            qhead: 0,
            decisions: Vec::new(),
            root_conflict: false,
            units: Vec::new(),
        };
        for c in &f.clauses {
            let mut lits: Vec<Lit> = c.iter().map(|&l| Lit::from_dimacs(l)).collect();
            lits.sort_by_key(|l| l.0);
            lits.dedup();
            if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
                continue; // tautology
            }
            match lits.len() {
                0 => s.root_conflict = true,
                1 => s.units.push(lits[0]),
                _ => {
                    let idx = s.clauses.len();
                    s.watches[lits[0].0 as usize].push(idx);
                    s.watches[lits[1].0 as usize].push(idx);
                    s.clauses.push(lits);
                }
            }
        }
        s
    }

    fn value(&self, l: Lit) -> i8 {
        lit_value(&self.assign, l)
    }

    fn enqueue(&mut self, l: Lit) -> bool {
        match self.value(l) {
            1 => true,
            -1 => false,
            _ => {
                self.assign[l.var()] = if l.negative() { -1 } else { 1 };
                self.trail.push(l);
                true
            }
        }
    }

    /// Returns `false` on conflict.
    fn propagate(&mut self) -> bool {
        let Solver {
            clauses,
            watches,
            assign,
            trail,
            qhead,
            ..
        } = self;
        while *qhead < trail.len() {
            let p = trail[*qhead];
            *qhead += 1;
            let false_lit = p.neg();
            let watching = std::mem::take(&mut watches[false_lit.0 as usize]);
            let mut kept = Vec::with_capacity(watching.len());
            let mut conflict = false;
            for (pos, &ci) in watching.iter().enumerate() {
                let clause = &mut clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if lit_value(assign, first) == 1 {
                    kept.push(ci);
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let cand = clause[k];
                    if lit_value(assign, cand) != -1 {
                        clause.swap(1, k);
                        watches[cand.0 as usize].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                kept.push(ci);
                match lit_value(assign, first) {
                    -1 => {
                        kept.extend_from_slice(&watching[pos + 1..]);
                        conflict = true;
                        break;
                    }
                    0 => {
                        assign[first.var()] = if first.negative() { -1 } else { 1 };
                        trail.push(first);
                    }
                    _ => {}
                }
            }
            watches[false_lit.0 as usize] = kept;
            if conflict {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let l = self.trail.pop().unwrap();
            self.assign[l.var()] = UNASSIGNED;
        }
        self.qhead = len;
    }

    /// Level-0 setup: original units plus assumptions. `false` on conflict.
    fn init(&mut self, assumptions: &[i32]) -> bool {
        if self.root_conflict {
            return false;
        }
        let units = self.units.clone();
        for l in units {
            if !self.enqueue(l) {
                return false;
            }
        }
        for &a in assumptions {
            if a == 0 || a.unsigned_abs() as usize > self.num_vars || !self.enqueue(Lit::from_dimacs(a)) {
                return false;
            }
        }
        self.propagate()
    }

    /// Unit propagation only: per-variable values, or `None` on conflict.
    pub fn propagate_only(mut self, assumptions: &[i32]) -> Option<Vec<Option<bool>>> {
        if !self.init(assumptions) {
            return None;
        }
        Some(
            self.assign
                .iter()
                .map(|&v| match v {
                    1 => Some(true),
                    -1 => Some(false),
                    _ => None,
                })
                .collect(),
        )
    }

    pub fn solve(mut self, assumptions: &[i32]) -> SatResult {
        if !self.init(assumptions) {
            return SatResult::Unsat;
        }
        let mut cursor = 1;
        loop {
            while cursor <= self.num_vars && self.assign[cursor] != UNASSIGNED {
                cursor += 1;
            }
            if cursor > self.num_vars {
                let model = self.assign.iter().map(|&v| v == 1).collect();
                return SatResult::Sat(model);
            }
            let lit = Lit((cursor as u32) << 1);
            self.decisions.push(Decision {
                trail_len: self.trail.len(),
                lit,
                flipped: false,
            });
            self.enqueue(lit);
            while !self.propagate() {
                // Backtrack to the most recent unflipped decision.
                loop {
                    let Some(d) = self.decisions.pop() else {
                        return SatResult::Unsat;
                    };
                    self.undo_to(d.trail_len);
                    if !d.flipped {
                        self.decisions.push(Decision {
                            trail_len: d.trail_len,
                            lit: d.lit.neg(),
                            flipped: true,
                        });
                        self.enqueue(d.lit.neg());
                        cursor = d.lit.var();
                        break;
                    }
                }
            }
        }
    }
}

/// Solves `f` with the built-in DPLL.
pub fn dpll_solve(f: &CnfFormula) -> SatResult {
    Solver::new(f).solve(&[])
}

/// Solves `f` under unit assumptions (DIMACS literals).
pub fn dpll_solve_with(f: &CnfFormula, assumptions: &[i32]) -> SatResult {
    Solver::new(f).solve(assumptions)
}

/// Unit-propagates `f` under `assumptions`. Entry `v` of the result is the
/// forced value of variable `v` (index 0 unused), `None` on conflict.
pub fn unit_propagate(f: &CnfFormula, assumptions: &[i32]) -> Option<Vec<Option<bool>>> {
    Solver::new(f).propagate_only(assumptions)
}
