//! Exactly-`k` constraints.
//!
//! `k = 1` uses the pairwise at-most-one clauses plus one at-least-one
//! clause. Otherwise a sequential unary counter is built where
//! `r(i, j) <-> r(i-1, j) | (x_i & r(i-1, j-1))` means "at least `j` of the
//! first `i` inputs are true", defined in both directions so that the
//! inputs determine every counter bit by unit propagation.

use super::CnfBuilder;
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Bit {
    Const(bool),
    Lit(i32),
}

/// Adds clauses satisfied exactly when `k` of `lits` are true.
pub fn encode_cardinality(b: &mut CnfBuilder, lits: &[i32], k: usize) -> Result<()> {
    let m = lits.len();
    if k == 0 || k > m {
        return Err(invalid(format!("cardinality bound {k} outside 1..={m}")));
    }
    if k == m {
        for &l in lits {
            b.add_clause(vec![l]);
        }
        return Ok(());
    }
    if k == 1 {
        for (idx, &p) in lits.iter().enumerate() {
            for &q in &lits[idx + 1..] {
                b.add_clause(vec![-p, -q]);
            }
        }
        b.add_clause(lits.to_vec());
        return Ok(());
    }

    // row[j] = r(i, j) for j in 0..=k+1
    let mut row: Vec<Bit> = (0..=k + 1).map(|j| Bit::Const(j == 0)).collect();
    for &x in lits {
        let mut next = row.clone();
        for j in 1..=k + 1 {
            next[j] = step(b, row[j], x, row[j - 1]);
        }
        row = next;
    }
    force(b, row[k], true);
    force(b, row[k + 1], false);
    Ok(())
}

/// `prev | (x & carry)`, allocating an auxiliary only when needed.
fn step(b: &mut CnfBuilder, prev: Bit, x: i32, carry: Bit) -> Bit {
    match (prev, carry) {
        (Bit::Const(true), _) => Bit::Const(true),
        (Bit::Const(false), Bit::Const(false)) => Bit::Const(false),
        (Bit::Const(false), Bit::Const(true)) => Bit::Lit(x),
        (Bit::Const(false), Bit::Lit(c)) => {
            let a = b.fresh_aux();
            b.iff_and(a, x, c);
            Bit::Lit(a)
        }
        (Bit::Lit(p), Bit::Const(false)) => Bit::Lit(p),
        (Bit::Lit(p), Bit::Const(true)) => {
            let a = b.fresh_aux();
            b.iff_or(a, p, x);
            Bit::Lit(a)
        }
        (Bit::Lit(p), Bit::Lit(c)) => {
            let a = b.fresh_aux();
            b.iff_or_and(a, p, x, c);
            Bit::Lit(a)
        }
    }
}

fn force(b: &mut CnfBuilder, bit: Bit, value: bool) {
    match bit {
        Bit::Const(c) if c == value => {}
        Bit::Const(_) => b.add_clause(Vec::new()),
        Bit::Lit(l) => b.add_clause(vec![if value { l } else { -l }]),
    }
}
