//! Exhaustive ground truth over all `C(n,k)` attack sets.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::cascade::simulate;
use crate::error::{invalid, Error, Result};
use crate::graph::{AttackSet, InterdependentSystem};

pub const DEFAULT_BUDGET: u128 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub optimal_f: usize,
    /// Every attack set achieving `optimal_f`, in lexicographic order.
    pub optimal_attack_sets: Vec<AttackSet>,
    pub l_max: usize,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(invalid(format!("k = {k} must satisfy 1 <= k < n = {n}")));
    }
    Ok(())
}

/// All `k`-subsets of `1..=n` in lexicographic order.
pub fn attack_sets(n: usize, k: usize) -> impl Iterator<Item = AttackSet> {
    (1..=n)
        .combinations(k)
        .map(move |c| AttackSet::new(n, c).expect("combinations are valid"))
}

#[derive(Clone, Debug)]
struct Partial {
    best_f: usize,
    best: Vec<AttackSet>,
    l_max: usize,
}

impl Partial {
    fn single(set: AttackSet, f: usize, stage: usize) -> Self {
        Partial {
            best_f: f,
            best: vec![set],
            l_max: stage,
        }
    }

    /// Associative merge; `self` precedes `other` in enumeration order.
    fn merge(mut self, other: Partial) -> Partial {
        self.l_max = self.l_max.max(other.l_max);
        match self.best_f.cmp(&other.best_f) {
            std::cmp::Ordering::Less => self,
            std::cmp::Ordering::Greater => Partial {
                l_max: self.l_max,
                ..other
            },
            std::cmp::Ordering::Equal => {
                self.best.extend(other.best);
                self
            }
        }
    }
}

pub fn oracle_solve(system: &InterdependentSystem, k: usize) -> Result<OracleResult> {
    oracle_solve_with_budget(system, k, DEFAULT_BUDGET)
}

pub fn oracle_solve_with_budget(system: &InterdependentSystem, k: usize, budget: u128) -> Result<OracleResult> {
    let n = system.node_count();
    check_k(n, k)?;
    let subsets = binomial(n, k);
    if subsets > budget {
        return Err(Error::BudgetExceeded {
            n,
            k,
            subsets,
            limit: budget,
        });
    }
    let sets: Vec<AttackSet> = attack_sets(n, k).collect();
    let partial = sets
        .into_par_iter()
        .map(|set| {
            let t = simulate(system, &set)?;
            Ok(Partial::single(set, t.largest_component_size, t.last_failure_stage))
        })
        .try_fold(|| None, |acc: Option<Partial>, p: Result<Partial>| -> Result<Option<Partial>> {
            let p = p?;
            Ok(Some(match acc {
                None => p,
                Some(a) => a.merge(p),
            }))
        })
        .try_reduce(|| None, |a, b| {
            Ok(match (a, b) {
                (None, x) | (x, None) => x,
                (Some(a), Some(b)) => Some(a.merge(b)),
            })
        })?
        .expect("at least one subset since 1 <= k < n");
    Ok(OracleResult {
        optimal_f: partial.best_f,
        optimal_attack_sets: partial.best,
        l_max: partial.l_max,
    })
}

/// Single-threaded reference used to check the parallel reduction.
pub fn oracle_solve_serial(system: &InterdependentSystem, k: usize) -> Result<OracleResult> {
    let n = system.node_count();
    check_k(n, k)?;
    let mut acc: Option<Partial> = None;
    for set in attack_sets(n, k) {
        let t = simulate(system, &set)?;
        let p = Partial::single(set, t.largest_component_size, t.last_failure_stage);
        acc = Some(match acc {
            None => p,
            Some(a) => a.merge(p),
        });
    }
    let p = acc.expect("non-empty enumeration");
    Ok(OracleResult {
        optimal_f: p.best_f,
        optimal_attack_sets: p.best,
        l_max: p.l_max,
    })
}
