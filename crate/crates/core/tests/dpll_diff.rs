use critnode::cnf::CnfFormula;
use critnode::sat::{dpll_solve, dpll_solve_with, SatResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reference solver: splitting with clause-set simplification, forced on
/// unit clauses. Shares nothing with the library's solver.
fn naive_sat(clauses: &[Vec<i32>]) -> bool {
    if clauses.is_empty() {
        return true;
    }
    if clauses.iter().any(|c| c.is_empty()) {
        return false;
    }
    let unit = clauses.iter().find(|c| c.len() == 1).map(|c| c[0]);
    let pick = unit.unwrap_or(clauses[0][0]);
    let branches: &[i32] = if unit.is_some() { &[pick] } else { &[pick, -pick] };
    branches.iter().any(|&lit| {
        let reduced: Vec<Vec<i32>> = clauses
            .iter()
            .filter(|c| !c.contains(&lit))
            .map(|c| c.iter().copied().filter(|&l| l != -lit).collect())
            .collect();
        naive_sat(&reduced)
    })
}

fn satisfies(clauses: &[Vec<i32>], model: &[bool]) -> bool {
    clauses
        .iter()
        .all(|c| c.iter().any(|&l| model[l.unsigned_abs() as usize] == (l > 0)))
}

fn random_3cnf(rng: &mut ChaCha8Rng, vars: i32, clauses: usize) -> Vec<Vec<i32>> {
    (0..clauses)
        .map(|_| {
            let mut c: Vec<i32> = Vec::new();
            while c.len() < 3 {
                let v = rng.gen_range(1..=vars);
                if !c.iter().any(|l| l.abs() == v) {
                    c.push(if rng.gen_bool(0.5) { v } else { -v });
                }
            }
            c
        })
        .collect()
}

#[test]
fn agrees_with_reference_on_random_3cnf() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..500 {
        // Around the phase transition, so both outcomes occur.
        let m = rng.gen_range(110..=150);
        let clauses = random_3cnf(&mut rng, 30, m);
        let f = CnfFormula::from_clauses(30, clauses.clone());
        let expected = naive_sat(&clauses);
        match dpll_solve(&f) {
            SatResult::Sat(model) => {
                assert!(expected, "library says SAT, reference says UNSAT: {clauses:?}");
                assert!(satisfies(&clauses, &model));
                sat += 1;
            }
            SatResult::Unsat => {
                assert!(!expected, "library says UNSAT, reference says SAT: {clauses:?}");
                unsat += 1;
            }
        }
    }
    assert!(sat > 50 && unsat > 50, "unbalanced sample: {sat} sat, {unsat} unsat");
}

#[test]
fn assumptions_match_added_units() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let clauses = random_3cnf(&mut rng, 15, 50);
        let assumptions: Vec<i32> = (1..=4).map(|v| if rng.gen_bool(0.5) { v } else { -v }).collect();
        let mut with_units = clauses.clone();
        with_units.extend(assumptions.iter().map(|&a| vec![a]));
        let f = CnfFormula::from_clauses(15, clauses);
        let verdict = dpll_solve_with(&f, &assumptions);
        assert_eq!(verdict.is_sat(), naive_sat(&with_units));
        if let SatResult::Sat(model) = verdict {
            assert!(satisfies(&with_units, &model));
        }
    }
}

#[test]
fn edge_cases() {
    assert!(dpll_solve(&CnfFormula::from_clauses(0, vec![])).is_sat());
    assert!(!dpll_solve(&CnfFormula::from_clauses(1, vec![vec![]])).is_sat());
    assert!(!dpll_solve(&CnfFormula::from_clauses(1, vec![vec![1], vec![-1]])).is_sat());
    assert!(dpll_solve(&CnfFormula::from_clauses(2, vec![vec![1, -1], vec![2]])).is_sat());
}
