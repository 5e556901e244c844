//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use critnode::bench::{generated_suite, run_bench, run_pipeline};
use critnode::cnf::{build_m, build_up_to, emit_dimacs, SemanticVar};
use critnode::gen::{generate_system, GenConfig};
use critnode::ilp::{build_ilp, emit_lp, min_bound_with_attack, solve_ilp, BuiltinIlp};
use critnode::oracle::attack_sets;
use critnode::sat::{compute_lmax, dpll_solve, unit_propagate, BuiltinSat, SatResult};
use critnode::{oracle_solve, severity, AttackSet, InterdependentSystem, UndirectedGraph};

const THREE_NODE_LIMIT: Duration = Duration::from_secs(1);
const ORACLE_SUITE_SIZE: usize = 100;
const ORACLE_SUITE_SEED: u64 = 2024;
const ORACLE_SUITE_LIMIT: Duration = Duration::from_secs(600);
const FAITHFULNESS_MAX_N: usize = 7;
const FAITHFULNESS_PER_N: usize = 3;
const FAITHFULNESS_SEED: u64 = 4;
const BENCH_N: usize = 10;
const BENCH_COUNT: usize = 10;
const BENCH_SEED: u64 = 7;
const HORIZON_MAX_N: usize = 9;
const HORIZON_EXTRA: usize = 2;
const PERF_INSTANCES: u64 = 3;
const PERF_LIMIT: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn three_node() -> InterdependentSystem {
    InterdependentSystem::from_edges(3, [(1, 3), (2, 3)], [(1, 2), (1, 3), (2, 3)]).unwrap()
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let sys = three_node();
    let m2 = build_m(&sys, 1, 2).map_err(err)?;
    match dpll_solve(&m2) {
        SatResult::Sat(model) => ensure!(
            m2.value(&model, SemanticVar::z(3)) == Some(true),
            "M_2 model does not attack node 3"
        ),
        SatResult::Unsat => return Err("M_2 is UNSAT".into()),
    }
    ensure!(!dpll_solve(&build_m(&sys, 1, 3).map_err(err)?).is_sat(), "M_3 is SAT");
    let p1 = compute_lmax(&sys, 1, &BuiltinSat).map_err(err)?;
    ensure!(p1.l_max == 2, "l_max = {}", p1.l_max);
    let p2 = solve_ilp(&sys, &build_ilp(&sys, 1, 2).map_err(err)?, &BuiltinIlp).map_err(err)?;
    ensure!(
        p2.critical_set.to_vec() == vec![3] && p2.optimal_f == 1,
        "phase 2 gave {} with f = {}",
        p2.critical_set,
        p2.optimal_f
    );
    let t = start.elapsed();
    ensure!(t < THREE_NODE_LIMIT, "took {t:?}");
    Ok(format!("l_max = 2, critical set {{3}}, f = 1 in {t:.2?}"))
}

struct SuiteRun {
    phase1: Outcome,
    phase2: Outcome,
}

fn oracle_equivalence() -> SuiteRun {
    let start = Instant::now();
    let suite = common::oracle_suite(ORACLE_SUITE_SIZE, ORACLE_SUITE_SEED);
    let (mut l_ok, mut f_ok) = (0, 0);
    let mut l_fail = None;
    let mut f_fail = None;
    for (idx, (sys, k)) in suite.iter().enumerate() {
        let oracle = match oracle_solve(sys, *k) {
            Ok(o) => o,
            Err(e) => {
                let msg = format!("instance {idx}: oracle failed: {e}");
                l_fail.get_or_insert(msg.clone());
                f_fail.get_or_insert(msg);
                continue;
            }
        };
        match compute_lmax(sys, *k, &BuiltinSat) {
            Ok(p1) if p1.l_max == oracle.l_max => l_ok += 1,
            Ok(p1) => {
                l_fail.get_or_insert(format!("instance {idx}: l_max {} vs oracle {}", p1.l_max, oracle.l_max));
            }
            Err(e) => {
                l_fail.get_or_insert(format!("instance {idx}: {e}"));
            }
        }
        let phase2 = build_ilp(sys, *k, oracle.l_max).and_then(|m| solve_ilp(sys, &m, &BuiltinIlp));
        match phase2 {
            Ok(r) => {
                let simulated = severity(sys, &r.critical_set).unwrap_or(usize::MAX);
                if r.optimal_f == oracle.optimal_f && simulated == oracle.optimal_f {
                    f_ok += 1;
                } else {
                    f_fail.get_or_insert(format!(
                        "instance {idx}: f {} (simulated {simulated}) vs oracle {}",
                        r.optimal_f, oracle.optimal_f
                    ));
                }
            }
            Err(e) => {
                f_fail.get_or_insert(format!("instance {idx}: {e}"));
            }
        }
    }
    let t = start.elapsed();
    let n = suite.len();
    let phase1 = match l_fail {
        Some(m) => Err(format!("{l_ok}/{n} match; first mismatch {m}")),
        None if t >= ORACLE_SUITE_LIMIT => Err(format!("{n}/{n} match but took {t:?}")),
        None => Ok(format!("{n}/{n} l_max values match the oracle, suite time {t:.1?}")),
    };
    let phase2 = match f_fail {
        Some(m) => Err(format!("{f_ok}/{n} match; first mismatch {m}")),
        None => Ok(format!("{n}/{n} optima and decoded severities match the oracle")),
    };
    SuiteRun { phase1, phase2 }
}

fn encoding_faithfulness() -> Outcome {
    let suite = common::small_suite(FAITHFULNESS_MAX_N, FAITHFULNESS_PER_N, FAITHFULNESS_SEED);
    let mut fixings = 0;
    for sys in &suite {
        let n = sys.node_count();
        for k in 1..n {
            let l_max = oracle_solve(sys, k).map_err(err)?.l_max;
            let last = l_max + 2;
            let cnf = build_up_to(sys, k, last).map_err(err)?.to_cnf();
            let model = build_ilp(sys, k, l_max).map_err(err)?;
            for attack in attack_sets(n, k) {
                let assumptions: Vec<i32> = (1..=n)
                    .map(|i| {
                        let v = cnf.var_map.get(SemanticVar::z(i)).unwrap() as i32;
                        if attack.contains(i) { v } else { -v }
                    })
                    .collect();
                let assign = unit_propagate(&cnf, &assumptions)
                    .ok_or_else(|| format!("(a) conflict under {attack} on {}", sys.to_json()))?;
                for (var, want) in common::expected_values(sys, &attack, last) {
                    let got = cnf.var_map.get(var).and_then(|num| assign[num as usize]);
                    ensure!(
                        got == Some(want),
                        "(a) {var} = {got:?}, cascade says {want}, attack {attack} on {}",
                        sys.to_json()
                    );
                }
                let f = severity(sys, &attack).map_err(err)? as i64;
                let bound = min_bound_with_attack(&model, &attack).map_err(err)?.map(|(b, _)| b);
                ensure!(
                    bound == Some(f),
                    "(b) bound {bound:?} vs f = {f}, attack {attack} on {}",
                    sys.to_json()
                );
                fixings += 1;
            }
        }
    }
    Ok(format!("{} instances, {fixings} attack fixings, (a) and (b) exact", suite.len()))
}

fn pipeline(sys: &InterdependentSystem, k: usize) -> Result<(usize, Vec<usize>), String> {
    let r = run_pipeline(sys, k, &BuiltinSat, &BuiltinIlp).map_err(err)?;
    Ok((r.f, r.critical_set.to_vec()))
}

fn star_construction() -> Outcome {
    for m in 3..=6 {
        let n = m + 1;
        let sys = InterdependentSystem::new(UndirectedGraph::star(n, 1).map_err(err)?, UndirectedGraph::complete(n))
            .map_err(err)?;
        let (f, set) = pipeline(&sys, 1)?;
        ensure!(f == 1 && set == vec![1], "star K_1,{m}: f = {f}, set {set:?}");
    }
    let tri = InterdependentSystem::new(UndirectedGraph::complete(3), UndirectedGraph::complete(3)).map_err(err)?;
    let (f, _) = pipeline(&tri, 1)?;
    ensure!(f >= 2, "triangle: f = {f}");
    Ok(format!("stars m = 3..6 give f = 1 at the centre; triangle gives f = {f}"))
}

fn complete_family() -> Outcome {
    let mut cases = 0;
    for n in 4..=8 {
        let sys = InterdependentSystem::new(UndirectedGraph::complete(n), UndirectedGraph::complete(n)).map_err(err)?;
        for k in 1..n {
            let r = run_pipeline(&sys, k, &BuiltinSat, &BuiltinIlp).map_err(err)?;
            ensure!(r.l_max == 1, "K_{n}, k = {k}: l_max = {}", r.l_max);
            ensure!(r.f == n - k, "K_{n}, k = {k}: f = {}", r.f);
            cases += 1;
        }
    }
    Ok(format!("{cases} (n, k) cases with l_max = 1 and f = n - k"))
}

fn heuristic_dominance() -> Outcome {
    let items = generated_suite(&[BENCH_N], BENCH_COUNT, BENCH_SEED).map_err(err)?;
    let out = run_bench(&items, &BuiltinSat, &BuiltinIlp);
    for r in &out.rows {
        ensure!(r.error.is_none(), "{}: {}", r.instance, r.error.as_deref().unwrap_or(""));
        let (e, g, m) = (r.f_exact.unwrap(), r.f_greedy.unwrap(), r.f_maxcas.unwrap());
        ensure!(g >= e && m >= e, "{}: exact {e}, greedy {g}, maxcas {m}", r.instance);
    }
    let json: serde_json::Value = serde_json::from_str(&out.histogram_json().map_err(err)?).map_err(err)?;
    ensure!(json["bin_width"] == 0.25 && json["start"] == 1.0, "histogram header {json}");
    let h = &out.histogram;
    ensure!(h.greedy[0] > 0 && h.maxcas[0] > 0, "leftmost bins greedy {} maxcas {}", h.greedy[0], h.maxcas[0]);
    Ok(format!(
        "{} instances dominated; leftmost bin greedy {}, maxcas {}",
        out.rows.len(),
        h.greedy[0],
        h.maxcas[0]
    ))
}

fn sorted(mut v: Vec<Vec<i32>>) -> Vec<Vec<i32>> {
    v.iter_mut().for_each(|c| c.sort());
    v.sort();
    v
}

fn determinism_and_round_trips() -> Outcome {
    let mut checked = 0;
    for seed in 0..5u64 {
        let cfg = GenConfig::new(8, seed);
        let (a, b) = (generate_system(&cfg).map_err(err)?, generate_system(&cfg).map_err(err)?);
        ensure!(a.to_json() == b.to_json(), "seed {seed}: instance JSON differs");
        let k = 2;
        for l in 2..=3 {
            let fa = build_m(&a, k, l).map_err(err)?;
            let text = emit_dimacs(&fa);
            ensure!(text == emit_dimacs(&build_m(&b, k, l).map_err(err)?), "seed {seed}: DIMACS differs");
            let (vars, clauses) = common::read_dimacs(&text);
            ensure!(
                vars == fa.num_vars as usize && sorted(clauses) == sorted(fa.clauses.clone()),
                "seed {seed}: DIMACS clause multiset differs"
            );
        }
        let ma = build_ilp(&a, k, 3).map_err(err)?;
        let lp = emit_lp(&ma);
        ensure!(lp == emit_lp(&build_ilp(&b, k, 3).map_err(err)?), "seed {seed}: LP differs");
        let (mut rows, _, _, _) = common::read_lp(&lp);
        let mut expected = common::model_rows(&ma);
        rows.sort();
        expected.sort();
        ensure!(rows == expected, "seed {seed}: LP constraint multiset differs");
        checked += 1;
    }
    Ok(format!("{checked} seeds byte-identical; DIMACS and LP re-parse to the same multisets"))
}

fn horizon_robustness() -> Outcome {
    let suite: Vec<_> = common::oracle_suite(ORACLE_SUITE_SIZE, ORACLE_SUITE_SEED)
        .into_iter()
        .filter(|(s, _)| s.node_count() <= HORIZON_MAX_N)
        .collect();
    for (idx, (sys, k)) in suite.iter().enumerate() {
        let l = compute_lmax(sys, *k, &BuiltinSat).map_err(err)?.l_max;
        let base = solve_ilp(sys, &build_ilp(sys, *k, l).map_err(err)?, &BuiltinIlp).map_err(err)?;
        let wide = solve_ilp(sys, &build_ilp(sys, *k, l + HORIZON_EXTRA).map_err(err)?, &BuiltinIlp).map_err(err)?;
        ensure!(
            base.optimal_f == wide.optimal_f,
            "instance {idx}: f {} at l_max, {} at l_max + {HORIZON_EXTRA}",
            base.optimal_f,
            wide.optimal_f
        );
    }
    Ok(format!("{} instances with n <= {HORIZON_MAX_N} keep their optimum", suite.len()))
}

fn performance() -> Outcome {
    let mut worst = Duration::ZERO;
    for seed in 0..PERF_INSTANCES {
        let sys = generate_system(&GenConfig::new(10, 500 + seed)).map_err(err)?;
        let start = Instant::now();
        let r = run_pipeline(&sys, 2, &BuiltinSat, &BuiltinIlp).map_err(err)?;
        let t = start.elapsed();
        ensure!(t < PERF_LIMIT, "seed {seed}: {t:?}");
        let check = AttackSet::new(10, r.critical_set.iter()).map_err(err)?;
        ensure!(severity(&sys, &check).map_err(err)? == r.f, "seed {seed}: report not verified");
        worst = worst.max(t);
    }
    Ok(format!("{PERF_INSTANCES} instances with n = 10, k = 2; slowest {worst:.2?}"))
}

fn main() -> ExitCode {
    let suite = oracle_equivalence();
    let results: Vec<(&str, Outcome)> = vec![
        ("worked example", worked_example()),
        ("oracle equivalence, phase 1", suite.phase1),
        ("oracle equivalence, phase 2", suite.phase2),
        ("encoding faithfulness", encoding_faithfulness()),
        ("star construction", star_construction()),
        ("complete-layer closed form", complete_family()),
        ("heuristic dominance", heuristic_dominance()),
        ("determinism and round trips", determinism_and_round_trips()),
        ("stage-horizon robustness", horizon_robustness()),
        ("performance envelope", performance()),
    ];
    let mut failed = 0;
    for (idx, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", idx + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", idx + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
