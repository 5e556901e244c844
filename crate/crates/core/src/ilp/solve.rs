//! Phase-2 solving: the built-in exact backend, the external LP-solver
//! bridge, and solution decoding.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::lp::{emit_lp, parse_name_value_solution, ParsedSolution};
use super::model::{Cmp, IlpModel, ProblemInfo, VarId};
use crate::cascade::severity;
use crate::error::{invalid, Error, Result};
use crate::graph::{AttackSet, InterdependentSystem};
use crate::oracle::attack_sets;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    /// Attack assignments examined by the built-in backend.
    pub assignments: u64,
    /// Search nodes, including the root of each assignment.
    pub nodes: u64,
    pub duration: Duration,
}

/// Raw solver output: one value per model variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpSolution {
    pub values: Vec<i64>,
    pub objective: i64,
    pub stats: SolverStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Phase2Result {
    pub critical_set: AttackSet,
    /// Largest failure-induced component of `critical_set`, by simulation.
    pub optimal_f: usize,
    /// Value of the model's bound variable.
    pub bound: i64,
    pub solver_stats: SolverStats,
}

pub trait IlpBackend: Sync {
    fn solve(&self, model: &IlpModel) -> Result<IlpSolution>;

    fn name(&self) -> String;
}

fn info(model: &IlpModel) -> Result<&ProblemInfo> {
    model
        .info
        .as_ref()
        .ok_or_else(|| invalid("model carries no critical-node problem information"))
}

/// `sum(coef * var) >= rhs`
#[derive(Clone, Debug)]
struct Row {
    terms: Vec<(VarId, i64)>,
    rhs: i64,
}

/// Bounds propagation over the model's rows.
struct Propagator {
    rows: Vec<Row>,
    occurs: Vec<Vec<usize>>,
}

type Domains = Vec<(i64, i64)>;

/// Best objective with its full assignment.
type Found = Option<(i64, Vec<i64>)>;

impl Propagator {
    fn new(model: &IlpModel) -> Self {
        let mut rows = Vec::new();
        for c in &model.constraints {
            let neg = |terms: &[(VarId, i64)]| terms.iter().map(|&(v, a)| (v, -a)).collect();
            match c.cmp {
                Cmp::Ge => rows.push(Row {
                    terms: c.terms.clone(),
                    rhs: c.rhs,
                }),
                Cmp::Le => rows.push(Row {
                    terms: neg(&c.terms),
                    rhs: -c.rhs,
                }),
                Cmp::Eq => {
                    rows.push(Row {
                        terms: c.terms.clone(),
                        rhs: c.rhs,
                    });
                    rows.push(Row {
                        terms: neg(&c.terms),
                        rhs: -c.rhs,
                    });
                }
            }
        }
        let mut occurs = vec![Vec::new(); model.vars.len()];
        for (r, row) in rows.iter().enumerate() {
            for &(v, _) in &row.terms {
                occurs[v].push(r);
            }
        }
        Propagator { rows, occurs }
    }

    /// Tightens `dom` to a fixpoint starting from `queue`. `false` when a
    /// row cannot be satisfied.
    fn propagate(&self, dom: &mut Domains, mut queue: Vec<usize>) -> bool {
        let mut queued = vec![false; self.rows.len()];
        for &r in &queue {
            queued[r] = true;
        }
        while let Some(r) = queue.pop() {
            queued[r] = false;
            let row = &self.rows[r];
            let max_act: i64 = row
                .terms
                .iter()
                .map(|&(v, a)| if a > 0 { a * dom[v].1 } else { a * dom[v].0 })
                .sum();
            if max_act < row.rhs {
                return false;
            }
            let slack = max_act - row.rhs;
            for &(v, a) in &row.terms {
                let (lo, hi) = dom[v];
                if lo == hi {
                    continue;
                }
                let changed = if a > 0 && a * (hi - lo) > slack {
                    dom[v].0 = hi - slack / a;
                    true
                } else if a < 0 && -a * (hi - lo) > slack {
                    dom[v].1 = lo + slack / -a;
                    true
                } else {
                    false
                };
                if changed {
                    for &o in &self.occurs[v] {
                        if !queued[o] {
                            queued[o] = true;
                            queue.push(o);
                        }
                    }
                }
            }
        }
        true
    }

    fn all_rows(&self) -> Vec<usize> {
        (0..self.rows.len()).collect()
    }
}

/// Exhaustive search over attack assignments. For each `k`-subset the
/// attack indicators are fixed and the remaining variables are settled by
/// bounds propagation, branching on any binary that propagation leaves
/// open; the smallest objective wins, ties going to the lexicographically
/// smallest attack set.
#[derive(Clone, Copy, Debug, Default)]
pub struct BuiltinIlp;

struct Search<'a> {
    model: &'a IlpModel,
    prop: Propagator,
    objective: VarId,
}

impl Search<'_> {
    fn new(model: &IlpModel) -> Result<Search<'_>> {
        let objective = model.objective.ok_or_else(|| invalid("model has no objective"))?;
        Ok(Search {
            model,
            prop: Propagator::new(model),
            objective,
        })
    }

    fn root_domains(&self) -> Domains {
        self.model.vars.iter().map(|v| v.kind.range()).collect()
    }

    /// Best `(objective, values)` below `dom`; counts visited nodes.
    fn dfs(&self, mut dom: Domains, queue: Vec<usize>, nodes: &mut u64) -> Option<(i64, Vec<i64>)> {
        *nodes += 1;
        if !self.prop.propagate(&mut dom, queue) {
            return None;
        }
        let open = (0..dom.len()).find(|&v| v != self.objective && dom[v].0 < dom[v].1);
        match open {
            Some(v) => {
                let mut best: Option<(i64, Vec<i64>)> = None;
                let (lo, hi) = dom[v];
                for value in lo..=hi {
                    let mut child = dom.clone();
                    child[v] = (value, value);
                    if let Some(found) = self.dfs(child, self.prop.occurs[v].clone(), nodes) {
                        if best.as_ref().is_none_or(|b| found.0 < b.0) {
                            best = Some(found);
                        }
                    }
                }
                best
            }
            None => {
                let (lo, hi) = dom[self.objective];
                let mut values: Vec<i64> = dom.iter().map(|d| d.0).collect();
                for obj in lo..=hi {
                    values[self.objective] = obj;
                    if self.model.constraints.iter().all(|c| c.is_satisfied(&values)) {
                        return Some((obj, values));
                    }
                }
                None
            }
        }
    }

    fn with_attack(&self, base: &Domains, info: &ProblemInfo, attack: &AttackSet, nodes: &mut u64) -> Option<(i64, Vec<i64>)> {
        let mut dom = base.clone();
        let mut queue = Vec::new();
        for (idx, &z) in info.z_vars.iter().enumerate() {
            let value = attack.contains(idx + 1) as i64;
            if value < dom[z].0 || value > dom[z].1 {
                return None;
            }
            dom[z] = (value, value);
            queue.extend_from_slice(&self.prop.occurs[z]);
        }
        self.dfs(dom, queue, nodes)
    }
}

/// Minimal objective of `model` with the attack indicators fixed to
/// `attack`, with the full variable assignment. `None` if infeasible.
pub fn min_bound_with_attack(model: &IlpModel, attack: &AttackSet) -> Result<Option<(i64, Vec<i64>)>> {
    let info = info(model)?;
    let search = Search::new(model)?;
    let mut base = search.root_domains();
    if !search.prop.propagate(&mut base, search.prop.all_rows()) {
        return Ok(None);
    }
    let mut nodes = 0;
    Ok(search.with_attack(&base, info, attack, &mut nodes))
}

impl IlpBackend for BuiltinIlp {
    fn solve(&self, model: &IlpModel) -> Result<IlpSolution> {
        let start = Instant::now();
        let info = info(model)?;
        let search = Search::new(model)?;
        let mut base = search.root_domains();
        if !search.prop.propagate(&mut base, search.prop.all_rows()) {
            return Err(Error::Encoding("model is infeasible at the root".into()));
        }
        let sets: Vec<AttackSet> = attack_sets(info.n, info.k).collect();
        let outcomes: Vec<(Found, u64)> = sets
            .par_iter()
            .map(|set| {
                let mut nodes = 0;
                let best = search.with_attack(&base, info, set, &mut nodes);
                (best, nodes)
            })
            .collect();

        let mut stats = SolverStats {
            assignments: sets.len() as u64,
            ..Default::default()
        };
        let mut best: Option<(i64, Vec<i64>)> = None;
        for (outcome, nodes) in outcomes {
            stats.nodes += nodes;
            if let Some(found) = outcome {
                if best.as_ref().is_none_or(|b| found.0 < b.0) {
                    best = Some(found);
                }
            }
        }
        stats.duration = start.elapsed();
        let (objective, values) =
            best.ok_or_else(|| Error::Encoding("no attack assignment is feasible".into()))?;
        Ok(IlpSolution {
            values,
            objective,
            stats,
        })
    }

    fn name(&self) -> String {
        "builtin".into()
    }
}

/// Solution-file reader used by [`LpExec`].
pub type SolutionAdapter = fn(&str) -> Result<ParsedSolution>;

/// External solver invoked as `program [args] <model.lp> <solution.txt>`.
/// The program must write the solution file; by default it is read in the
/// `name value` format of [`parse_name_value_solution`].
#[derive(Clone, Debug)]
pub struct LpExec {
    pub program: PathBuf,
    pub args: Vec<String>,
    pub adapter: SolutionAdapter,
}

impl LpExec {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        LpExec {
            program: program.into(),
            args: Vec::new(),
            adapter: parse_name_value_solution,
        }
    }
}

impl IlpBackend for LpExec {
    fn solve(&self, model: &IlpModel) -> Result<IlpSolution> {
        let start = Instant::now();
        let dir = tempfile::tempdir()?;
        let lp_path = dir.path().join("model.lp");
        let sol_path = dir.path().join("solution.txt");
        std::fs::write(&lp_path, emit_lp(model))?;
        let output = Command::new(&self.program)
            .args(&self.args)
            .arg(&lp_path)
            .arg(&sol_path)
            .output()
            .map_err(|e| Error::Backend(format!("cannot run {}: {e}", self.program.display())))?;
        if !output.status.success() {
            return Err(Error::Backend(format!(
                "{} exited with {}: {}",
                self.program.display(),
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        let text = std::fs::read_to_string(&sol_path)
            .map_err(|e| Error::Backend(format!("no solution file written: {e}")))?;
        let parsed = (self.adapter)(&text)?;
        let mut values = vec![0i64; model.vars.len()];
        for (name, v) in &parsed.values {
            let id = model
                .var_by_name(name)
                .ok_or_else(|| Error::Backend(format!("solution names unknown variable `{name}`")))?;
            values[id] = v.round() as i64;
        }
        let objective = match (parsed.objective, model.objective) {
            (Some(o), _) => o.round() as i64,
            (None, Some(obj)) => values[obj],
            (None, None) => 0,
        };
        Ok(IlpSolution {
            values,
            objective,
            stats: SolverStats {
                duration: start.elapsed(),
                ..Default::default()
            },
        })
    }

    fn name(&self) -> String {
        format!("lp-exec:{}", self.program.display())
    }
}

/// Parses `builtin` or `lp-exec:<path>`.
pub fn ilp_backend_from_spec(spec: &str) -> Result<Box<dyn IlpBackend>> {
    if spec == "builtin" {
        return Ok(Box::new(BuiltinIlp));
    }
    if let Some(path) = spec.strip_prefix("lp-exec:") {
        if path.is_empty() {
            return Err(invalid("lp-exec needs a program path"));
        }
        return Ok(Box::new(LpExec::new(path)));
    }
    Err(invalid(format!("unknown ILP backend `{spec}`")))
}

/// Checks `values` against every bound and constraint, reads the attack
/// off the indicators and re-derives its severity by simulation.
pub fn decode_solution(system: &InterdependentSystem, model: &IlpModel, values: &[i64]) -> Result<Phase2Result> {
    let info = info(model)?;
    if values.len() != model.vars.len() {
        return Err(invalid(format!(
            "{} values for {} variables",
            values.len(),
            model.vars.len()
        )));
    }
    for (decl, &v) in model.vars.iter().zip(values) {
        let (lo, hi) = decl.kind.range();
        if v < lo || v > hi {
            return Err(Error::ConstraintViolated {
                name: format!("bounds({})", decl.name),
                detail: format!("value {v} outside [{lo}, {hi}]"),
            });
        }
    }
    if let Some(c) = model.constraints.iter().find(|c| !c.is_satisfied(values)) {
        return Err(Error::ConstraintViolated {
            name: c.name.clone(),
            detail: format!("activity {} {} {} fails", c.activity(values), c.cmp, c.rhs),
        });
    }
    let nodes = info
        .z_vars
        .iter()
        .enumerate()
        .filter(|&(_, &z)| values[z] == 1)
        .map(|(idx, _)| idx + 1);
    let critical_set = AttackSet::new(info.n, nodes)?;
    let f = severity(system, &critical_set)?;
    let bound = values[info.bound];
    if f as i64 > bound {
        return Err(Error::Encoding(format!(
            "attack {critical_set} leaves a component of size {f} above the bound {bound}"
        )));
    }
    Ok(Phase2Result {
        critical_set,
        optimal_f: f,
        bound,
        solver_stats: SolverStats::default(),
    })
}

/// Solves the model and verifies the decoded optimum by simulation.
pub fn solve_ilp(system: &InterdependentSystem, model: &IlpModel, backend: &dyn IlpBackend) -> Result<Phase2Result> {
    let sol = backend.solve(model)?;
    let mut result = decode_solution(system, model, &sol.values)?;
    if result.optimal_f as i64 != result.bound {
        return Err(Error::Encoding(format!(
            "optimal bound {} differs from simulated severity {} of {}",
            result.bound, result.optimal_f, result.critical_set
        )));
    }
    result.solver_stats = sol.stats;
    Ok(result)
}
