//! Maximum failure-propagation stage over all `k`-node attacks.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::{SatBackend, SatResult};
use crate::cnf::{build_m, CnfFormula, SemanticVar};
use crate::error::{Error, Result};
use crate::graph::{AttackSet, InterdependentSystem};

#[derive(Clone, Debug, Serialize)]
pub struct SatCall {
    pub stage: usize,
    pub satisfiable: bool,
    pub duration: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct Phase1Result {
    pub l_max: usize,
    /// Attack decoded from each satisfiable `M_l`, keyed by `l`.
    pub witness_attacks: BTreeMap<usize, AttackSet>,
    pub calls: Vec<SatCall>,
}

impl Phase1Result {
    pub fn sat_calls(&self) -> usize {
        self.calls.len()
    }

    pub fn per_call_times(&self) -> Vec<Duration> {
        self.calls.iter().map(|c| c.duration).collect()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LmaxOptions {
    /// Largest stage that may still be satisfiable. Defaults to the total
    /// link count plus one, which no terminating cascade can exceed.
    pub max_stage: Option<usize>,
}

pub fn compute_lmax(system: &InterdependentSystem, k: usize, backend: &dyn SatBackend) -> Result<Phase1Result> {
    compute_lmax_with(system, k, backend, LmaxOptions::default())
}

fn decode_attack(f: &CnfFormula, model: &[bool], n: usize) -> Result<AttackSet> {
    let nodes = (1..=n).filter(|&i| f.value(model, SemanticVar::z(i)).unwrap_or(false));
    AttackSet::new(n, nodes).map_err(|e| Error::Encoding(format!("model decodes to no attack set: {e}")))
}

pub fn compute_lmax_with(
    system: &InterdependentSystem,
    k: usize,
    backend: &dyn SatBackend,
    opts: LmaxOptions,
) -> Result<Phase1Result> {
    let n = system.node_count();
    crate::oracle::check_k(n, k)?;
    let cap = opts.max_stage.unwrap_or(system.total_edges() + 1);

    let mut result = Phase1Result {
        l_max: 1,
        witness_attacks: BTreeMap::new(),
        calls: Vec::new(),
    };
    let check = |l: usize, result: &mut Phase1Result| -> Result<bool> {
        let f = build_m(system, k, l)?;
        let start = Instant::now();
        let verdict = backend.solve(&f)?;
        let duration = start.elapsed();
        let sat = verdict.is_sat();
        if let SatResult::Sat(model) = verdict {
            if model.len() <= f.num_vars as usize {
                return Err(Error::Backend(format!(
                    "model covers {} variables, formula has {}",
                    model.len().saturating_sub(1),
                    f.num_vars
                )));
            }
            result.witness_attacks.insert(l, decode_attack(&f, &model, n)?);
        }
        result.calls.push(SatCall {
            stage: l,
            satisfiable: sat,
            duration,
        });
        Ok(sat)
    };

    let m2 = check(2, &mut result)?;
    let m3 = check(3, &mut result)?;
    match (m2, m3) {
        (false, false) => {
            result.l_max = 1;
            return Ok(result);
        }
        (true, false) => {
            result.l_max = 2;
            return Ok(result);
        }
        _ => {}
    }
    let mut l = 4;
    loop {
        if l > cap + 1 {
            return Err(Error::Encoding(format!(
                "M_{} satisfiable beyond the stage cap {cap}",
                l - 1
            )));
        }
        if !check(l, &mut result)? {
            result.l_max = l - 1;
            return Ok(result);
        }
        l += 1;
    }
}
