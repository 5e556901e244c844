//! The two-phase pipeline end to end, and batch comparison against the
//! heuristics.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gen::{generate_system, GenConfig};
use crate::graph::{AttackSet, InterdependentSystem};
use crate::heuristics::{greedy_select, maxcas_select};
use crate::ilp::{build_ilp, solve_ilp, IlpBackend, SolverStats};
use crate::sat::{compute_lmax, SatBackend};

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub n: usize,
    pub k: usize,
    pub l_max: usize,
    pub sat_calls: usize,
    pub critical_set: AttackSet,
    /// Severity of `critical_set`, re-derived by simulation.
    pub f: usize,
    pub phase1_time: Duration,
    pub phase2_time: Duration,
    pub ilp_variables: usize,
    pub ilp_constraints: usize,
    pub solver_stats: SolverStats,
}

pub fn run_pipeline(
    system: &InterdependentSystem,
    k: usize,
    sat: &dyn SatBackend,
    ilp: &dyn IlpBackend,
) -> Result<PipelineReport> {
    let start = Instant::now();
    let phase1 = compute_lmax(system, k, sat)?;
    let phase1_time = start.elapsed();
    let start = Instant::now();
    let model = build_ilp(system, k, phase1.l_max)?;
    let phase2 = solve_ilp(system, &model, ilp)?;
    let phase2_time = start.elapsed();
    Ok(PipelineReport {
        n: system.node_count(),
        k,
        l_max: phase1.l_max,
        sat_calls: phase1.sat_calls(),
        critical_set: phase2.critical_set,
        f: phase2.optimal_f,
        phase1_time,
        phase2_time,
        ilp_variables: model.vars.len(),
        ilp_constraints: model.constraints.len(),
        solver_stats: phase2.solver_stats,
    })
}

#[derive(Clone, Debug)]
pub struct BenchItem {
    pub name: String,
    pub system: InterdependentSystem,
    pub k: usize,
}

/// `count` generated instances per size, seeded from `seed`, attacked with
/// `k = round(n / 5)` (at least 1).
pub fn generated_suite(sizes: &[usize], count: usize, seed: u64) -> Result<Vec<BenchItem>> {
    let mut items = Vec::new();
    for &n in sizes {
        for idx in 0..count {
            let instance_seed = seed.wrapping_add((n as u64) << 32).wrapping_add(idx as u64);
            let system = generate_system(&GenConfig::new(n, instance_seed))?;
            items.push(BenchItem {
                name: format!("n{n}_s{instance_seed}"),
                system,
                k: default_k(n),
            });
        }
    }
    Ok(items)
}

/// One fifth of the nodes, rounded, and at least one.
pub fn default_k(n: usize) -> usize {
    ((n as f64 / 5.0).round() as usize).max(1)
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub k: usize,
    pub l_max: Option<usize>,
    pub f_exact: Option<usize>,
    pub f_greedy: Option<usize>,
    pub f_maxcas: Option<usize>,
    pub exact_set: Option<String>,
    pub greedy_set: Option<String>,
    pub maxcas_set: Option<String>,
    pub phase1_ms: f64,
    pub phase2_ms: f64,
    pub greedy_ms: f64,
    pub maxcas_ms: f64,
    pub error: Option<String>,
}

impl BenchRow {
    pub fn greedy_ratio(&self) -> Option<f64> {
        ratio(self.f_greedy, self.f_exact)
    }

    pub fn maxcas_ratio(&self) -> Option<f64> {
        ratio(self.f_maxcas, self.f_exact)
    }
}

fn ratio(h: Option<usize>, exact: Option<usize>) -> Option<f64> {
    match (h, exact) {
        (Some(h), Some(e)) if e > 0 => Some(h as f64 / e as f64),
        _ => None,
    }
}

pub const BIN_WIDTH: f64 = 0.25;
pub const BIN_START: f64 = 1.0;

/// Counts of heuristic-to-exact ratios in left-closed bins
/// `[1.0, 1.25)`, `[1.25, 1.5)`, ...
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub start: f64,
    pub bin_edges: Vec<f64>,
    pub greedy: Vec<usize>,
    pub maxcas: Vec<usize>,
}

fn bin_of(r: f64) -> usize {
    // Ratios are quotients of small integers; nudge so that exact bin
    // edges land in the bin they open.
    (((r - BIN_START) / BIN_WIDTH) + 1e-9).floor().max(0.0) as usize
}

impl Histogram {
    pub fn from_rows(rows: &[BenchRow]) -> Self {
        let greedy: Vec<f64> = rows.iter().filter_map(BenchRow::greedy_ratio).collect();
        let maxcas: Vec<f64> = rows.iter().filter_map(BenchRow::maxcas_ratio).collect();
        let bins = greedy
            .iter()
            .chain(&maxcas)
            .map(|&r| bin_of(r) + 1)
            .max()
            .unwrap_or(1);
        let count = |rs: &[f64]| {
            let mut c = vec![0; bins];
            for &r in rs {
                c[bin_of(r)] += 1;
            }
            c
        };
        Histogram {
            bin_width: BIN_WIDTH,
            start: BIN_START,
            bin_edges: (0..=bins).map(|i| BIN_START + BIN_WIDTH * i as f64).collect(),
            greedy: count(&greedy),
            maxcas: count(&maxcas),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub instances: usize,
    pub mean_exact: f64,
    pub var_exact: f64,
    pub mean_greedy: f64,
    pub var_greedy: f64,
    pub mean_maxcas: f64,
    pub var_maxcas: f64,
}

/// Mean and population variance.
fn moments(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64;
    (mean, var)
}

fn summarize(rows: &[BenchRow]) -> Vec<SummaryRow> {
    let mut by_n: BTreeMap<usize, Vec<&BenchRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.error.is_none()) {
        by_n.entry(r.n).or_default().push(r);
    }
    by_n.into_iter()
        .map(|(n, rs)| {
            let col = |get: fn(&BenchRow) -> Option<usize>| -> Vec<f64> {
                rs.iter().filter_map(|r| get(r)).map(|v| v as f64).collect()
            };
            let (mean_exact, var_exact) = moments(&col(|r| r.f_exact));
            let (mean_greedy, var_greedy) = moments(&col(|r| r.f_greedy));
            let (mean_maxcas, var_maxcas) = moments(&col(|r| r.f_maxcas));
            SummaryRow {
                n,
                instances: rs.len(),
                mean_exact,
                var_exact,
                mean_greedy,
                var_greedy,
                mean_maxcas,
                var_maxcas,
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchOutput {
    pub rows: Vec<BenchRow>,
    pub histogram: Histogram,
    pub summary: Vec<SummaryRow>,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn bench_one(item: &BenchItem, sat: &dyn SatBackend, ilp: &dyn IlpBackend) -> BenchRow {
    let mut row = BenchRow {
        instance: item.name.clone(),
        n: item.system.node_count(),
        k: item.k,
        l_max: None,
        f_exact: None,
        f_greedy: None,
        f_maxcas: None,
        exact_set: None,
        greedy_set: None,
        maxcas_set: None,
        phase1_ms: 0.0,
        phase2_ms: 0.0,
        greedy_ms: 0.0,
        maxcas_ms: 0.0,
        error: None,
    };
    let outcome = (|| -> Result<()> {
        let report = run_pipeline(&item.system, item.k, sat, ilp)?;
        row.l_max = Some(report.l_max);
        row.f_exact = Some(report.f);
        row.exact_set = Some(report.critical_set.to_string());
        row.phase1_ms = ms(report.phase1_time);
        row.phase2_ms = ms(report.phase2_time);
        let g = greedy_select(&item.system, item.k)?;
        row.f_greedy = Some(g.f);
        row.greedy_set = Some(g.attack_set.to_string());
        row.greedy_ms = ms(g.duration);
        let m = maxcas_select(&item.system, item.k)?;
        row.f_maxcas = Some(m.f);
        row.maxcas_set = Some(m.attack_set.to_string());
        row.maxcas_ms = ms(m.duration);
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row
}

/// Runs every item; a failing item is recorded in its row and the batch
/// continues. Rows keep input order.
pub fn run_bench(items: &[BenchItem], sat: &dyn SatBackend, ilp: &dyn IlpBackend) -> BenchOutput {
    let rows: Vec<BenchRow> = items.par_iter().map(|item| bench_one(item, sat, ilp)).collect();
    let histogram = Histogram::from_rows(&rows);
    let summary = summarize(&rows);
    BenchOutput {
        rows,
        histogram,
        summary,
    }
}

impl BenchOutput {
    /// Per-instance table. Without timings the output depends only on the
    /// inputs.
    pub fn write_csv<W: Write>(&self, out: W, timings: bool) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            "instance", "n", "k", "l_max", "f_exact", "f_greedy", "f_maxcas", "exact_set", "greedy_set", "maxcas_set",
        ];
        if timings {
            header.extend(["phase1_ms", "phase2_ms", "greedy_ms", "maxcas_ms"]);
        }
        header.push("error");
        w.write_record(&header)?;
        let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            let mut rec = vec![
                r.instance.clone(),
                r.n.to_string(),
                r.k.to_string(),
                opt(r.l_max),
                opt(r.f_exact),
                opt(r.f_greedy),
                opt(r.f_maxcas),
                r.exact_set.clone().unwrap_or_default(),
                r.greedy_set.clone().unwrap_or_default(),
                r.maxcas_set.clone().unwrap_or_default(),
            ];
            if timings {
                rec.extend([r.phase1_ms, r.phase2_ms, r.greedy_ms, r.maxcas_ms].map(|t| format!("{t:.3}")));
            }
            rec.push(r.error.clone().unwrap_or_default());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn csv_string(&self, timings: bool) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, timings)?;
        String::from_utf8(buf).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for s in &self.summary {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn histogram_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.histogram)?)
    }
}
