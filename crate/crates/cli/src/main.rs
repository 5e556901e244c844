use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use critnode::bench::{generated_suite, run_bench, run_pipeline, BenchItem};
use critnode::cnf::{build_m, emit_dimacs, emit_var_map_json};
use critnode::gen::{generate_system, GenConfig};
use critnode::heuristics::{greedy_select, maxcas_select};
use critnode::ilp::{build_ilp, emit_lp, ilp_backend_from_spec, solve_ilp, IlpBackend};
use critnode::oracle::{oracle_solve_with_budget, DEFAULT_BUDGET};
use critnode::sat::{backend_from_spec, compute_lmax, SatBackend};
use critnode::{simulate, AttackSet, Error, InterdependentSystem};

#[derive(Parser)]
#[command(name = "critnode", version, about = "Critical nodes of interdependent networks under cascading failures")]
struct Cli {
    /// Seed for instance generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// `builtin` or `dimacs-exec:<path>`.
    #[arg(long, global = true, default_value = "builtin")]
    backend_sat: String,
    /// `builtin` or `lp-exec:<path>`.
    #[arg(long, global = true, default_value = "builtin")]
    backend_ilp: String,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Instance {
    /// Instance JSON file.
    instance: PathBuf,
    /// Number of attack nodes.
    #[arg(long)]
    k: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Greedy,
    Maxcas,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3.0)]
        beta_a: f64,
        #[arg(long, default_value_t = 2.2)]
        beta_b: f64,
        #[arg(long, default_value_t = 100)]
        max_retries: usize,
    },
    /// Simulate the cascade of one attack.
    Simulate {
        instance: PathBuf,
        /// Comma-separated attack nodes, e.g. `1,3`.
        #[arg(long, value_delimiter = ',', required = true)]
        attack: Vec<usize>,
    },
    /// Exhaustive search over all attack sets.
    Oracle {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Phase 1: the maximum failure stage.
    Lmax {
        #[command(flatten)]
        inst: Instance,
    },
    /// Phase 2: the critical node set.
    Critical {
        #[command(flatten)]
        inst: Instance,
        /// Stage horizon; computed by phase 1 when absent.
        #[arg(long)]
        l_max: Option<usize>,
    },
    /// Greedy or modified Max-Cas selection.
    Heuristic {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, value_enum)]
        algo: Algo,
    },
    /// Both phases with verification.
    Pipeline {
        #[command(flatten)]
        inst: Instance,
    },
    /// Compare the exact pipeline with both heuristics.
    Bench {
        /// Node counts of generated instances.
        #[arg(long, value_delimiter = ',', default_value = "10")]
        sizes: Vec<usize>,
        /// Generated instances per size.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Instance files to add to the batch.
        #[arg(long)]
        instance: Vec<PathBuf>,
        /// Attack size for instance files; one fifth of n when absent.
        #[arg(long)]
        k: Option<usize>,
        /// Ratio histogram JSON.
        #[arg(long)]
        histogram: Option<PathBuf>,
        /// Per-size mean and variance CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Include timing columns.
        #[arg(long)]
        timings: bool,
    },
    /// Write the phase-1 formula for one stage as DIMACS.
    ExportCnf {
        #[command(flatten)]
        inst: Instance,
        #[arg(long)]
        l: usize,
        /// Variable map JSON sidecar.
        #[arg(long)]
        var_map: Option<PathBuf>,
    },
    /// Write the phase-2 model as a CPLEX LP file.
    ExportLp {
        #[command(flatten)]
        inst: Instance,
        #[arg(long)]
        l_max: Option<usize>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => 2,
        Error::BudgetExceeded { .. } => 4,
        Error::Backend(_) | Error::Encoding(_) | Error::ConstraintViolated { .. } | Error::RetryCapExceeded { .. } => 3,
    }
}

fn emit(out: Option<&Path>, text: &str) -> critnode::Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json(out: Option<&Path>, value: &impl serde::Serialize) -> critnode::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, &text)
}

fn load(inst: &Instance) -> critnode::Result<InterdependentSystem> {
    InterdependentSystem::load(&inst.instance)
}

fn l_max_for(
    system: &InterdependentSystem,
    k: usize,
    given: Option<usize>,
    sat: &dyn SatBackend,
) -> critnode::Result<usize> {
    match given {
        Some(l) => Ok(l),
        None => Ok(compute_lmax(system, k, sat)?.l_max),
    }
}

fn run(cli: Cli) -> critnode::Result<()> {
    let out = cli.out.as_deref();
    let sat = backend_from_spec(&cli.backend_sat)?;
    let ilp: Box<dyn IlpBackend> = ilp_backend_from_spec(&cli.backend_ilp)?;
    match cli.command {
        Command::Gen {
            n,
            beta_a,
            beta_b,
            max_retries,
        } => {
            let cfg = GenConfig {
                n,
                beta_a,
                beta_b,
                seed: cli.seed,
                max_retries,
                ..GenConfig::default()
            };
            let system = generate_system(&cfg)?;
            emit(out, &format!("{}\n", system.to_json()))
        }
        Command::Simulate { instance, attack } => {
            let system = InterdependentSystem::load(instance)?;
            let attack = AttackSet::new(system.node_count(), attack)?;
            emit_json(out, &simulate(&system, &attack)?)
        }
        Command::Oracle { inst, budget } => {
            let system = load(&inst)?;
            emit_json(out, &oracle_solve_with_budget(&system, inst.k, budget)?)
        }
        Command::Lmax { inst } => {
            let system = load(&inst)?;
            emit_json(out, &compute_lmax(&system, inst.k, sat.as_ref())?)
        }
        Command::Critical { inst, l_max } => {
            let system = load(&inst)?;
            let l = l_max_for(&system, inst.k, l_max, sat.as_ref())?;
            let model = build_ilp(&system, inst.k, l)?;
            let result = solve_ilp(&system, &model, ilp.as_ref())?;
            emit_json(out, &json!({ "l_max": l, "result": result }))
        }
        Command::Heuristic { inst, algo } => {
            let system = load(&inst)?;
            let result = match algo {
                Algo::Greedy => greedy_select(&system, inst.k)?,
                Algo::Maxcas => maxcas_select(&system, inst.k)?,
            };
            emit_json(out, &result)
        }
        Command::Pipeline { inst } => {
            let system = load(&inst)?;
            emit_json(out, &run_pipeline(&system, inst.k, sat.as_ref(), ilp.as_ref())?)
        }
        Command::Bench {
            sizes,
            count,
            instance,
            k,
            histogram,
            summary,
            timings,
        } => {
            let mut items = if count > 0 { generated_suite(&sizes, count, cli.seed)? } else { Vec::new() };
            for path in instance {
                let system = InterdependentSystem::load(&path)?;
                let k = k.unwrap_or_else(|| critnode::bench::default_k(system.node_count()));
                items.push(BenchItem {
                    name: path.display().to_string(),
                    system,
                    k,
                });
            }
            let result = run_bench(&items, sat.as_ref(), ilp.as_ref());
            emit(out, &result.csv_string(timings)?)?;
            if let Some(p) = histogram {
                fs::write(p, result.histogram_json()? + "\n")?;
            }
            if let Some(p) = summary {
                result.write_summary_csv(fs::File::create(p)?)?;
            }
            Ok(())
        }
        Command::ExportCnf { inst, l, var_map } => {
            let system = load(&inst)?;
            let f = build_m(&system, inst.k, l)?;
            if let Some(p) = var_map {
                fs::write(p, emit_var_map_json(&f) + "\n")?;
            }
            emit(out, &emit_dimacs(&f))
        }
        Command::ExportLp { inst, l_max } => {
            let system = load(&inst)?;
            let l = l_max_for(&system, inst.k, l_max, sat.as_ref())?;
            emit(out, &emit_lp(&build_ilp(&system, inst.k, l)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
