//! Satisfiability backends and the Phase-1 driver.

mod dpll;
mod phase1;

use std::path::PathBuf;
use std::process::Command;

pub use dpll::{dpll_solve, dpll_solve_with, unit_propagate};
pub use phase1::{compute_lmax, compute_lmax_with, LmaxOptions, Phase1Result, SatCall};

use crate::cnf::{emit_dimacs, parse_solver_output, CnfFormula};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    /// Model indexed by variable number; index 0 unused.
    Sat(Vec<bool>),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

pub trait SatBackend: Sync {
    fn solve(&self, f: &CnfFormula) -> Result<SatResult>;

    fn name(&self) -> String;
}

/// The in-crate DPLL solver.
#[derive(Clone, Copy, Debug, Default)]
pub struct BuiltinSat;

impl SatBackend for BuiltinSat {
    fn solve(&self, f: &CnfFormula) -> Result<SatResult> {
        Ok(dpll_solve(f))
    }

    fn name(&self) -> String {
        "builtin".into()
    }
}

/// Any executable that takes a DIMACS file path as its last argument and
/// prints SAT-competition output (`s SATISFIABLE` / `s UNSATISFIABLE`,
/// `v` model lines) on stdout.
#[derive(Clone, Debug)]
pub struct DimacsExec {
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl DimacsExec {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        DimacsExec {
            program: program.into(),
            args: Vec::new(),
        }
    }
}

impl SatBackend for DimacsExec {
    fn solve(&self, f: &CnfFormula) -> Result<SatResult> {
        let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
        std::io::Write::write_all(&mut file, emit_dimacs(f).as_bytes())?;
        let output = Command::new(&self.program)
            .args(&self.args)
            .arg(file.path())
            .output()
            .map_err(|e| Error::Backend(format!("cannot run {}: {e}", self.program.display())))?;
        let stdout = String::from_utf8_lossy(&output.stdout);
        parse_solver_output(&stdout, f.num_vars).map_err(|e| match e {
            Error::Backend(msg) => Error::Backend(format!(
                "{msg} (exit status {}, stderr: {})",
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )),
            other => other,
        })
    }

    fn name(&self) -> String {
        format!("dimacs-exec:{}", self.program.display())
    }
}

/// Parses `builtin` or `dimacs-exec:<path>`.
pub fn backend_from_spec(spec: &str) -> Result<Box<dyn SatBackend>> {
    if spec == "builtin" {
        return Ok(Box::new(BuiltinSat));
    }
    if let Some(path) = spec.strip_prefix("dimacs-exec:") {
        if path.is_empty() {
            return Err(crate::error::invalid("dimacs-exec needs a program path"));
        }
        return Ok(Box::new(DimacsExec::new(path)));
    }
    Err(crate::error::invalid(format!("unknown SAT backend `{spec}`")))
}
