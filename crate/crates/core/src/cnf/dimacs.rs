//! DIMACS CNF text and SAT-competition solver output.

use std::fmt::Write as _;

use super::CnfFormula;
use crate::sat::SatResult;
use crate::error::{invalid, Result};

/// Renders `f` as DIMACS. Variable-map comments come first, one per
/// variable, then the `p cnf` header and the clauses.
pub fn emit_dimacs(f: &CnfFormula) -> String {
    let mut out = String::new();
    for (num, var) in f.var_map.iter() {
        writeln!(out, "c {num} {var}").unwrap();
    }
    writeln!(out, "p cnf {} {}", f.num_vars, f.clauses.len()).unwrap();
    for c in &f.clauses {
        for l in c {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// Variable map sidecar: `{"1": "z_1", "2": "x_1_2_s1_k0", ...}` in
/// numeric key order.
pub fn emit_var_map_json(f: &CnfFormula) -> String {
    let mut out = String::from("{");
    for (idx, (num, var)) in f.var_map.iter().enumerate() {
        if idx > 0 {
            out.push_str(", ");
        }
        let key = serde_json::to_string(&num.to_string()).unwrap();
        let val = serde_json::to_string(&var.to_string()).unwrap();
        write!(out, "{key}: {val}").unwrap();
    }
    out.push('}');
    out
}

/// Plain clause list read from DIMACS text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimacsCnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

impl From<DimacsCnf> for CnfFormula {
    fn from(d: DimacsCnf) -> Self {
        CnfFormula::from_clauses(d.num_vars, d.clauses)
    }
}

pub fn parse_dimacs(text: &str) -> Result<DimacsCnf> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            match parts.as_slice() {
                ["cnf", v, c] => {
                    let v = v.parse().map_err(|_| invalid(format!("line {}: bad variable count", lineno + 1)))?;
                    let c = c.parse().map_err(|_| invalid(format!("line {}: bad clause count", lineno + 1)))?;
                    header = Some((v, c));
                }
                _ => return Err(invalid(format!("line {}: malformed header", lineno + 1))),
            }
            continue;
        }
        if header.is_none() {
            return Err(invalid(format!("line {}: clause before header", lineno + 1)));
        }
        for tok in line.split_whitespace() {
            let lit: i32 = tok
                .parse()
                .map_err(|_| invalid(format!("line {}: bad literal `{tok}`", lineno + 1)))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    let (num_vars, num_clauses) = header.ok_or_else(|| invalid("missing `p cnf` header"))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != num_clauses {
        return Err(invalid(format!(
            "header announces {num_clauses} clauses, found {}",
            clauses.len()
        )));
    }
    if let Some(l) = clauses.iter().flatten().find(|l| l.unsigned_abs() > num_vars) {
        return Err(invalid(format!("literal {l} exceeds declared variable count {num_vars}")));
    }
    Ok(DimacsCnf { num_vars, clauses })
}

/// Reads a solver's standard output. Variables absent from the `v` lines
/// are false.
pub fn parse_solver_output(text: &str, num_vars: u32) -> Result<SatResult> {
    let mut status: Option<bool> = None;
    let mut model = vec![false; num_vars as usize + 1];
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = match rest.trim() {
                "SATISFIABLE" => Some(true),
                "UNSATISFIABLE" => Some(false),
                other => return Err(crate::Error::Backend(format!("solver reported `{other}`"))),
            };
        } else if let Some(rest) = line.strip_prefix("v ") {
            for tok in rest.split_whitespace() {
                let lit: i64 = tok
                    .parse()
                    .map_err(|_| crate::Error::Backend(format!("bad model literal `{tok}`")))?;
                let var = lit.unsigned_abs() as usize;
                if var > num_vars as usize {
                    return Err(crate::Error::Backend(format!("model literal {lit} out of range")));
                }
                if lit > 0 {
                    model[var] = true;
                }
            }
        }
    }
    match status {
        Some(true) => Ok(SatResult::Sat(model)),
        Some(false) => Ok(SatResult::Unsat),
        None => Err(crate::Error::Backend("no `s` status line in solver output".into())),
    }
}
