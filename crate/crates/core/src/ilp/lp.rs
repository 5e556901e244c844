//! CPLEX LP text output and the `name value` solution format.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::model::{IlpModel, VarKind};
use crate::error::{Error, Result};

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, model: &IlpModel, terms: &[(usize, i64)]) {
    for (idx, &(v, c)) in terms.iter().enumerate() {
        if idx > 0 && idx % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let name = &model.vars[v].name;
        let sign = if c < 0 { "-" } else { "+" };
        let mag = c.unsigned_abs();
        if idx == 0 && c >= 0 {
            // leading plus is implicit
        } else {
            write!(out, " {sign}").unwrap();
        }
        if mag == 1 {
            write!(out, " {name}").unwrap();
        } else {
            write!(out, " {mag} {name}").unwrap();
        }
    }
    if terms.is_empty() {
        out.push_str(" 0");
    }
}

/// Renders the model in CPLEX LP format.
pub fn emit_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    if let Some(info) = &model.info {
        writeln!(out, "\\ critical nodes: n = {}, k = {}, l_max = {}", info.n, info.k, info.l_max).unwrap();
    }
    out.push_str("Minimize\n obj:");
    match model.objective {
        Some(v) => write!(out, " {}", model.vars[v].name).unwrap(),
        None => out.push_str(" 0"),
    }
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        write!(out, " {}:", c.name).unwrap();
        write_terms(&mut out, model, &c.terms);
        writeln!(out, " {} {}", c.cmp, c.rhs).unwrap();
    }
    let general: Vec<_> = model
        .vars
        .iter()
        .filter_map(|v| match v.kind {
            VarKind::Integer { lo, hi } => Some((v, lo, hi)),
            VarKind::Binary => None,
        })
        .collect();
    if !general.is_empty() {
        out.push_str("Bounds\n");
        for (v, lo, hi) in &general {
            writeln!(out, " {lo} <= {} <= {hi}", v.name).unwrap();
        }
    }
    let binaries: Vec<_> = model.vars.iter().filter(|v| v.kind == VarKind::Binary).collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for v in binaries {
            writeln!(out, " {}", v.name).unwrap();
        }
    }
    if !general.is_empty() {
        out.push_str("General\n");
        for (v, _, _) in &general {
            writeln!(out, " {}", v.name).unwrap();
        }
    }
    out.push_str("End\n");
    out
}

/// Values read back from an external solver.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedSolution {
    pub objective: Option<f64>,
    pub values: HashMap<String, f64>,
}

/// Reads the simple solution format: one `name value` pair per line, an
/// optional `objective <value>` line, `#` comments, and `status <word>`
/// where anything other than `optimal` is an error.
pub fn parse_name_value_solution(text: &str) -> Result<ParsedSolution> {
    let mut objective = None;
    let mut values = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Backend(format!("solution line {}: expected `name value`", lineno + 1)));
        };
        if name == "status" {
            if !value.eq_ignore_ascii_case("optimal") {
                return Err(Error::Backend(format!("external solver status `{value}`")));
            }
            continue;
        }
        let v: f64 = value
            .parse()
            .map_err(|_| Error::Backend(format!("solution line {}: bad value `{value}`", lineno + 1)))?;
        if name == "objective" {
            objective = Some(v);
        } else {
            values.insert(name.to_string(), v);
        }
    }
    Ok(ParsedSolution { objective, values })
}
