//! Phase 2: the 0-1 integer model of the cascade, its LP-file form, and
//! exact solving.

mod lp;
mod model;
mod solve;

pub use lp::{emit_lp, parse_name_value_solution, ParsedSolution};
pub use model::{build_ilp, Cmp, Horizon, IlpModel, LinearConstraint, ProblemInfo, VarDecl, VarId, VarKind};
pub use solve::{
    decode_solution, ilp_backend_from_spec, min_bound_with_attack, solve_ilp, BuiltinIlp, IlpBackend,
    IlpSolution, LpExec, Phase2Result, SolutionAdapter, SolverStats,
};
