//! Exact critical node detection for two-layer interdependent networks
//! under stage-by-stage cascading failures.
//!
//! The exact pipeline has two phases. Phase 1 finds the last stage at
//! which any `k`-node attack can still break a link, by a sequence of
//! satisfiability queries. Phase 2 builds a 0-1 integer model of the
//! cascade up to that stage and minimizes the largest surviving connected
//! component. A brute-force oracle, the cascade simulator and two greedy
//! baselines sit alongside for validation and comparison.

pub mod bench;
pub mod cascade;
pub mod cnf;
pub mod error;
pub mod gen;
pub mod graph;
pub mod heuristics;
pub mod ilp;
pub mod oracle;
pub mod sat;

pub use cascade::{severity, simulate, CascadeTrace};
pub use error::{Error, Result};
pub use graph::{AttackSet, Edge, InterdependentSystem, UndirectedGraph};
pub use oracle::{oracle_solve, OracleResult};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
