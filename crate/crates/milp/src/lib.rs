//! Linear model builder and reference mixed-integer solver.
//!
//! The solver is branch-and-bound over bounded-variable simplex relaxations:
//! small models run on an in-crate dense revised simplex, large ones on a
//! sparse simplex backend, and every relaxation feeds the same deterministic
//! search. Models can be exported to (and reloaded from) fixed-format MPS for
//! external cross-checks.

mod backend;
mod branch_bound;
mod dense_simplex;
mod model;
mod mps;

use std::time::Duration;

pub use backend::{solve_lp, DENSE_ROW_LIMIT};
pub use model::{Constraint, MilpModel, Sense, VarId, Variable};
pub use mps::{parse_mps, read_mps, write_mps};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

/// Outcome of an LP relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub values: Vec<f64>,
}

/// Outcome of a mixed-integer solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Node or time limit hit; the best incumbent (if any) is reported.
    GapLimit,
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub nodes: usize,
    pub lp_solves: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub objective: f64,
    pub values: Vec<f64>,
    /// Absolute distance between the incumbent and the best remaining bound.
    pub bound_gap: f64,
    pub stats: SolveStats,
}

impl MilpSolution {
    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.0]
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Constraint feasibility tolerance.
    pub feas_tol: f64,
    /// Integrality tolerance on integer variables.
    pub int_tol: f64,
    /// Absolute optimality gap at which a node is pruned.
    pub gap_tol: f64,
    /// Relative counterpart, useful when objectives are large; the effective
    /// margin is `max(gap_tol, gap_rel * |incumbent|)`.
    pub gap_rel: f64,
    pub node_limit: usize,
    pub time_limit: Option<Duration>,
    /// Nodes bounding at or above this value are pruned even before an
    /// incumbent exists. A solve that finds nothing below the cutoff reports
    /// infeasible; callers comparing alternatives use this to skip proven
    /// losers cheaply.
    pub cutoff: Option<f64>,
    /// Assignment suggestions (typically integer variables): each is fixed,
    /// completed by an LP, and offered as a starting incumbent.
    pub hint: Option<Vec<(VarId, f64)>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-7,
            int_tol: 1e-6,
            gap_tol: 1e-6,
            gap_rel: 0.0,
            node_limit: 2_000_000,
            time_limit: None,
            cutoff: None,
            hint: None,
        }
    }
}

impl SolveOptions {
    pub fn gap_margin(&self, incumbent: f64) -> f64 {
        let rel = if incumbent.is_finite() {
            self.gap_rel * incumbent.abs()
        } else {
            0.0
        };
        self.gap_tol.max(rel)
    }
}

/// Solves a mixed-integer minimization model.
pub fn solve(model: &MilpModel, opts: &SolveOptions) -> Result<MilpSolution, MilpError> {
    branch_bound::solve(model, opts)
}
