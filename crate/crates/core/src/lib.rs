//! Day-ahead Public Safety Power Shutoff planning under decision-dependent
//! wildfire outage uncertainty.
//!
//! The pipeline: a [`grid::Network`] and its enumerated
//! [`outage::OutageScenarioSet`] feed the [`formulation`] builders, which
//! assemble unit-commitment, dispatch, risk-budget, distribution-shaping and
//! distributionally-robust blocks into `psps_milp` models. The [`planners`]
//! drive full solves (risk-neutral, robust by pattern enumeration or a
//! single-shot MILP, wait-and-see, Pareto sweeps) and [`oos`] evaluates a
//! fixed plan out of sample by Monte Carlo.

pub mod formulation;
pub mod grid;
pub mod oos;
pub mod outage;
pub mod planners;
