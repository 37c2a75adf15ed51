//! Line-survival scenario space: enumeration, baseline and decision-dependent
//! probabilities, distribution-shaping ratios, per-line wildfire risk, and the
//! binary total-variation distance.
//!
//! Conventions: `xi = true` means the line stays in service through the day,
//! `false` means a wildfire-driven outage. A shut-off decision `z = true`
//! keeps the line energized; `false` de-energizes it. With perfect shut-offs
//! the de-energized ignition probability is 1, so a de-energized line is out
//! of service deterministically but cannot start a fire.

use thiserror::Error;

use crate::grid::{Line, LineId, Network};

#[derive(Debug, Error, PartialEq)]
pub enum OutageError {
    #[error("scenario space would need {0} lines, cap is {1}")]
    CapExceeded(usize, usize),
    #[error("vector length {got} does not match the {want} non-zero-risk lines")]
    LengthMismatch { got: usize, want: usize },
    #[error("line {0} has degenerate baseline probability {1}; exclude it from the NZR set")]
    DegenerateRatio(LineId, f64),
}

/// One survival scenario over the non-zero-risk lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutageScenario {
    pub id: usize,
    /// Survival indicator per NZR line (aligned with `OutageScenarioSet::nzr_lines`).
    pub xi: Vec<bool>,
}

/// All `2^L` survival scenarios with their baseline probabilities.
#[derive(Debug, Clone)]
pub struct OutageScenarioSet {
    pub nzr_lines: Vec<LineId>,
    pub scenarios: Vec<OutageScenario>,
    /// Baseline probability per scenario (all lines energized).
    pub pi0: Vec<f64>,
    /// Per-line baseline ignition probabilities, aligned with `nzr_lines`.
    pub line_wip0: Vec<f64>,
    /// Per-line de-energized ignition probabilities.
    pub line_wip1: Vec<f64>,
}

impl OutageScenarioSet {
    pub fn len(&self) -> usize {
        self.scenarios.len()
    }
    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }
    pub fn n_lines(&self) -> usize {
        self.nzr_lines.len()
    }
}

/// Risk aggregation mode for the budget constraint and the Pareto sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskMode {
    /// Ignition probability times SVI-weighted acres.
    Svi,
    /// Ignition probability times acres, ignoring the SVI weight.
    Acres,
    /// Ignition probability alone.
    Unweighted,
}

/// Per-line worst-case risk values plus the operator tolerance.
#[derive(Debug, Clone)]
pub struct RiskProfile {
    /// Risk for every line in network order (not just NZR lines).
    pub line_risk: Vec<f64>,
    pub risk_tolerance: f64,
    pub mode: RiskMode,
}

impl RiskProfile {
    pub fn new(net: &Network, mode: RiskMode, risk_tolerance: f64) -> Self {
        let line_risk = net
            .lines()
            .iter()
            .map(|l| line_risk(net, l, mode))
            .collect();
        RiskProfile {
            line_risk,
            risk_tolerance,
            mode,
        }
    }

    pub fn risk_of(&self, line: LineId) -> f64 {
        self.line_risk[(line - 1) as usize]
    }
}

/// Worst-case wildfire risk of keeping a line energized.
pub fn line_risk(net: &Network, line: &Line, mode: RiskMode) -> f64 {
    let wip = net.scaled_expected_wip(line);
    match mode {
        RiskMode::Svi => wip * line.svi * line.impact,
        RiskMode::Acres => wip * line.impact,
        RiskMode::Unweighted => wip,
    }
}

/// Lines eligible for shut-off decisions: positive SVI-weighted risk, ranked
/// by risk descending (ties to the lower id), capped at `cap`, and returned
/// in ascending id order. The ascending order fixes both the scenario bit
/// layout and the distribution-shaping level order.
pub fn select_nzr_lines(net: &Network, mode: RiskMode, cap: usize) -> Vec<LineId> {
    let mut risky: Vec<(LineId, f64)> = net
        .lines()
        .iter()
        .filter_map(|l| {
            let r = line_risk(net, l, mode);
            let p = net.scaled_expected_wip(l);
            (r > 0.0 && p > 0.0 && p < 1.0).then_some((l.id, r))
        })
        .collect();
    risky.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    risky.truncate(cap);
    let mut ids: Vec<LineId> = risky.into_iter().map(|(id, _)| id).collect();
    ids.sort_unstable();
    ids
}

/// Enumerates all `2^L` survival vectors over the given lines, with baseline
/// probabilities from the independence product. Scenario ids interpret the
/// survival vector as a big-endian binary number over the line ordering.
pub fn enumerate_scenarios(
    nzr_lines: &[LineId],
    wip0: &[f64],
    wip1: &[f64],
    cap: usize,
) -> Result<OutageScenarioSet, OutageError> {
    let l = nzr_lines.len();
    if l > cap {
        return Err(OutageError::CapExceeded(l, cap));
    }
    if wip0.len() != l || wip1.len() != l {
        return Err(OutageError::LengthMismatch {
            got: wip0.len().min(wip1.len()),
            want: l,
        });
    }
    let count = 1usize << l;
    let mut scenarios = Vec::with_capacity(count);
    let mut pi0 = Vec::with_capacity(count);
    for id in 0..count {
        let xi: Vec<bool> = (0..l).map(|k| (id >> (l - 1 - k)) & 1 == 1).collect();
        let p = xi
            .iter()
            .zip(wip0)
            .map(|(&survives, &w)| if survives { 1.0 - w } else { w })
            .product();
        scenarios.push(OutageScenario { id, xi });
        pi0.push(p);
    }
    Ok(OutageScenarioSet {
        nzr_lines: nzr_lines.to_vec(),
        scenarios,
        pi0,
        line_wip0: wip0.to_vec(),
        line_wip1: wip1.to_vec(),
    })
}

/// Builds the scenario set for a network from its expected WIP values.
pub fn build_scenarios(
    net: &Network,
    mode: RiskMode,
    cap: usize,
) -> Result<OutageScenarioSet, OutageError> {
    let nzr = select_nzr_lines(net, mode, cap);
    let wip0: Vec<f64> = nzr
        .iter()
        .map(|&id| net.scaled_expected_wip(net.line(id)))
        .collect();
    let wip1: Vec<f64> = nzr
        .iter()
        .map(|&id| net.wip_deenergized(net.line(id)))
        .collect();
    enumerate_scenarios(&nzr, &wip0, &wip1, cap)
}

/// Probability of a survival scenario given the shut-off vector: each line
/// contributes the ignition (or survival) probability selected by its own
/// energization state, and lines are mutually independent.
pub fn decision_probability(
    z_minus: &[bool],
    xi: &[bool],
    wip0: &[f64],
    wip1: &[f64],
) -> Result<f64, OutageError> {
    let l = z_minus.len();
    if xi.len() != l || wip0.len() != l || wip1.len() != l {
        return Err(OutageError::LengthMismatch {
            got: xi.len(),
            want: l,
        });
    }
    let mut p = 1.0;
    for k in 0..l {
        let ignite = if z_minus[k] { wip0[k] } else { wip1[k] };
        p *= if xi[k] { 1.0 - ignite } else { ignite };
    }
    Ok(p)
}

/// Bayes-rule ratios used by the distribution-shaping constraints.
#[derive(Debug, Clone)]
pub struct ShapingCoefficients {
    /// `wip1 / wip0` per line: scale applied to damaged-line scenarios when
    /// the line is de-energized.
    pub up: Vec<f64>,
    /// `(1 - wip1) / (1 - wip0)` per line: scale applied to surviving-line
    /// scenarios; exactly 0 under perfect shut-offs.
    pub down: Vec<f64>,
}

pub fn shaping_coefficients(
    nzr_lines: &[LineId],
    wip0: &[f64],
    wip1: &[f64],
) -> Result<ShapingCoefficients, OutageError> {
    let mut up = Vec::with_capacity(wip0.len());
    let mut down = Vec::with_capacity(wip0.len());
    for (k, (&p0, &p1)) in wip0.iter().zip(wip1).enumerate() {
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(OutageError::DegenerateRatio(nzr_lines[k], p0));
        }
        up.push(p1 / p0);
        down.push((1.0 - p1) / (1.0 - p0));
    }
    Ok(ShapingCoefficients { up, down })
}

/// Binary total variation distance between two survival scenarios:
/// 0 when identical, 1 otherwise.
pub fn tv_distance(a: &OutageScenario, b: &OutageScenario) -> Result<u8, OutageError> {
    if a.xi.len() != b.xi.len() {
        return Err(OutageError::LengthMismatch {
            got: b.xi.len(),
            want: a.xi.len(),
        });
    }
    Ok(u8::from(a.xi != b.xi))
}

/// Fire indicator per line: a fire can start only where a line was kept
/// energized and then failed.
pub fn fire_instances(z_minus: &[bool], xi: &[bool]) -> Result<Vec<bool>, OutageError> {
    if z_minus.len() != xi.len() {
        return Err(OutageError::LengthMismatch {
            got: xi.len(),
            want: z_minus.len(),
        });
    }
    Ok(z_minus
        .iter()
        .zip(xi)
        .map(|(&z, &survives)| z && !survives)
        .collect())
}
