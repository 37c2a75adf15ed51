//! Distributionally robust objective encodings over the binary total
//! variation ball of radius kappa.
//!
//! The dual block is the linear form used when scenario probabilities are
//! constants (pattern enumeration): minimize `kappa tau + sum_s pi_s v_s`
//! with `v_s >= Phi_s` and `v_s + tau >= max_m Phi_m`, the latter through a
//! shared epigraph variable.
//!
//! The single-shot MILP block keeps the shut-off decisions inside the model:
//! shaping variables carry the decision-dependent probabilities, a binary
//! `beta_j` marks the value-at-risk scenario, McCormick rows linearize
//! `w_sj = pi_{L,s} beta_j`, and pattern-selector binaries make the residual
//! continuous product exact through big-M epigraph rows with per-pattern
//! probability constants.

use psps_milp::{Sense, VarId};

use crate::outage::{OutageScenario, OutageScenarioSet};

use super::{ModelBuilder, ZMinus};

#[derive(Debug, Clone)]
pub struct DroDualVars {
    pub tau: VarId,
    pub v: Vec<VarId>,
    pub max_phi: VarId,
}

/// Linear dual block for constant scenario probabilities. Contributes
/// `kappa * tau + sum_s probs[s] * v[s]` to the objective.
pub fn add_dro_dual_block(
    builder: &mut ModelBuilder,
    probs: &[f64],
    phi: &[VarId],
    kappa: f64,
    cost_ub: f64,
) -> DroDualVars {
    assert_eq!(probs.len(), phi.len());
    let tau = builder
        .model
        .add_continuous("dro_tau", 0.0, cost_ub, kappa);
    let max_phi = builder.model.add_continuous("dro_max", 0.0, cost_ub, 0.0);
    let mut v = Vec::with_capacity(phi.len());
    for (s, (&phi_s, &p)) in phi.iter().zip(probs).enumerate() {
        let v_s = builder
            .model
            .add_continuous(format!("dro_v_s{s}"), 0.0, cost_ub, p);
        builder.model.add_constraint(
            format!("dro_vphi_s{s}"),
            vec![(v_s, 1.0), (phi_s, -1.0)],
            Sense::Ge,
            0.0,
        );
        builder.model.add_constraint(
            format!("dro_vtau_s{s}"),
            vec![(v_s, 1.0), (tau, 1.0), (max_phi, -1.0)],
            Sense::Ge,
            0.0,
        );
        builder.model.add_constraint(
            format!("dro_max_s{s}"),
            vec![(max_phi, 1.0), (phi_s, -1.0)],
            Sense::Ge,
            0.0,
        );
        v.push(v_s);
    }
    DroDualVars { tau, v, max_phi }
}

#[derive(Debug, Clone)]
pub struct DroMilpVars {
    pub beta: Vec<VarId>,
    pub w: Vec<Vec<VarId>>,
    pub pattern_select: Vec<VarId>,
    pub tau: VarId,
    pub max_phi: VarId,
    /// Epigraph of the probability-weighted worst-case term.
    pub inner_cost: VarId,
}

/// One shut-off pattern admissible under the first-stage constraints,
/// together with its closed-form scenario distribution.
#[derive(Debug, Clone)]
pub struct PatternChoice {
    pub z_minus: Vec<bool>,
    pub probs: Vec<f64>,
}

/// Single-shot MILP encoding of the robust objective. Contributes
/// `inner_cost + kappa * tau`.
pub fn add_dro_milp_block(
    builder: &mut ModelBuilder,
    scen_set: &OutageScenarioSet,
    phi: &[VarId],
    pi_l: &[VarId],
    zminus: &[ZMinus],
    patterns: &[PatternChoice],
    kappa: f64,
    cost_ub: f64,
) -> DroMilpVars {
    let n = scen_set.len();
    assert_eq!(phi.len(), n);
    assert_eq!(pi_l.len(), n);
    assert!(!patterns.is_empty(), "no admissible shut-off pattern");

    // beta_j: exactly one scenario carries the value-at-risk.
    let beta: Vec<VarId> = (0..n)
        .map(|j| builder.model.add_binary(format!("beta_s{j}"), 0.0))
        .collect();
    builder.model.add_constraint(
        "beta_one",
        beta.iter().map(|&b| (b, 1.0)).collect(),
        Sense::Eq,
        1.0,
    );

    // McCormick rows for w_sj = pi_{L,s} * beta_j (exact: beta binary).
    let mut w = Vec::with_capacity(n);
    for s in 0..n {
        let row: Vec<VarId> = (0..n)
            .map(|j| {
                let w_sj = builder
                    .model
                    .add_continuous(format!("w_s{s}_j{j}"), 0.0, 1.0, 0.0);
                builder.model.add_constraint(
                    format!("mc_pi_s{s}_j{j}"),
                    vec![(w_sj, 1.0), (pi_l[s], -1.0)],
                    Sense::Le,
                    0.0,
                );
                builder.model.add_constraint(
                    format!("mc_beta_s{s}_j{j}"),
                    vec![(w_sj, 1.0), (beta[j], -1.0)],
                    Sense::Le,
                    0.0,
                );
                builder.model.add_constraint(
                    format!("mc_all_s{s}_j{j}"),
                    vec![(w_sj, 1.0), (pi_l[s], -1.0), (beta[j], -1.0)],
                    Sense::Ge,
                    -1.0,
                );
                w_sj
            })
            .collect();
        w.push(row);
    }

    // Pattern selectors tie the shut-off binaries to an admissible pattern
    // and pin the final-level probabilities to that pattern's constants.
    let pattern_select: Vec<VarId> = (0..patterns.len())
        .map(|p| builder.model.add_binary(format!("pat_{p}"), 0.0))
        .collect();
    builder.model.add_constraint(
        "pat_one",
        pattern_select.iter().map(|&y| (y, 1.0)).collect(),
        Sense::Eq,
        1.0,
    );
    for (k, _) in scen_set.nzr_lines.iter().enumerate() {
        let mut coeffs: Vec<(VarId, f64)> = Vec::new();
        for (p, pat) in patterns.iter().enumerate() {
            if pat.z_minus[k] {
                coeffs.push((pattern_select[p], 1.0));
            }
        }
        match zminus[k] {
            ZMinus::Var(z) => {
                coeffs.push((z, -1.0));
                builder
                    .model
                    .add_constraint(format!("pat_link_z{k}"), coeffs, Sense::Eq, 0.0);
            }
            ZMinus::Fixed(z) => {
                builder.model.add_constraint(
                    format!("pat_link_z{k}"),
                    coeffs,
                    Sense::Eq,
                    if z { 1.0 } else { 0.0 },
                );
            }
        }
    }
    for s in 0..n {
        let mut coeffs = vec![(pi_l[s], 1.0)];
        for (p, pat) in patterns.iter().enumerate() {
            if pat.probs[s] != 0.0 {
                coeffs.push((pattern_select[p], -pat.probs[s]));
            }
        }
        builder
            .model
            .add_constraint(format!("pat_pi_s{s}"), coeffs, Sense::Eq, 0.0);
    }

    // tau = max(Phi) - VaR, with the VaR product Phi_j beta_j made exact by
    // its own McCormick envelope (beta binary, Phi in [0, cost_ub]).
    let max_phi = builder.model.add_continuous("dro_max", 0.0, cost_ub, 0.0);
    for (s, &phi_s) in phi.iter().enumerate() {
        builder.model.add_constraint(
            format!("dro_max_s{s}"),
            vec![(max_phi, 1.0), (phi_s, -1.0)],
            Sense::Ge,
            0.0,
        );
    }
    let mut var_terms = Vec::with_capacity(n);
    for (j, (&phi_j, &beta_j)) in phi.iter().zip(&beta).enumerate() {
        let pb = builder
            .model
            .add_continuous(format!("varsel_s{j}"), 0.0, cost_ub, 0.0);
        builder.model.add_constraint(
            format!("vs_cap_s{j}"),
            vec![(pb, 1.0), (beta_j, -cost_ub)],
            Sense::Le,
            0.0,
        );
        builder.model.add_constraint(
            format!("vs_phi_s{j}"),
            vec![(pb, 1.0), (phi_j, -1.0)],
            Sense::Le,
            0.0,
        );
        builder.model.add_constraint(
            format!("vs_low_s{j}"),
            vec![(pb, 1.0), (phi_j, -1.0), (beta_j, -cost_ub)],
            Sense::Ge,
            -cost_ub,
        );
        var_terms.push(pb);
    }
    let tau = builder.model.add_continuous("dro_tau", 0.0, cost_ub, kappa);
    let mut tau_def = vec![(tau, 1.0), (max_phi, -1.0)];
    for &pb in &var_terms {
        tau_def.push((pb, 1.0));
    }
    builder
        .model
        .add_constraint("dro_tau_def", tau_def, Sense::Eq, 0.0);

    // Probability-weighted worst-case cost: for the active (pattern, VaR)
    // pair, inner >= sum_s pi_s^{(p)} max{Phi_s, Phi_j}, via epigraph
    // variables m_sj >= Phi_s, Phi_j and one big-M row per pair.
    let mut m = Vec::with_capacity(n);
    for s in 0..n {
        let row: Vec<VarId> = (0..n)
            .map(|j| {
                let m_sj =
                    builder
                        .model
                        .add_continuous(format!("m_s{s}_j{j}"), 0.0, cost_ub, 0.0);
                builder.model.add_constraint(
                    format!("m_ge_s_s{s}_j{j}"),
                    vec![(m_sj, 1.0), (phi[s], -1.0)],
                    Sense::Ge,
                    0.0,
                );
                builder.model.add_constraint(
                    format!("m_ge_j_s{s}_j{j}"),
                    vec![(m_sj, 1.0), (phi[j], -1.0)],
                    Sense::Ge,
                    0.0,
                );
                m_sj
            })
            .collect();
        m.push(row);
    }
    let inner_cost = builder
        .model
        .add_continuous("dro_inner", 0.0, cost_ub, 1.0);
    for (p, pat) in patterns.iter().enumerate() {
        for j in 0..n {
            let mut coeffs = vec![
                (inner_cost, 1.0),
                (pattern_select[p], -cost_ub),
                (beta[j], -cost_ub),
            ];
            for s in 0..n {
                if pat.probs[s] != 0.0 {
                    coeffs.push((m[s][j], -pat.probs[s]));
                }
            }
            builder.model.add_constraint(
                format!("inner_p{p}_j{j}"),
                coeffs,
                Sense::Ge,
                -2.0 * cost_ub,
            );
        }
    }

    DroMilpVars {
        beta,
        w,
        pattern_select,
        tau,
        max_phi,
        inner_cost,
    }
}

/// Worst-case expectation of a fixed cost vector over the binary TV ball:
/// move up to `kappa` of probability mass onto the most expensive scenario,
/// draining the cheapest scenarios first.
pub fn transport_worst_case(costs: &[f64], probs: &[f64], kappa: f64) -> f64 {
    assert_eq!(costs.len(), probs.len());
    assert!(!costs.is_empty());
    let best = costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&a, &b| costs[a].partial_cmp(&costs[b]).unwrap().then(a.cmp(&b)));
    let mut value: f64 = costs.iter().zip(probs).map(|(c, p)| c * p).sum();
    let mut budget = kappa;
    for &s in &order {
        if budget <= 0.0 {
            break;
        }
        let movable = probs[s].min(budget);
        value += movable * (best - costs[s]);
        budget -= movable;
    }
    value
}

/// Scenario distance helper used by tests and reports: identity of survival
/// vectors, nothing else, decides whether transport is free.
pub fn scenarios_identical(a: &OutageScenario, b: &OutageScenario) -> bool {
    a.xi == b.xi
}
