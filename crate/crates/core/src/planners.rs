//! End-to-end solve strategies: risk-neutral stochastic PSPS, the
//! distributionally robust variant (exact pattern enumeration or a
//! single-shot McCormick MILP), wait-and-see, perfect-information value
//! metrics, and the cost-versus-risk Pareto sweep.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use psps_milp::{solve, MilpSolution, MilpStatus, SolveOptions};

use crate::formulation::{
    add_dro_dual_block, add_dro_milp_block, add_shaping_block, CommitRepr, ModelBuilder,
    PatternChoice, ZMinus,
};
use crate::grid::Network;
use crate::outage::{
    decision_probability, shaping_coefficients, OutageError, OutageScenarioSet, RiskProfile,
};

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("solver: {0}")]
    Solver(#[from] psps_milp::MilpError),
    #[error("solve ended with status {0:?} (gap {1})")]
    NotOptimal(MilpStatus, f64),
    #[error("outage model: {0}")]
    Outage(#[from] OutageError),
    #[error("no shut-off pattern satisfies the risk budget")]
    NoAdmissiblePattern,
    #[error("{0}")]
    Invalid(String),
}

/// Strategy used by [`solve_dr_psps`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Solve one subproblem per admissible shut-off pattern; exact and the
    /// correctness oracle for the single-shot encoding.
    Enumeration,
    /// One MILP with the shut-off decisions inside (McCormick + pattern
    /// selectors).
    MilpOneShot,
}

/// Ambiguity set configuration: binary total variation ball of radius kappa.
#[derive(Debug, Clone, Copy)]
pub struct AmbiguityConfig {
    pub kappa: f64,
    pub strategy: Strategy,
}

#[derive(Debug, Clone)]
pub struct PlannerConfig {
    pub solve_options: SolveOptions,
    /// Cap on simultaneously energized NZR lines (the paper's "k lines"
    /// tables); `None` leaves only the risk budget.
    pub max_active_lines: Option<usize>,
    pub parallel: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            solve_options: SolveOptions {
                gap_rel: 1e-9,
                ..SolveOptions::default()
            },
            max_active_lines: None,
            parallel: true,
        }
    }
}

pub struct PlannerContext<'a> {
    pub net: &'a Network,
    pub scen_set: &'a OutageScenarioSet,
    pub risk: &'a RiskProfile,
    pub config: PlannerConfig,
}

/// Objective split plus the robustness premium beyond the nominal
/// expectation; the four parts sum back to the objective.
#[derive(Debug, Clone, Serialize)]
pub struct CostDecomposition {
    pub uc_cost: f64,
    pub expected_operating: f64,
    pub expected_shedding: f64,
    pub robust_premium: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SolveSummary {
    pub milp_solves: usize,
    pub nodes: usize,
    pub lp_solves: usize,
    pub elapsed_ms: u128,
}

/// First-stage plan with its per-scenario second-stage account.
#[derive(Debug, Clone, Serialize)]
pub struct PlanResult {
    pub kappa: f64,
    /// Commitment schedule `[gen][t]`.
    pub commitments: Vec<Vec<bool>>,
    /// Energization decision per NZR line (`true` keeps the line on; this is
    /// the shut-off vector of the formulation).
    pub energized: Vec<bool>,
    pub nzr_lines: Vec<u32>,
    /// Operating-plus-shedding cost per outage scenario.
    pub scenario_costs: Vec<f64>,
    /// Decision-dependent scenario probabilities, read back from the
    /// distribution-shaping variables.
    pub probabilities: Vec<f64>,
    pub objective: f64,
    pub decomposition: CostDecomposition,
    pub stats: SolveSummary,
}

fn pattern_id(z: &[bool]) -> usize {
    z.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

fn energized_count(z: &[bool]) -> usize {
    z.iter().filter(|&&b| b).count()
}

/// Admissible shut-off patterns under the risk budget and active-line cap,
/// in pattern-id order.
pub fn admissible_patterns(ctx: &PlannerContext) -> Vec<Vec<bool>> {
    let l = ctx.scen_set.n_lines();
    let mut out = Vec::new();
    for id in 0..(1usize << l) {
        let z: Vec<bool> = (0..l).map(|k| (id >> (l - 1 - k)) & 1 == 1).collect();
        let risk: f64 = ctx
            .scen_set
            .nzr_lines
            .iter()
            .zip(&z)
            .filter(|(_, &on)| on)
            .map(|(&line, _)| ctx.risk.risk_of(line))
            .sum();
        if risk > ctx.risk.risk_tolerance + 1e-9 {
            continue;
        }
        if let Some(cap) = ctx.config.max_active_lines {
            if energized_count(&z) > cap {
                continue;
            }
        }
        out.push(z);
    }
    out
}

/// Maps each scenario to its dispatch class under a fixed pattern: scenarios
/// whose surviving-and-energized line sets coincide share one dispatch block.
fn dispatch_classes(
    scen_set: &OutageScenarioSet,
    pattern: &[bool],
) -> (Vec<usize>, Vec<Vec<bool>>) {
    let mut keys: Vec<Vec<bool>> = Vec::new();
    let mut class_of = Vec::with_capacity(scen_set.len());
    for scen in &scen_set.scenarios {
        let key: Vec<bool> = scen.xi.iter().zip(pattern).map(|(&x, &z)| x && z).collect();
        let idx = match keys.iter().position(|k| *k == key) {
            Some(i) => i,
            None => {
                keys.push(key.clone());
                keys.len() - 1
            }
        };
        class_of.push(idx);
    }
    (class_of, keys)
}

struct PatternSolve {
    pattern: Vec<bool>,
    objective: f64,
    plan: PlanResult,
}

/// Solves the fixed-pattern subproblem. With `kappa = None` the objective is
/// the plain probability-weighted expectation (risk-neutral); with a radius
/// it is the dual robust objective. A `cutoff` from an already-solved
/// pattern lets the search discard this pattern as soon as its bound proves
/// it cannot win; `hint` seeds the incumbent with a known-good commitment
/// schedule. Returns `None` when the pattern is proven no better than the
/// cutoff.
fn solve_pattern(
    ctx: &PlannerContext,
    pattern: &[bool],
    kappa: Option<f64>,
    cutoff: Option<f64>,
    hint: Option<&[Vec<bool>]>,
    totals: &mut SolveSummary,
) -> Result<Option<PatternSolve>, PlannerError> {
    let scen_set = ctx.scen_set;
    let probs: Vec<f64> = scen_set
        .scenarios
        .iter()
        .map(|s| decision_probability(pattern, &s.xi, &scen_set.line_wip0, &scen_set.line_wip1))
        .collect::<Result<_, _>>()?;

    let mut b = ModelBuilder::new(ctx.net);
    let cost_ub = b.cost_upper_bound();
    let uc = b.add_uc_block();
    let zminus: Vec<ZMinus> = pattern.iter().map(|&z| ZMinus::Fixed(z)).collect();

    let (class_of, keys) = dispatch_classes(scen_set, pattern);
    let mut blocks = Vec::new();
    for (c, key) in keys.iter().enumerate() {
        let statuses = b.line_statuses(scen_set, &zminus, key);
        blocks.push(b.add_dispatch_block(&CommitRepr::Vars(&uc), &statuses, &format!("c{c}")));
    }
    let phi_of_scenario: Vec<psps_milp::VarId> =
        class_of.iter().map(|&c| blocks[c].cost).collect();

    // Distribution shaping rides along on every solve; its final level is
    // the reported probability vector and must replicate the closed form.
    let coeffs = shaping_coefficients(
        &scen_set.nzr_lines,
        &scen_set.line_wip0,
        &scen_set.line_wip1,
    )?;
    let pi_l = add_shaping_block(&mut b, scen_set, &coeffs, &zminus);

    match kappa {
        None => {
            // Expectation objective: weight each class by its scenario mass.
            let mut weight = vec![0.0; blocks.len()];
            for (s, &c) in class_of.iter().enumerate() {
                weight[c] += probs[s];
            }
            for (c, block) in blocks.iter().enumerate() {
                b.model.set_objective(block.cost, weight[c]);
            }
        }
        Some(kappa) => {
            add_dro_dual_block(&mut b, &probs, &phi_of_scenario, kappa, cost_ub);
        }
    }

    let mut opts = ctx.config.solve_options.clone();
    opts.cutoff = cutoff;
    if let Some(schedules) = hint {
        let mut assignment = Vec::new();
        for (gi, row) in uc.commit.iter().enumerate() {
            for (t, &z) in row.iter().enumerate() {
                assignment.push((z, if schedules[gi][t] { 1.0 } else { 0.0 }));
            }
        }
        opts.hint = Some(assignment);
    }
    let sol = solve(&b.model, &opts)?;
    totals.milp_solves += 1;
    totals.nodes += sol.stats.nodes;
    totals.lp_solves += sol.stats.lp_solves;
    totals.elapsed_ms += sol.stats.elapsed.as_millis();
    match sol.status {
        MilpStatus::Optimal => {}
        MilpStatus::Infeasible if cutoff.is_some() => return Ok(None),
        status => return Err(PlannerError::NotOptimal(status, sol.bound_gap)),
    }
    if let Some(c) = cutoff {
        if sol.objective >= c {
            return Ok(None);
        }
    }

    let plan = extract_plan(
        ctx,
        &sol,
        &uc,
        pattern,
        &phi_of_scenario,
        &pi_l,
        &blocks,
        &class_of,
        kappa.unwrap_or(0.0),
    );
    Ok(Some(PatternSolve {
        pattern: pattern.to_vec(),
        objective: sol.objective,
        plan,
    }))
}

#[allow(clippy::too_many_arguments)]
fn extract_plan(
    ctx: &PlannerContext,
    sol: &MilpSolution,
    uc: &crate::formulation::UcVars,
    pattern: &[bool],
    phi_of_scenario: &[psps_milp::VarId],
    pi_l: &[psps_milp::VarId],
    blocks: &[crate::formulation::DispatchVars],
    class_of: &[usize],
    kappa: f64,
) -> PlanResult {
    let net = ctx.net;
    let h = net.horizon();
    let commitments: Vec<Vec<bool>> = uc
        .commit
        .iter()
        .map(|row| row.iter().map(|&v| sol.value(v) > 0.5).collect())
        .collect();
    let mut uc_cost = 0.0;
    for (gi, g) in net.generators().iter().enumerate() {
        for t in 0..h {
            uc_cost += g.cost_up * sol.value(uc.start[gi][t]);
            uc_cost += g.cost_dn * sol.value(uc.stop[gi][t]);
        }
    }
    let scenario_costs: Vec<f64> = phi_of_scenario.iter().map(|&v| sol.value(v)).collect();
    let probabilities: Vec<f64> = pi_l.iter().map(|&v| sol.value(v)).collect();

    // Split each class cost into generation and shedding parts.
    let mut class_oc = vec![0.0; blocks.len()];
    for (c, block) in blocks.iter().enumerate() {
        let mut oc = 0.0;
        for (gi, g) in net.generators().iter().enumerate() {
            for t in 0..h {
                oc += g.cost_marginal * sol.value(block.gen_power[gi][t]);
            }
        }
        class_oc[c] = oc;
    }
    let mut expected_operating = 0.0;
    let mut expected_shedding = 0.0;
    for (s, &c) in class_of.iter().enumerate() {
        expected_operating += probabilities[s] * class_oc[c];
        expected_shedding += probabilities[s] * (scenario_costs[s] - class_oc[c]);
    }
    let robust_premium = sol.objective - uc_cost - expected_operating - expected_shedding;

    PlanResult {
        kappa,
        commitments,
        energized: pattern.to_vec(),
        nzr_lines: ctx.scen_set.nzr_lines.clone(),
        scenario_costs,
        probabilities,
        objective: sol.objective,
        decomposition: CostDecomposition {
            uc_cost,
            expected_operating,
            expected_shedding,
            robust_premium,
        },
        stats: SolveSummary {
            milp_solves: 1,
            nodes: sol.stats.nodes,
            lp_solves: sol.stats.lp_solves,
            elapsed_ms: sol.stats.elapsed.as_millis(),
        },
    }
}

/// Exact minimum over admissible patterns. Patterns are visited with more
/// energized lines first (ties by lower pattern id); the best objective so
/// far prunes the rest as a solver cutoff and its commitment schedule seeds
/// their incumbents. Equal-objective ties therefore resolve toward more
/// energized lines, then the lower id, deterministically.
fn enumerate_best(
    ctx: &PlannerContext,
    kappa: Option<f64>,
) -> Result<PlanResult, PlannerError> {
    let mut order = admissible_patterns(ctx);
    if order.is_empty() {
        return Err(PlannerError::NoAdmissiblePattern);
    }
    order.sort_by(|a, b| {
        energized_count(b)
            .cmp(&energized_count(a))
            .then_with(|| pattern_id(a).cmp(&pattern_id(b)))
    });
    let mut totals = SolveSummary::default();
    let mut best: Option<PatternSolve> = None;
    for pattern in &order {
        let cutoff = best.as_ref().map(|b| b.objective);
        let hint = best.as_ref().map(|b| b.plan.commitments.clone());
        if let Some(result) =
            solve_pattern(ctx, pattern, kappa, cutoff, hint.as_deref(), &mut totals)?
        {
            best = Some(result);
        }
    }
    let mut plan = best.ok_or(PlannerError::NoAdmissiblePattern)?.plan;
    plan.stats = totals;
    Ok(plan)
}

/// Risk-neutral stochastic plan: expectation objective under the
/// decision-dependent distribution, minimized over admissible patterns.
pub fn solve_risk_neutral(ctx: &PlannerContext) -> Result<PlanResult, PlannerError> {
    enumerate_best(ctx, None)
}

/// Distributionally robust plan over the binary total variation ball.
pub fn solve_dr_psps(
    ctx: &PlannerContext,
    amb: &AmbiguityConfig,
) -> Result<PlanResult, PlannerError> {
    if !(0.0..=1.0).contains(&amb.kappa) {
        return Err(PlannerError::Invalid(format!(
            "kappa {} outside [0, 1]",
            amb.kappa
        )));
    }
    match amb.strategy {
        Strategy::Enumeration => enumerate_best(ctx, Some(amb.kappa)),
        Strategy::MilpOneShot => solve_one_shot(ctx, amb.kappa),
    }
}

fn solve_one_shot(ctx: &PlannerContext, kappa: f64) -> Result<PlanResult, PlannerError> {
    let scen_set = ctx.scen_set;
    let patterns = admissible_patterns(ctx);
    if patterns.is_empty() {
        return Err(PlannerError::NoAdmissiblePattern);
    }
    let choices: Vec<PatternChoice> = patterns
        .iter()
        .map(|z| {
            let probs = scen_set
                .scenarios
                .iter()
                .map(|s| {
                    decision_probability(z, &s.xi, &scen_set.line_wip0, &scen_set.line_wip1)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PatternChoice {
                z_minus: z.clone(),
                probs,
            })
        })
        .collect::<Result<_, PlannerError>>()?;

    let mut b = ModelBuilder::new(ctx.net);
    let cost_ub = b.cost_upper_bound();
    let uc = b.add_uc_block();
    let zminus = b.add_line_decisions(scen_set, None);
    b.add_risk_budget(scen_set, ctx.risk, &zminus, ctx.config.max_active_lines);

    let mut blocks = Vec::new();
    for (s, scen) in scen_set.scenarios.iter().enumerate() {
        let statuses = b.line_statuses(scen_set, &zminus, &scen.xi);
        blocks.push(b.add_dispatch_block(&CommitRepr::Vars(&uc), &statuses, &format!("s{s}")));
    }
    let phi: Vec<psps_milp::VarId> = blocks.iter().map(|bl| bl.cost).collect();

    let coeffs = shaping_coefficients(
        &scen_set.nzr_lines,
        &scen_set.line_wip0,
        &scen_set.line_wip1,
    )?;
    let pi_l = add_shaping_block(&mut b, scen_set, &coeffs, &zminus);
    add_dro_milp_block(
        &mut b, scen_set, &phi, &pi_l, &zminus, &choices, kappa, cost_ub,
    );

    let sol = solve(&b.model, &ctx.config.solve_options)?;
    if sol.status != MilpStatus::Optimal {
        return Err(PlannerError::NotOptimal(sol.status, sol.bound_gap));
    }
    let pattern: Vec<bool> = zminus
        .iter()
        .map(|z| match z {
            ZMinus::Var(v) => sol.value(*v) > 0.5,
            ZMinus::Fixed(f) => *f,
        })
        .collect();
    let class_of: Vec<usize> = (0..scen_set.len()).collect();
    Ok(extract_plan(
        ctx, &sol, &uc, &pattern, &phi, &pi_l, &blocks, &class_of, kappa,
    ))
}

/// Per-scenario perfect-information solve.
#[derive(Debug, Clone, Serialize)]
pub struct WaitAndSeeResult {
    pub scenario: usize,
    pub objective: f64,
    pub uc_cost: f64,
    pub operating_cost: f64,
    pub commitments: Vec<Vec<bool>>,
    pub energized: Vec<bool>,
}

/// Wait-and-see: for each outage scenario, pick commitments and shut-offs
/// with the realization known. Patterns inducing the same effective line
/// status are solved once.
pub fn solve_wait_and_see(ctx: &PlannerContext) -> Result<Vec<WaitAndSeeResult>, PlannerError> {
    let scen_set = ctx.scen_set;
    let patterns = admissible_patterns(ctx);
    if patterns.is_empty() {
        return Err(PlannerError::NoAdmissiblePattern);
    }
    let jobs: Vec<usize> = (0..scen_set.len()).collect();
    let solve_scenario = |&s: &usize| -> Result<WaitAndSeeResult, PlannerError> {
        let xi = &scen_set.scenarios[s].xi;
        // Group admissible patterns by their effective status vector.
        let mut groups: Vec<(Vec<bool>, Vec<&Vec<bool>>)> = Vec::new();
        for p in &patterns {
            let key: Vec<bool> = p.iter().zip(xi).map(|(&z, &x)| z && x).collect();
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, members)) => members.push(p),
                None => groups.push((key, vec![p])),
            }
        }
        let mut candidates = Vec::new();
        for (key, members) in &groups {
            let mut b = ModelBuilder::new(ctx.net);
            let uc = b.add_uc_block();
            let zfixed: Vec<ZMinus> = key.iter().map(|&z| ZMinus::Fixed(z)).collect();
            let statuses = b.line_statuses(scen_set, &zfixed, xi);
            let block = b.add_dispatch_block(&CommitRepr::Vars(&uc), &statuses, "ws");
            b.model.set_objective(block.cost, 1.0);
            let sol = solve(&b.model, &ctx.config.solve_options)?;
            if sol.status != MilpStatus::Optimal {
                return Err(PlannerError::NotOptimal(sol.status, sol.bound_gap));
            }
            // Best pattern within the group by the energized tie rule.
            let pattern = members
                .iter()
                .max_by_key(|p| (energized_count(p), std::cmp::Reverse(pattern_id(p))))
                .expect("nonempty group")
                .to_vec();
            let commitments: Vec<Vec<bool>> = uc
                .commit
                .iter()
                .map(|row| row.iter().map(|&v| sol.value(v) > 0.5).collect())
                .collect();
            let mut uc_cost = 0.0;
            for (gi, g) in ctx.net.generators().iter().enumerate() {
                for t in 0..ctx.net.horizon() {
                    uc_cost += g.cost_up * sol.value(uc.start[gi][t]);
                    uc_cost += g.cost_dn * sol.value(uc.stop[gi][t]);
                }
            }
            candidates.push((sol.objective, pattern, commitments, uc_cost));
        }
        candidates.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then_with(|| energized_count(&b.1).cmp(&energized_count(&a.1)))
                .then_with(|| pattern_id(&a.1).cmp(&pattern_id(&b.1)))
        });
        let (objective, pattern, commitments, uc_cost) =
            candidates.into_iter().next().expect("nonempty");
        Ok(WaitAndSeeResult {
            scenario: s,
            objective,
            uc_cost,
            operating_cost: objective - uc_cost,
            commitments,
            energized: pattern,
        })
    };
    if ctx.config.parallel {
        jobs.par_iter().map(solve_scenario).collect()
    } else {
        jobs.iter().map(solve_scenario).collect()
    }
}

/// Upper-tail expected shortfall of the worst `1 - kappa` probability mass;
/// at `kappa = 0` this is the plain expectation, and it grows toward the
/// maximum as `kappa` approaches 1.
pub fn cvar(costs: &[f64], probs: &[f64], kappa: f64) -> Result<f64, PlannerError> {
    if costs.is_empty() || costs.len() != probs.len() {
        return Err(PlannerError::Invalid(
            "cvar needs matching, nonempty cost and probability vectors".into(),
        ));
    }
    if !(0.0..1.0).contains(&kappa) {
        return Err(PlannerError::Invalid(format!(
            "cvar tail parameter {kappa} outside [0, 1)"
        )));
    }
    let alpha = 1.0 - kappa;
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&a, &b| costs[b].partial_cmp(&costs[a]).unwrap().then(a.cmp(&b)));
    let mut remaining = alpha;
    let mut acc = 0.0;
    for &i in &order {
        if remaining <= 1e-15 {
            break;
        }
        let take = probs[i].min(remaining);
        acc += take * costs[i];
        remaining -= take;
    }
    Ok(acc / alpha)
}

/// Upper quantile at tail mass `1 - kappa`, ties toward the larger cost (so
/// that `max - var` is nonnegative).
pub fn var(costs: &[f64], probs: &[f64], kappa: f64) -> Result<f64, PlannerError> {
    if costs.is_empty() || costs.len() != probs.len() {
        return Err(PlannerError::Invalid(
            "var needs matching, nonempty cost and probability vectors".into(),
        ));
    }
    if !(0.0..1.0).contains(&kappa) {
        return Err(PlannerError::Invalid(format!(
            "var tail parameter {kappa} outside [0, 1)"
        )));
    }
    let alpha = 1.0 - kappa;
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&a, &b| costs[b].partial_cmp(&costs[a]).unwrap().then(a.cmp(&b)));
    let mut acc = 0.0;
    let mut last = costs[order[0]];
    for &i in &order {
        acc += probs[i];
        last = costs[i];
        if acc >= alpha - 1e-12 {
            break;
        }
    }
    Ok(last)
}

/// Robust inner value of a fixed cost vector: `kappa max + (1-kappa) CVaR`.
pub fn robust_value(costs: &[f64], probs: &[f64], kappa: f64) -> Result<f64, PlannerError> {
    let max = costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if kappa >= 1.0 {
        return Ok(max);
    }
    Ok(kappa * max + (1.0 - kappa) * cvar(costs, probs, kappa)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct RevpiReport {
    pub kappa: f64,
    /// Robustified wait-and-see value.
    pub rews: f64,
    /// Robust here-and-now optimum (the DR-PSPS objective).
    pub rerp: f64,
    /// Value of perfect information: `rerp - rews`, nonnegative.
    pub revpi: f64,
}

/// Robustified expected value of perfect information. The wait-and-see cost
/// vector is weighted with the probabilities induced by the here-and-now
/// plan, which keeps `revpi >= 0` structural: the robust functional is
/// monotone and the wait-and-see costs under-cut every scenario.
pub fn revpi(ctx: &PlannerContext, kappa: f64) -> Result<RevpiReport, PlannerError> {
    let plan = solve_dr_psps(
        ctx,
        &AmbiguityConfig {
            kappa,
            strategy: Strategy::Enumeration,
        },
    )?;
    let ws = solve_wait_and_see(ctx)?;
    let ws_costs: Vec<f64> = ws.iter().map(|w| w.objective).collect();
    let rews = robust_value(&ws_costs, &plan.probabilities, kappa)?;
    let rerp = plan.objective;
    Ok(RevpiReport {
        kappa,
        rews,
        rerp,
        revpi: rerp - rews,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ParetoPoint {
    pub pattern_id: usize,
    pub energized: Vec<bool>,
    pub total_cost: f64,
    pub total_risk: f64,
    pub on_frontier: bool,
}

/// Deterministic cost-versus-risk sweep over every shut-off pattern of the
/// NZR set: each pattern is costed with its energized lines in service and
/// charged the summed risk of what stays energized.
pub fn pareto_sweep(ctx: &PlannerContext) -> Result<Vec<ParetoPoint>, PlannerError> {
    let l = ctx.scen_set.n_lines();
    if l > 6 {
        return Err(PlannerError::Invalid(format!(
            "pareto sweep over {l} lines would need {} solves; cap is 6 lines",
            1usize << l
        )));
    }
    let ids: Vec<usize> = (0..(1usize << l)).collect();
    let solve_point = |&id: &usize| -> Result<ParetoPoint, PlannerError> {
        let z: Vec<bool> = (0..l).map(|k| (id >> (l - 1 - k)) & 1 == 1).collect();
        let mut b = ModelBuilder::new(ctx.net);
        let uc = b.add_uc_block();
        let zfixed: Vec<ZMinus> = z.iter().map(|&v| ZMinus::Fixed(v)).collect();
        let all_survive = vec![true; l];
        let statuses = b.line_statuses(ctx.scen_set, &zfixed, &all_survive);
        let block = b.add_dispatch_block(&CommitRepr::Vars(&uc), &statuses, "pt");
        b.model.set_objective(block.cost, 1.0);
        let sol = solve(&b.model, &ctx.config.solve_options)?;
        if sol.status != MilpStatus::Optimal {
            return Err(PlannerError::NotOptimal(sol.status, sol.bound_gap));
        }
        let total_risk: f64 = ctx
            .scen_set
            .nzr_lines
            .iter()
            .zip(&z)
            .filter(|(_, &on)| on)
            .map(|(&line, _)| ctx.risk.risk_of(line))
            .sum();
        Ok(ParetoPoint {
            pattern_id: id,
            energized: z,
            total_cost: sol.objective,
            total_risk,
            on_frontier: false,
        })
    };
    let mut points: Vec<ParetoPoint> = if ctx.config.parallel {
        ids.par_iter().map(solve_point).collect::<Result<_, _>>()?
    } else {
        ids.iter().map(solve_point).collect::<Result<_, _>>()?
    };
    mark_frontier(&mut points);
    Ok(points)
}

/// Marks the non-dominated points: no other point is at least as good on
/// both axes and strictly better on one.
pub fn mark_frontier(points: &mut [ParetoPoint]) {
    for i in 0..points.len() {
        let dominated = points.iter().enumerate().any(|(j, other)| {
            j != i
                && other.total_cost <= points[i].total_cost
                && other.total_risk <= points[i].total_risk
                && (other.total_cost < points[i].total_cost
                    || other.total_risk < points[i].total_risk)
        });
        points[i].on_frontier = !dominated;
    }
}
