//! Constraint-block builders translating a network plus outage scenarios into
//! MILP models: unit commitment, per-scenario DC dispatch, the wildfire risk
//! budget, distribution shaping, and the two distributionally robust
//! encodings (dual and single-shot McCormick MILP).

mod dro;
mod shaping;

pub use dro::{
    add_dro_dual_block, add_dro_milp_block, transport_worst_case, DroDualVars, DroMilpVars,
    PatternChoice,
};
pub use shaping::add_shaping_block;

use psps_milp::{MilpModel, Sense, VarId};

use crate::grid::Network;
use crate::outage::{OutageScenarioSet, RiskProfile};

/// How a shut-off decision enters a model: folded in as a constant or as a
/// binary column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZMinus {
    Fixed(bool),
    Var(VarId),
}

/// Effective line status for one scenario: constant, or proportional to the
/// line's shut-off variable (when the line survives the scenario).
#[derive(Debug, Clone, Copy)]
pub enum StatusTerm {
    Const(f64),
    Var(VarId),
}

/// How generator commitments enter a dispatch block.
pub enum CommitRepr<'a> {
    /// First-stage binaries from [`add_uc_block`].
    Vars(&'a UcVars),
    /// Frozen schedule (real-time evaluation): `[gen][t]` on/off.
    Fixed(&'a [Vec<bool>]),
}

#[derive(Debug, Clone)]
pub struct UcVars {
    /// `z_{g,t}` commitment binaries, `[gen][t]`.
    pub commit: Vec<Vec<VarId>>,
    /// Start-up indicators; continuous in `[0,1]`, forced integral by the
    /// transition equalities once `z` is integral.
    pub start: Vec<Vec<VarId>>,
    /// Shut-down indicators, same relaxation.
    pub stop: Vec<Vec<VarId>>,
}

#[derive(Debug, Clone)]
pub struct DispatchVars {
    pub gen_power: Vec<Vec<VarId>>,
    pub theta: Vec<Vec<VarId>>,
    pub flow: Vec<Vec<VarId>>,
    /// Served fraction `x_{d,t}` in `[0,1]`.
    pub served: Vec<Vec<VarId>>,
    /// Operating-plus-shedding cost of this block.
    pub cost: VarId,
}

/// Shared builder state: network, expected demand, and the model under
/// construction.
pub struct ModelBuilder<'a> {
    pub net: &'a Network,
    pub expected_demand: Vec<Vec<f64>>,
    pub model: MilpModel,
}

impl<'a> ModelBuilder<'a> {
    pub fn new(net: &'a Network) -> Self {
        ModelBuilder {
            net,
            expected_demand: crate::grid::expected_demand(net),
            model: MilpModel::new(),
        }
    }

    /// Upper bound on any single-scenario operating cost: every generator at
    /// maximum output all day plus every expected megawatt-hour shed.
    pub fn cost_upper_bound(&self) -> f64 {
        let h = self.net.horizon() as f64;
        let gen: f64 = self
            .net
            .generators()
            .iter()
            .map(|g| g.cost_marginal * g.p_max)
            .sum();
        let shed: f64 = self
            .net
            .demands()
            .iter()
            .enumerate()
            .map(|(d, dm)| dm.voll * self.expected_demand[d].iter().sum::<f64>())
            .sum();
        gen * h + shed
    }

    /// Unit-commitment block: transition consistency, minimum up and down
    /// times, and start/stop costs in the objective.
    pub fn add_uc_block(&mut self) -> UcVars {
        let h = self.net.horizon();
        let mut commit = Vec::new();
        let mut start = Vec::new();
        let mut stop = Vec::new();
        for g in self.net.generators() {
            let zs: Vec<VarId> = (0..h)
                .map(|t| self.model.add_binary(format!("z_g{}_t{}", g.id, t), 0.0))
                .collect();
            let ups: Vec<VarId> = (0..h)
                .map(|t| {
                    self.model
                        .add_continuous(format!("zup_g{}_t{}", g.id, t), 0.0, 1.0, g.cost_up)
                })
                .collect();
            let dns: Vec<VarId> = (0..h)
                .map(|t| {
                    self.model
                        .add_continuous(format!("zdn_g{}_t{}", g.id, t), 0.0, 1.0, g.cost_dn)
                })
                .collect();

            let init = if g.initial_status { 1.0 } else { 0.0 };
            for t in 0..h {
                // z_t - z_{t-1} = up_t - dn_t, anchored at the initial status.
                let mut coeffs = vec![(zs[t], 1.0), (ups[t], -1.0), (dns[t], 1.0)];
                let rhs = if t == 0 {
                    init
                } else {
                    coeffs.push((zs[t - 1], -1.0));
                    0.0
                };
                self.model
                    .add_constraint(format!("trans_g{}_t{}", g.id, t), coeffs, Sense::Eq, rhs);

                // Minimum up: a start inside the window keeps the unit on.
                let lo = t.saturating_sub(g.min_up - 1);
                let mut coeffs = vec![(zs[t], 1.0)];
                for tp in lo..=t {
                    coeffs.push((ups[tp], -1.0));
                }
                self.model
                    .add_constraint(format!("minup_g{}_t{}", g.id, t), coeffs, Sense::Ge, 0.0);

                // Minimum down: a stop inside the window keeps it off.
                let lo = t.saturating_sub(g.min_dn - 1);
                let mut coeffs = vec![(zs[t], 1.0)];
                for tp in lo..=t {
                    coeffs.push((dns[tp], 1.0));
                }
                self.model
                    .add_constraint(format!("mindn_g{}_t{}", g.id, t), coeffs, Sense::Le, 1.0);
            }
            commit.push(zs);
            start.push(ups);
            stop.push(dns);
        }
        UcVars {
            commit,
            start,
            stop,
        }
    }

    /// Binary (or fixed) shut-off decision per NZR line. Fixed decisions fold
    /// into constraint constants; variables become first-stage binaries.
    pub fn add_line_decisions(&mut self, scen_set: &OutageScenarioSet, fixed: Option<&[bool]>) -> Vec<ZMinus> {
        match fixed {
            Some(pattern) => pattern.iter().map(|&z| ZMinus::Fixed(z)).collect(),
            None => scen_set
                .nzr_lines
                .iter()
                .map(|id| ZMinus::Var(self.model.add_binary(format!("zline_{id}"), 0.0)))
                .collect(),
        }
    }

    /// Effective per-line status terms for one survival scenario:
    /// `a = z_minus * xi` with `xi` constant per scenario.
    pub fn line_statuses(
        &self,
        scen_set: &OutageScenarioSet,
        zminus: &[ZMinus],
        xi: &[bool],
    ) -> Vec<StatusTerm> {
        let mut nzr_index = vec![None; self.net.lines().len()];
        for (k, &id) in scen_set.nzr_lines.iter().enumerate() {
            nzr_index[(id - 1) as usize] = Some(k);
        }
        self.net
            .lines()
            .iter()
            .enumerate()
            .map(|(li, _)| match nzr_index[li] {
                None => StatusTerm::Const(1.0),
                Some(k) => {
                    if !xi[k] {
                        StatusTerm::Const(0.0)
                    } else {
                        match zminus[k] {
                            ZMinus::Fixed(z) => StatusTerm::Const(if z { 1.0 } else { 0.0 }),
                            ZMinus::Var(v) => StatusTerm::Var(v),
                        }
                    }
                }
            })
            .collect()
    }

    /// One dispatch block (generation bounds, ramping, DC power flow with
    /// switchable lines, bus balance against expected demand, and the
    /// operating-cost accounting variable). `tag` namespaces the block.
    pub fn add_dispatch_block(
        &mut self,
        commitments: &CommitRepr,
        statuses: &[StatusTerm],
        tag: &str,
    ) -> DispatchVars {
        self.add_dispatch_block_with_demand(commitments, statuses, tag, None)
    }

    /// Same as [`Self::add_dispatch_block`], optionally overriding the demand
    /// matrix (used for realized real-time demand).
    pub fn add_dispatch_block_with_demand(
        &mut self,
        commitments: &CommitRepr,
        statuses: &[StatusTerm],
        tag: &str,
        demand_override: Option<&[Vec<f64>]>,
    ) -> DispatchVars {
        let h = self.net.horizon();
        let net = self.net;
        let theta_max = net.theta_max();
        let demand: &[Vec<f64>] = demand_override.unwrap_or(&self.expected_demand);

        // Generation with commitment coupling and substituted-aux ramping.
        let mut gen_power = Vec::new();
        for (gi, g) in net.generators().iter().enumerate() {
            let ps: Vec<VarId> = (0..h)
                .map(|t| {
                    self.model.add_continuous(
                        format!("p_{tag}_g{}_t{}", g.id, t),
                        0.0,
                        g.p_max,
                        0.0,
                    )
                })
                .collect();
            match commitments {
                CommitRepr::Vars(uc) => {
                    for t in 0..h {
                        let z = uc.commit[gi][t];
                        self.model.add_constraint(
                            format!("pmax_{tag}_g{}_t{}", g.id, t),
                            vec![(ps[t], 1.0), (z, -g.p_max)],
                            Sense::Le,
                            0.0,
                        );
                        self.model.add_constraint(
                            format!("pmin_{tag}_g{}_t{}", g.id, t),
                            vec![(ps[t], 1.0), (z, -g.p_min)],
                            Sense::Ge,
                            0.0,
                        );
                        // Ramp on the startup-safe deviation p - pmax z,
                        // anchored at zero before the first step.
                        let mut up_coeffs = vec![(ps[t], 1.0), (z, -g.p_max)];
                        let mut dn_coeffs = vec![(ps[t], 1.0), (z, -g.p_max)];
                        if t > 0 {
                            let zp = uc.commit[gi][t - 1];
                            up_coeffs.extend([(ps[t - 1], -1.0), (zp, g.p_max)]);
                            dn_coeffs.extend([(ps[t - 1], -1.0), (zp, g.p_max)]);
                        }
                        self.model.add_constraint(
                            format!("rampup_{tag}_g{}_t{}", g.id, t),
                            up_coeffs,
                            Sense::Le,
                            g.ramp_max,
                        );
                        self.model.add_constraint(
                            format!("rampdn_{tag}_g{}_t{}", g.id, t),
                            dn_coeffs,
                            Sense::Ge,
                            g.ramp_min,
                        );
                    }
                }
                CommitRepr::Fixed(schedule) => {
                    for t in 0..h {
                        let on = schedule[gi][t];
                        let (lo, up) = if on { (g.p_min, g.p_max) } else { (0.0, 0.0) };
                        self.model.variables[ps[t].0].lower = lo;
                        self.model.variables[ps[t].0].upper = up;
                        let zc = if on { 1.0 } else { 0.0 };
                        let zp = if t > 0 {
                            if schedule[gi][t - 1] {
                                1.0
                            } else {
                                0.0
                            }
                        } else {
                            0.0
                        };
                        let mut coeffs = vec![(ps[t], 1.0)];
                        let mut shift = g.p_max * zc;
                        if t > 0 {
                            coeffs.push((ps[t - 1], -1.0));
                            shift -= g.p_max * zp;
                        }
                        self.model.add_constraint(
                            format!("rampup_{tag}_g{}_t{}", g.id, t),
                            coeffs.clone(),
                            Sense::Le,
                            g.ramp_max + shift,
                        );
                        self.model.add_constraint(
                            format!("rampdn_{tag}_g{}_t{}", g.id, t),
                            coeffs,
                            Sense::Ge,
                            g.ramp_min + shift,
                        );
                    }
                }
            }
            gen_power.push(ps);
        }

        // Phase angles; the reference bus is pinned to zero.
        let mut theta = Vec::new();
        for b in net.buses() {
            let (lo, up) = if b.id == net.reference_bus() {
                (0.0, 0.0)
            } else {
                (-theta_max, theta_max)
            };
            let ths: Vec<VarId> = (0..h)
                .map(|t| {
                    self.model
                        .add_continuous(format!("th_{tag}_b{}_t{}", b.id, t), lo, up, 0.0)
                })
                .collect();
            theta.push(ths);
        }

        // Line flows: p = B (theta_from - theta_to) when in service, zero
        // otherwise. Out lines decouple the angle equation entirely; lines
        // with a variable status get the big-M relaxation pair, with the
        // angle window wide enough that an open line never constrains its
        // endpoint angles.
        let mut flow = Vec::new();
        for (li, l) in net.lines().iter().enumerate() {
            let b = net.flow_coefficient(l);
            let fs: Vec<VarId> = (0..h)
                .map(|t| {
                    self.model.add_continuous(
                        format!("f_{tag}_l{}_t{}", l.id, t),
                        l.flow_min,
                        l.flow_max,
                        0.0,
                    )
                })
                .collect();
            let from = (l.from_bus - 1) as usize;
            let to = (l.to_bus - 1) as usize;
            match statuses[li] {
                StatusTerm::Const(a) if a == 0.0 => {
                    for t in 0..h {
                        self.model.variables[fs[t].0].lower = 0.0;
                        self.model.variables[fs[t].0].upper = 0.0;
                    }
                }
                StatusTerm::Const(_) => {
                    for t in 0..h {
                        self.model.add_constraint(
                            format!("dc_{tag}_l{}_t{}", l.id, t),
                            vec![(fs[t], 1.0), (theta[from][t], -b), (theta[to][t], b)],
                            Sense::Eq,
                            0.0,
                        );
                    }
                }
                StatusTerm::Var(z) => {
                    let big_m = b * 2.0 * theta_max;
                    for t in 0..h {
                        self.model.add_constraint(
                            format!("dcu_{tag}_l{}_t{}", l.id, t),
                            vec![
                                (fs[t], 1.0),
                                (theta[from][t], -b),
                                (theta[to][t], b),
                                (z, big_m),
                            ],
                            Sense::Le,
                            big_m,
                        );
                        self.model.add_constraint(
                            format!("dcl_{tag}_l{}_t{}", l.id, t),
                            vec![
                                (fs[t], 1.0),
                                (theta[from][t], -b),
                                (theta[to][t], b),
                                (z, -big_m),
                            ],
                            Sense::Ge,
                            -big_m,
                        );
                        // Thermal limits gate on the switch too.
                        self.model.add_constraint(
                            format!("thu_{tag}_l{}_t{}", l.id, t),
                            vec![(fs[t], 1.0), (z, -l.flow_max)],
                            Sense::Le,
                            0.0,
                        );
                        self.model.add_constraint(
                            format!("thl_{tag}_l{}_t{}", l.id, t),
                            vec![(fs[t], 1.0), (z, -l.flow_min)],
                            Sense::Ge,
                            0.0,
                        );
                    }
                }
            }
            flow.push(fs);
        }

        // Served fraction per demand.
        let mut served = Vec::new();
        for d in net.demands() {
            let xs: Vec<VarId> = (0..h)
                .map(|t| {
                    self.model
                        .add_continuous(format!("x_{tag}_d{}_t{}", d.id, t), 0.0, 1.0, 0.0)
                })
                .collect();
            served.push(xs);
        }

        // Bus power balance: flow adds at its to-bus and subtracts at its
        // from-bus.
        for bus in net.buses() {
            for t in 0..h {
                let mut coeffs: Vec<(VarId, f64)> = Vec::new();
                for (gi, g) in net.generators().iter().enumerate() {
                    if g.bus == bus.id {
                        coeffs.push((gen_power[gi][t], 1.0));
                    }
                }
                for (li, l) in net.lines().iter().enumerate() {
                    if l.to_bus == bus.id {
                        coeffs.push((flow[li][t], 1.0));
                    }
                    if l.from_bus == bus.id {
                        coeffs.push((flow[li][t], -1.0));
                    }
                }
                for (di, d) in net.demands().iter().enumerate() {
                    if d.bus == bus.id {
                        coeffs.push((served[di][t], -demand[di][t]));
                    }
                }
                self.model.add_constraint(
                    format!("bal_{tag}_b{}_t{}", bus.id, t),
                    coeffs,
                    Sense::Eq,
                    0.0,
                );
            }
        }

        // Operating cost accounting: cost = sum C_g p + sum VoLL (1-x) E[d].
        let shed_base: f64 = net
            .demands()
            .iter()
            .enumerate()
            .map(|(di, d)| d.voll * demand[di].iter().sum::<f64>())
            .sum();
        let cost = self.model.add_continuous(
            format!("phi_{tag}"),
            0.0,
            self.cost_upper_bound() + 1.0,
            0.0,
        );
        let mut coeffs = vec![(cost, 1.0)];
        for (gi, g) in net.generators().iter().enumerate() {
            for t in 0..h {
                coeffs.push((gen_power[gi][t], -g.cost_marginal));
            }
        }
        for (di, d) in net.demands().iter().enumerate() {
            for t in 0..h {
                coeffs.push((served[di][t], d.voll * demand[di][t]));
            }
        }
        self.model
            .add_constraint(format!("phidef_{tag}"), coeffs, Sense::Eq, shed_base);

        DispatchVars {
            gen_power,
            theta,
            flow,
            served,
            cost,
        }
    }

    /// Daily wildfire risk budget over the shut-off decisions, plus an
    /// optional cap on the number of energized NZR lines.
    pub fn add_risk_budget(
        &mut self,
        scen_set: &OutageScenarioSet,
        risk: &RiskProfile,
        zminus: &[ZMinus],
        max_active: Option<usize>,
    ) {
        let mut coeffs = Vec::new();
        let mut fixed_risk = 0.0;
        let mut fixed_count = 0usize;
        for (k, &line) in scen_set.nzr_lines.iter().enumerate() {
            let r = risk.risk_of(line);
            match zminus[k] {
                ZMinus::Fixed(true) => {
                    fixed_risk += r;
                    fixed_count += 1;
                }
                ZMinus::Fixed(false) => {}
                ZMinus::Var(v) => coeffs.push((v, r)),
            }
        }
        if !coeffs.is_empty() {
            self.model.add_constraint(
                "risk_budget",
                coeffs.clone(),
                Sense::Le,
                risk.risk_tolerance - fixed_risk,
            );
        } else {
            debug_assert!(fixed_risk <= risk.risk_tolerance + 1e-9);
        }
        if let Some(cap) = max_active {
            let count_coeffs: Vec<(VarId, f64)> = scen_set
                .nzr_lines
                .iter()
                .enumerate()
                .filter_map(|(k, _)| match zminus[k] {
                    ZMinus::Var(v) => Some((v, 1.0)),
                    ZMinus::Fixed(_) => None,
                })
                .collect();
            if !count_coeffs.is_empty() {
                self.model.add_constraint(
                    "active_line_cap",
                    count_coeffs,
                    Sense::Le,
                    cap as f64 - fixed_count as f64,
                );
            } else {
                debug_assert!(fixed_count <= cap);
            }
        }
    }
}

#[cfg(test)]
mod tests;
