//! Shared fixture loading and oracle helpers for the integration suites.

use std::path::PathBuf;

use psps_core::formulation::{CommitRepr, ModelBuilder, ZMinus};
use psps_core::grid::{load_network, Network};
use psps_core::outage::{build_scenarios, OutageScenarioSet, RiskMode, RiskProfile};
use psps_core::planners::{PlannerConfig, PlannerContext};
use psps_milp::{solve, MilpStatus, SolveOptions};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> Network {
    load_network(&fixture_path(name)).expect("fixture loads")
}

pub struct Setup {
    pub net: Network,
    pub scen_set: OutageScenarioSet,
    pub risk: RiskProfile,
}

pub fn setup(name: &str, mode: RiskMode, nzr_cap: usize, risk_tolerance: f64) -> Setup {
    let net = load_fixture(name);
    let scen_set = build_scenarios(&net, mode, nzr_cap).expect("scenarios");
    let risk = RiskProfile::new(&net, mode, risk_tolerance);
    Setup {
        net,
        scen_set,
        risk,
    }
}

impl Setup {
    pub fn ctx(&self) -> PlannerContext<'_> {
        PlannerContext {
            net: &self.net,
            scen_set: &self.scen_set,
            risk: &self.risk,
            config: PlannerConfig::default(),
        }
    }

    pub fn ctx_with(&self, config: PlannerConfig) -> PlannerContext<'_> {
        PlannerContext {
            net: &self.net,
            scen_set: &self.scen_set,
            risk: &self.risk,
            config,
        }
    }
}

/// Schedule validity per the min-up/min-down rules, written independently of
/// the constraint encoding: every start pins the unit on for `min_up` steps
/// and every stop pins it off for `min_dn` steps, clipped at the horizon end.
pub fn uc_schedule_valid(schedule: &[bool], init: bool, min_up: usize, min_dn: usize) -> bool {
    let h = schedule.len();
    let mut prev = init;
    for t in 0..h {
        if schedule[t] && !prev {
            for tp in t..(t + min_up).min(h) {
                if !schedule[tp] {
                    return false;
                }
            }
        }
        if !schedule[t] && prev {
            for tp in t..(t + min_dn).min(h) {
                if schedule[tp] {
                    return false;
                }
            }
        }
        prev = schedule[t];
    }
    true
}

/// Start/stop cost of a schedule, computed by transition counting.
pub fn uc_cost_of(net: &Network, schedules: &[Vec<bool>]) -> f64 {
    let mut cost = 0.0;
    for (g, schedule) in net.generators().iter().zip(schedules) {
        let mut prev = g.initial_status;
        for &on in schedule {
            if on && !prev {
                cost += g.cost_up;
            }
            if !on && prev {
                cost += g.cost_dn;
            }
            prev = on;
        }
    }
    cost
}

/// Optimal dispatch cost of one effective line-status vector under frozen
/// commitments; the LP completion used by the brute-force oracles.
pub fn dispatch_cost(
    net: &Network,
    scen_set: &OutageScenarioSet,
    schedules: &[Vec<bool>],
    effective: &[bool],
) -> f64 {
    let mut b = ModelBuilder::new(net);
    let zfixed: Vec<ZMinus> = effective.iter().map(|&z| ZMinus::Fixed(z)).collect();
    let statuses = b.line_statuses(scen_set, &zfixed, &vec![true; effective.len()]);
    let block = b.add_dispatch_block(&CommitRepr::Fixed(schedules), &statuses, "bf");
    b.model.set_objective(block.cost, 1.0);
    let sol = solve(&b.model, &SolveOptions::default()).expect("oracle dispatch");
    assert_eq!(sol.status, MilpStatus::Optimal);
    sol.objective
}

/// All valid schedules of one generator over the horizon.
pub fn valid_schedules(net: &Network, gen_index: usize) -> Vec<Vec<bool>> {
    let g = &net.generators()[gen_index];
    let h = net.horizon();
    (0..(1usize << h))
        .map(|mask| (0..h).map(|t| (mask >> t) & 1 == 1).collect::<Vec<bool>>())
        .filter(|s| uc_schedule_valid(s, g.initial_status, g.min_up, g.min_dn))
        .collect()
}
