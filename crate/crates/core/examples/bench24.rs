//! Timing probe for the 24-bus fixture: enumeration, one-shot, wait-and-see.

use std::path::PathBuf;
use std::time::Instant;

use psps_core::grid::load_network;
use psps_core::outage::{build_scenarios, RiskMode, RiskProfile};
use psps_core::planners::{
    solve_dr_psps, solve_risk_neutral, solve_wait_and_see, AmbiguityConfig, PlannerConfig,
    PlannerContext, Strategy,
};

fn main() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/rts24.json");
    let net = load_network(&path).unwrap();
    let scen_set = build_scenarios(&net, RiskMode::Svi, 3).unwrap();
    let risk = RiskProfile::new(&net, RiskMode::Svi, f64::INFINITY);
    eprintln!(
        "nzr lines: {:?} wip {:?}",
        scen_set.nzr_lines, scen_set.line_wip0
    );
    let ctx = PlannerContext {
        net: &net,
        scen_set: &scen_set,
        risk: &risk,
        config: PlannerConfig::default(),
    };

    let t = Instant::now();
    let rn = solve_risk_neutral(&ctx).unwrap();
    eprintln!(
        "risk-neutral: obj {:.2} energized {:?} in {:?} (nodes {}, lps {})",
        rn.objective,
        rn.energized,
        t.elapsed(),
        rn.stats.nodes,
        rn.stats.lp_solves
    );

    for kappa in [0.25, 0.99] {
        let t = Instant::now();
        let plan = solve_dr_psps(
            &ctx,
            &AmbiguityConfig {
                kappa,
                strategy: Strategy::Enumeration,
            },
        )
        .unwrap();
        eprintln!(
            "enum kappa={kappa}: obj {:.2} energized {:?} in {:?} (nodes {}, lps {})",
            plan.objective,
            plan.energized,
            t.elapsed(),
            plan.stats.nodes,
            plan.stats.lp_solves
        );
    }

    let t = Instant::now();
    let ws = solve_wait_and_see(&ctx).unwrap();
    eprintln!(
        "wait-and-see: {} scenarios in {:?}; costs {:?}",
        ws.len(),
        t.elapsed(),
        ws.iter().map(|w| w.objective.round()).collect::<Vec<_>>()
    );

    let t = Instant::now();
    let plan = solve_dr_psps(
        &ctx,
        &AmbiguityConfig {
            kappa: 0.5,
            strategy: Strategy::MilpOneShot,
        },
    )
    .unwrap();
    eprintln!(
        "one-shot kappa=0.5: obj {:.2} energized {:?} in {:?} (nodes {}, lps {})",
        plan.objective,
        plan.energized,
        t.elapsed(),
        plan.stats.nodes,
        plan.stats.lp_solves
    );
}
