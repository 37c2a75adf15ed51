//! Single-pattern solve instrumentation on the 24-bus fixture.

use std::path::PathBuf;
use std::time::Instant;

use psps_core::formulation::{CommitRepr, ModelBuilder, ZMinus};
use psps_core::grid::load_network;
use psps_core::outage::{build_scenarios, RiskMode};
use psps_milp::{solve, solve_lp, SolveOptions};

fn main() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/rts24.json");
    let net = load_network(&path).unwrap();
    let scen_set = build_scenarios(&net, RiskMode::Svi, 3).unwrap();

    for pattern in [vec![false, false, false], vec![true, true, true]] {
        let mut b = ModelBuilder::new(&net);
        let uc = b.add_uc_block();
        let zminus: Vec<ZMinus> = pattern.iter().map(|&z| ZMinus::Fixed(z)).collect();
        let mut keys: Vec<Vec<bool>> = Vec::new();
        for scen in &scen_set.scenarios {
            let key: Vec<bool> = scen.xi.iter().zip(&pattern).map(|(&x, &z)| x && z).collect();
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        let mut phis = Vec::new();
        for (c, key) in keys.iter().enumerate() {
            let statuses = b.line_statuses(&scen_set, &zminus, key);
            let blk = b.add_dispatch_block(&CommitRepr::Vars(&uc), &statuses, &format!("c{c}"));
            phis.push(blk.cost);
        }
        for &phi in &phis {
            b.model.set_objective(phi, 1.0 / phis.len() as f64);
        }
        eprintln!(
            "pattern {:?}: {} classes, {} rows, {} cols",
            pattern,
            keys.len(),
            b.model.num_constraints(),
            b.model.num_vars()
        );
        let lower: Vec<f64> = b.model.variables.iter().map(|v| v.lower).collect();
        let upper: Vec<f64> = b.model.variables.iter().map(|v| v.upper).collect();
        let t = Instant::now();
        let lp = solve_lp(&b.model, &lower, &upper, 1e-7).unwrap();
        eprintln!(
            "  root LP: {:?} obj {:.2} in {:?}",
            lp.status,
            lp.objective,
            t.elapsed()
        );
        let t = Instant::now();
        let opts = SolveOptions {
            gap_rel: 1e-8,
            node_limit: 2000,
            ..SolveOptions::default()
        };
        let sol = solve(&b.model, &opts).unwrap();
        eprintln!(
            "  MILP: {:?} obj {:.2} nodes {} lps {} in {:?}",
            sol.status,
            sol.objective,
            sol.stats.nodes,
            sol.stats.lp_solves,
            t.elapsed()
        );
    }
}
