//! Hunt the node LP that makes the sparse backend fail on the 24-bus model.

use std::path::PathBuf;

use psps_core::formulation::{CommitRepr, ModelBuilder, ZMinus};
use psps_core::grid::load_network;
use psps_core::outage::{build_scenarios, RiskMode};
use psps_milp::{solve_lp, LpStatus};

fn main() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/rts24.json");
    let net = load_network(&path).unwrap();
    let scen_set = build_scenarios(&net, RiskMode::Svi, 3).unwrap();

    let pattern = vec![false, false, false];
    let mut b = ModelBuilder::new(&net);
    let uc = b.add_uc_block();
    let zminus: Vec<ZMinus> = pattern.iter().map(|&z| ZMinus::Fixed(z)).collect();
    let key = vec![false, false, false];
    let statuses = b.line_statuses(&scen_set, &zminus, &key);
    let blk = b.add_dispatch_block(&CommitRepr::Vars(&uc), &statuses, "c0");
    b.model.set_objective(blk.cost, 1.0);

    let lower: Vec<f64> = b.model.variables.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = b.model.variables.iter().map(|v| v.upper).collect();

    // Simulate a dive: repeatedly fix the most fractional commitment.
    let mut lo = lower.clone();
    let mut up = upper.clone();
    for depth in 0..40 {
        match solve_lp(&b.model, &lo, &up, 1e-7) {
            Ok(sol) => {
                if sol.status != LpStatus::Optimal {
                    eprintln!("depth {depth}: {:?}", sol.status);
                    break;
                }
                let mut pick: Option<(usize, f64, f64)> = None;
                for zs in &uc.commit {
                    for &z in zs {
                        let x = sol.values[z.0];
                        let dist = (x - x.round()).abs();
                        if dist > 1e-6 {
                            match pick {
                                Some((_, _, d)) if dist <= d => {}
                                _ => pick = Some((z.0, x, dist)),
                            }
                        }
                    }
                }
                match pick {
                    None => {
                        eprintln!("depth {depth}: integral, obj {:.2}", sol.objective);
                        break;
                    }
                    Some((j, x, _)) => {
                        let v = x.round();
                        eprintln!(
                            "depth {depth}: obj {:.2}, fixing var {j} ({}) from {x:.4} to {v}",
                            sol.objective,
                            b.model.variables[j].name
                        );
                        lo[j] = v;
                        up[j] = v;
                    }
                }
            }
            Err(e) => {
                eprintln!("depth {depth}: ERROR {e}");
                // Dump the fixing set for reproduction.
                for j in 0..lo.len() {
                    if lo[j] == up[j] && lower[j] != upper[j] {
                        eprintln!("  fixed {} = {}", b.model.variables[j].name, lo[j]);
                    }
                }
                break;
            }
        }
    }
}
