use psps_milp::{solve, MilpStatus, SolveOptions};

use super::*;
use crate::grid::{Network, NetworkFile};
use crate::outage::{
    decision_probability, enumerate_scenarios, shaping_coefficients, RiskMode,
};

fn net_from(json: &str) -> Network {
    let file: NetworkFile = serde_json::from_str(json).unwrap();
    Network::from_file(file).unwrap()
}

/// Two buses, one line, one generator, six steps; enough to exercise UC.
fn two_bus_h6() -> Network {
    net_from(
        r#"{
        "meta": {"horizon": 6, "mva_base": 100.0},
        "buses": [
            {"id": 1, "is_reference": true},
            {"id": 2}
        ],
        "lines": [{
            "id": 1, "from_bus": 1, "to_bus": 2, "susceptance": 10.0,
            "flow_min": -200.0, "flow_max": 200.0, "wip_base": 0.0
        }],
        "generators": [{
            "id": 1, "bus": 1, "p_min": 20.0, "p_max": 100.0,
            "ramp_min": -100.0, "ramp_max": 100.0,
            "cost_marginal": 10.0, "cost_up": 100.0, "cost_dn": 50.0,
            "min_up": 2, "min_dn": 2, "initial_status": false
        }],
        "demands": [{
            "id": 1, "bus": 2, "voll": 5000.0,
            "profile": {"1": [50.0, 50.0, 50.0, 50.0, 50.0, 50.0]}
        }],
        "demand_scenarios": [{"id": 1, "probability": 1.0}]
    }"#,
    )
}

/// Independent validity rule for a commitment schedule: every start keeps the
/// unit on for `min_up` steps and every stop keeps it off for `min_dn` steps,
/// both clipped at the end of the horizon.
fn uc_schedule_valid(schedule: &[bool], init: bool, min_up: usize, min_dn: usize) -> bool {
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

fn uc_feasible(net: &Network, schedule: &[bool]) -> bool {
    let mut b = ModelBuilder::new(net);
    let uc = b.add_uc_block();
    for (t, &on) in schedule.iter().enumerate() {
        let z = uc.commit[0][t];
        let v = if on { 1.0 } else { 0.0 };
        b.model.variables[z.0].lower = v;
        b.model.variables[z.0].upper = v;
    }
    let sol = solve(&b.model, &SolveOptions::default()).unwrap();
    sol.status == MilpStatus::Optimal
}

#[test]
fn uc_feasibility_matches_brute_force_checker() {
    let net = two_bus_h6();
    let g = &net.generators()[0];
    let mut checked = 0;
    for mask in 0..(1u32 << 6) {
        let schedule: Vec<bool> = (0..6).map(|t| (mask >> t) & 1 == 1).collect();
        let want = uc_schedule_valid(&schedule, g.initial_status, g.min_up, g.min_dn);
        let got = uc_feasible(&net, &schedule);
        assert_eq!(
            got, want,
            "schedule {schedule:?}: solver {got}, checker {want}"
        );
        checked += 1;
    }
    assert_eq!(checked, 64);
}

#[test]
fn min_up_forces_following_steps_on() {
    // A start at the third step must keep the unit on for two steps.
    assert!(uc_schedule_valid(
        &[false, false, true, true, false, false],
        false,
        2,
        2
    ));
    assert!(!uc_schedule_valid(
        &[false, false, true, false, false, false],
        false,
        2,
        2
    ));
    let net = two_bus_h6();
    assert!(uc_feasible(&net, &[false, false, true, true, false, false]));
    assert!(!uc_feasible(&net, &[false, false, true, false, false, false]));
}

#[test]
fn constant_schedule_needs_no_transitions() {
    let net = two_bus_h6();
    assert!(uc_feasible(&net, &[false; 6]));
    // Always-on from a cold start requires one start; still valid.
    assert!(uc_feasible(&net, &[true; 6]));
}

fn one_bus_net() -> Network {
    net_from(
        r#"{
        "meta": {"horizon": 1, "mva_base": 100.0},
        "buses": [{"id": 1, "is_reference": true}, {"id": 2}],
        "lines": [{
            "id": 1, "from_bus": 1, "to_bus": 2, "susceptance": 10.0,
            "flow_min": -500.0, "flow_max": 500.0, "wip_base": 0.01,
            "svi": 1.0, "impact": 100.0
        }],
        "generators": [{
            "id": 1, "bus": 1, "p_min": 0.0, "p_max": 300.0,
            "ramp_min": -300.0, "ramp_max": 300.0,
            "cost_marginal": 10.0, "cost_up": 0.0, "cost_dn": 0.0,
            "min_up": 1, "min_dn": 1, "initial_status": true
        }],
        "demands": [
            {"id": 1, "bus": 1, "voll": 5000.0, "profile": {"1": [150.0]}},
            {"id": 2, "bus": 2, "voll": 5000.0, "profile": {"1": [100.0]}}
        ],
        "demand_scenarios": [{"id": 1, "probability": 1.0}]
    }"#,
    )
}

#[test]
fn single_bus_dispatch_serves_local_demand() {
    let net = one_bus_net();
    let scen = crate::outage::build_scenarios(&net, RiskMode::Svi, 12).unwrap();
    let mut b = ModelBuilder::new(&net);
    let uc = b.add_uc_block();
    let zminus = b.add_line_decisions(&scen, Some(&[true]));
    let statuses = b.line_statuses(&scen, &zminus, &[true]);
    let block = b.add_dispatch_block(&CommitRepr::Vars(&uc), &statuses, "s0");
    b.model.set_objective(block.cost, 1.0);
    let sol = solve(&b.model, &SolveOptions::default()).unwrap();
    assert_eq!(sol.status, MilpStatus::Optimal);
    // 250 MW total served at marginal cost 10.
    assert!(
        (sol.objective - 2500.0).abs() < 1e-6,
        "objective {} phi {} p {} x ({}, {}) z {}",
        sol.objective,
        sol.value(block.cost),
        sol.value(block.gen_power[0][0]),
        sol.value(block.served[0][0]),
        sol.value(block.served[1][0]),
        sol.value(uc.commit[0][0]),
    );
    assert!((sol.value(block.served[0][0]) - 1.0).abs() < 1e-7);
    assert!((sol.value(block.served[1][0]) - 1.0).abs() < 1e-7);
}

#[test]
fn damaged_line_forces_shedding_at_voll() {
    let net = one_bus_net();
    let scen = crate::outage::build_scenarios(&net, RiskMode::Svi, 12).unwrap();
    let mut b = ModelBuilder::new(&net);
    let uc = b.add_uc_block();
    let zminus = b.add_line_decisions(&scen, Some(&[true]));
    // Scenario where the only line to bus 2 is damaged.
    let statuses = b.line_statuses(&scen, &zminus, &[false]);
    let block = b.add_dispatch_block(&CommitRepr::Vars(&uc), &statuses, "s0");
    b.model.set_objective(block.cost, 1.0);
    let sol = solve(&b.model, &SolveOptions::default()).unwrap();
    assert_eq!(sol.status, MilpStatus::Optimal);
    // Bus 1 served at 10 $/MWh, bus 2 fully shed at 5000 $/MWh.
    assert!((sol.objective - (1500.0 + 500_000.0)).abs() < 1e-5);
    assert!(sol.value(block.served[1][0]) < 1e-7);
}

/// Independent DC power flow: solve the reduced angle system directly and
/// compare flows with the LP solution on a 3-bus triangle.
#[test]
fn triangle_flows_match_direct_linear_solve() {
    let net = net_from(
        r#"{
        "meta": {"horizon": 1, "mva_base": 100.0},
        "buses": [{"id": 1, "is_reference": true}, {"id": 2}, {"id": 3}],
        "lines": [
            {"id": 1, "from_bus": 1, "to_bus": 2, "susceptance": 10.0,
             "flow_min": -500.0, "flow_max": 500.0, "wip_base": 0.0},
            {"id": 2, "from_bus": 1, "to_bus": 3, "susceptance": 10.0,
             "flow_min": -500.0, "flow_max": 500.0, "wip_base": 0.0},
            {"id": 3, "from_bus": 2, "to_bus": 3, "susceptance": 10.0,
             "flow_min": -500.0, "flow_max": 500.0, "wip_base": 0.0}
        ],
        "generators": [{
            "id": 1, "bus": 1, "p_min": 0.0, "p_max": 300.0,
            "ramp_min": -300.0, "ramp_max": 300.0,
            "cost_marginal": 10.0, "cost_up": 0.0, "cost_dn": 0.0,
            "min_up": 1, "min_dn": 1, "initial_status": true
        }],
        "demands": [
            {"id": 1, "bus": 2, "voll": 5000.0, "profile": {"1": [90.0]}},
            {"id": 2, "bus": 3, "voll": 5000.0, "profile": {"1": [60.0]}}
        ],
        "demand_scenarios": [{"id": 1, "probability": 1.0}]
    }"#,
    );
    let scen = crate::outage::build_scenarios(&net, RiskMode::Svi, 12).unwrap();
    let mut b = ModelBuilder::new(&net);
    let uc = b.add_uc_block();
    let zminus = b.add_line_decisions(&scen, None);
    let statuses = b.line_statuses(&scen, &zminus, &[]);
    let block = b.add_dispatch_block(&CommitRepr::Vars(&uc), &statuses, "s0");
    b.model.set_objective(block.cost, 1.0);
    let sol = solve(&b.model, &SolveOptions::default()).unwrap();
    assert_eq!(sol.status, MilpStatus::Optimal);

    // Oracle: injections P = (150, -90, -60); with theta_1 = 0 solve
    //   [B22 B23; B32 B33] [th2, th3]' = [P2, P3]'
    // for the triangle with b = 10 pu * 100 MVA = 1000 MW/rad per line.
    let b_mw = 1000.0;
    let (p2, p3) = (-90.0, -60.0);
    let (a, bb, c, d) = (2.0 * b_mw, -b_mw, -b_mw, 2.0 * b_mw);
    let det = a * d - bb * c;
    let th2 = (p2 * d - bb * p3) / det;
    let th3 = (a * p3 - p2 * c) / det;
    let f12 = b_mw * (0.0 - th2);
    let f13 = b_mw * (0.0 - th3);
    let f23 = b_mw * (th2 - th3);
    assert!((sol.value(block.flow[0][0]) - f12).abs() < 1e-6);
    assert!((sol.value(block.flow[1][0]) - f13).abs() < 1e-6);
    assert!((sol.value(block.flow[2][0]) - f23).abs() < 1e-6);
    // Served everywhere; generation covers the full 150 MW.
    assert!((sol.value(block.gen_power[0][0]) - 150.0).abs() < 1e-6);
}

#[test]
fn shed_cost_arithmetic_matches_voll() {
    // x = 0.9 on a 100 MW demand for one hour at 5000 $/MWh -> 50,000 $.
    let net = net_from(
        r#"{
        "meta": {"horizon": 1, "mva_base": 100.0},
        "buses": [{"id": 1, "is_reference": true}, {"id": 2}],
        "lines": [{"id": 1, "from_bus": 1, "to_bus": 2, "susceptance": 5.0,
                   "flow_min": -400.0, "flow_max": 400.0, "wip_base": 0.0}],
        "generators": [{
            "id": 1, "bus": 1, "p_min": 0.0, "p_max": 400.0,
            "ramp_min": -400.0, "ramp_max": 400.0,
            "cost_marginal": 10.0, "cost_up": 400.0, "cost_dn": 0.0,
            "min_up": 1, "min_dn": 1, "initial_status": true
        }],
        "demands": [{"id": 1, "bus": 2, "voll": 5000.0, "profile": {"1": [100.0]}}],
        "demand_scenarios": [{"id": 1, "probability": 1.0}]
    }"#,
    );
    let scen = crate::outage::build_scenarios(&net, RiskMode::Svi, 12).unwrap();
    let mut b = ModelBuilder::new(&net);
    let uc = b.add_uc_block();
    let zminus = b.add_line_decisions(&scen, None);
    let statuses = b.line_statuses(&scen, &zminus, &[]);
    let block = b.add_dispatch_block(&CommitRepr::Vars(&uc), &statuses, "s0");
    b.model.set_objective(block.cost, 1.0);
    // Pin the served fraction at 0.9.
    let x = block.served[0][0];
    b.model.variables[x.0].lower = 0.9;
    b.model.variables[x.0].upper = 0.9;
    let sol = solve(&b.model, &SolveOptions::default()).unwrap();
    assert_eq!(sol.status, MilpStatus::Optimal);
    let phi = sol.value(block.cost);
    // 90 MW generated at 10 plus 10 MW shed at 5000.
    assert!((phi - (900.0 + 50_000.0)).abs() < 1e-6);
}

#[test]
fn risk_budget_limits_energized_lines() {
    let net = one_bus_net();
    let scen = enumerate_scenarios(&[1], &[0.01], &[1.0], 12).unwrap();
    let mut b = ModelBuilder::new(&net);
    let zminus = b.add_line_decisions(&scen, None);
    let risk = crate::outage::RiskProfile {
        line_risk: vec![10.0],
        risk_tolerance: 0.0,
        mode: RiskMode::Svi,
    };
    b.add_risk_budget(&scen, &risk, &zminus, None);
    // Zero tolerance forces the line off.
    if let ZMinus::Var(z) = zminus[0] {
        b.model.set_objective(z, -1.0); // prefer energized if allowed
    }
    let sol = solve(&b.model, &SolveOptions::default()).unwrap();
    if let ZMinus::Var(z) = zminus[0] {
        assert!(sol.value(z) < 1e-7);
    }
}

#[test]
fn risk_budget_counting_cases() {
    // R = (10, 10, 10): tolerance 20 admits at most two lines, tolerance 30
    // is vacuous, tolerance 0 shuts everything.
    let count_max = |tol: f64| -> usize {
        let net = one_bus_net();
        let scen = enumerate_scenarios(&[1], &[0.01], &[1.0], 12).unwrap();
        let mut b = ModelBuilder::new(&net);
        // Build three decision variables by hand on the same line id.
        let zs: Vec<ZMinus> = (0..3)
            .map(|k| ZMinus::Var(b.model.add_binary(format!("zl{k}"), -1.0)))
            .collect();
        let mut coeffs = Vec::new();
        for z in &zs {
            if let ZMinus::Var(v) = z {
                coeffs.push((*v, 10.0));
            }
        }
        b.model.add_constraint("risk_budget", coeffs, Sense::Le, tol);
        let _ = scen;
        let sol = solve(&b.model, &SolveOptions::default()).unwrap();
        zs.iter()
            .map(|z| match z {
                ZMinus::Var(v) => sol.value(*v).round() as usize,
                _ => 0,
            })
            .sum()
    };
    assert_eq!(count_max(20.0), 2);
    assert_eq!(count_max(30.0), 3);
    assert_eq!(count_max(0.0), 0);
}

#[test]
fn shaping_reproduces_closed_form_for_every_pattern() {
    let wip0 = [0.01383, 0.01807, 0.0222];
    let wip1 = [1.0, 1.0, 1.0];
    let lines = [4u32, 11, 17];
    let set = enumerate_scenarios(&lines, &wip0, &wip1, 12).unwrap();
    let coeffs = shaping_coefficients(&lines, &wip0, &wip1).unwrap();
    let net = one_bus_net();

    for pattern in 0..8usize {
        let z: Vec<bool> = (0..3).map(|k| (pattern >> (2 - k)) & 1 == 1).collect();
        let mut b = ModelBuilder::new(&net);
        let zminus: Vec<ZMinus> = z.iter().map(|&v| ZMinus::Fixed(v)).collect();
        let pi_l = add_shaping_block(&mut b, &set, &coeffs, &zminus);
        let sol = solve(&b.model, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, MilpStatus::Optimal, "pattern {z:?}");
        for (s, scen) in set.scenarios.iter().enumerate() {
            let want = decision_probability(&z, &scen.xi, &wip0, &wip1).unwrap();
            let got = sol.value(pi_l[s]);
            assert!(
                (got - want).abs() < 1e-8,
                "pattern {z:?} scenario {s}: shaping {got} vs product {want}"
            );
        }
    }
}

#[test]
fn shaping_hand_case_two_lines() {
    // wip0 = (0.1, 0.2), perfect shut-offs, z = (on, off):
    // (xi1,xi2): (0,0) -> 0.1, (0,1) -> 0, (1,0) -> 0.9, (1,1) -> 0.
    let wip0 = [0.1, 0.2];
    let wip1 = [1.0, 1.0];
    let lines = [1u32, 2];
    let set = enumerate_scenarios(&lines, &wip0, &wip1, 12).unwrap();
    let coeffs = shaping_coefficients(&lines, &wip0, &wip1).unwrap();
    let net = one_bus_net();
    let mut b = ModelBuilder::new(&net);
    let zminus = vec![ZMinus::Fixed(true), ZMinus::Fixed(false)];
    let pi_l = add_shaping_block(&mut b, &set, &coeffs, &zminus);
    let sol = solve(&b.model, &SolveOptions::default()).unwrap();
    let want = [0.1, 0.0, 0.9, 0.0];
    for (s, &w) in want.iter().enumerate() {
        assert!((sol.value(pi_l[s]) - w).abs() < 1e-9, "scenario {s}");
    }
}

fn dual_value(costs: &[f64], probs: &[f64], kappa: f64) -> f64 {
    let net = one_bus_net();
    let mut b = ModelBuilder::new(&net);
    let ub = 10.0 * costs.iter().fold(1.0f64, |a, &c| a.max(c));
    let phi: Vec<VarId> = costs
        .iter()
        .enumerate()
        .map(|(s, &c)| b.model.add_continuous(format!("phi{s}"), c, c, 0.0))
        .collect();
    add_dro_dual_block(&mut b, probs, &phi, kappa, ub);
    let sol = solve(&b.model, &SolveOptions::default()).unwrap();
    assert_eq!(sol.status, MilpStatus::Optimal);
    sol.objective
}

#[test]
fn dual_block_recovers_expectation_at_kappa_zero() {
    let v = dual_value(&[10.0, 20.0, 30.0], &[1.0 / 3.0; 3], 0.0);
    assert!((v - 20.0).abs() < 1e-9);
}

#[test]
fn dual_block_recovers_max_at_kappa_one() {
    let v = dual_value(&[10.0, 20.0, 30.0], &[1.0 / 3.0; 3], 1.0);
    assert!((v - 30.0).abs() < 1e-8);
}

#[test]
fn dual_block_matches_transport_oracle_on_spec_example() {
    // Move 1/3 of mass from cost 10 and 1/6 from cost 20 onto cost 30.
    let costs = [10.0, 20.0, 30.0];
    let probs = [1.0 / 3.0; 3];
    let v = dual_value(&costs, &probs, 0.5);
    assert!((v - 28.0 - 1.0 / 3.0).abs() < 1e-8, "got {v}");
    let oracle = transport_worst_case(&costs, &probs, 0.5);
    assert!((v - oracle).abs() < 1e-9);
}
