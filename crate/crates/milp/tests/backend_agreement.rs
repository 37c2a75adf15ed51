//! Dense and sparse LP paths must agree on random bounded LPs, including
//! degenerate and infeasible instances.

use psps_milp::{solve_lp, LpStatus, MilpModel, Sense};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_lp(rng: &mut ChaCha8Rng) -> MilpModel {
    let n = rng.gen_range(2..=8);
    let m = rng.gen_range(1..=8);
    let mut model = MilpModel::new();
    let mut vars = Vec::new();
    for j in 0..n {
        let lo = rng.gen_range(-4.0..0.0f64).round();
        let up = lo + rng.gen_range(1.0..8.0f64).round();
        let cost = (rng.gen_range(-5.0..5.0) * 4.0f64).round() / 4.0;
        vars.push(model.add_continuous(format!("x{j}"), lo, up, cost));
    }
    for i in 0..m {
        let mut coeffs = Vec::new();
        for &v in &vars {
            if rng.gen_bool(0.5) {
                coeffs.push((v, (rng.gen_range(-3.0..3.0) * 4.0f64).round() / 4.0));
            }
        }
        if coeffs.is_empty() {
            coeffs.push((vars[0], 1.0));
        }
        let sense = match rng.gen_range(0..3) {
            0 => Sense::Le,
            1 => Sense::Ge,
            _ => Sense::Eq,
        };
        let rhs = rng.gen_range(-4.0..6.0f64).round();
        model.add_constraint(format!("r{i}"), coeffs, sense, rhs);
    }
    model
}

/// `solve_lp` routes by size; force each path by rebuilding the same model
/// with padding rows so it crosses the dense row limit.
fn pad_to_sparse_backend(model: &MilpModel) -> MilpModel {
    let mut big = model.clone();
    let pad = psps_milp::DENSE_ROW_LIMIT + 1;
    let dummy = big.add_continuous("pad", 0.0, 1.0, 0.0);
    for k in 0..pad {
        big.add_constraint(format!("pad{k}"), vec![(dummy, 1.0)], Sense::Le, 1.0);
    }
    big
}

#[test]
fn dense_and_sparse_agree_on_random_lps() {
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let mut optimal = 0;
    for case in 0..80 {
        let model = random_lp(&mut rng);
        let lower: Vec<f64> = model.variables.iter().map(|v| v.lower).collect();
        let upper: Vec<f64> = model.variables.iter().map(|v| v.upper).collect();
        let dense = solve_lp(&model, &lower, &upper, 1e-7).unwrap();

        let padded = pad_to_sparse_backend(&model);
        let lower_p: Vec<f64> = padded.variables.iter().map(|v| v.lower).collect();
        let upper_p: Vec<f64> = padded.variables.iter().map(|v| v.upper).collect();
        let sparse = solve_lp(&padded, &lower_p, &upper_p, 1e-7).unwrap();

        assert_eq!(dense.status, sparse.status, "case {case}");
        if dense.status == LpStatus::Optimal {
            optimal += 1;
            let denom = 1.0f64.max(dense.objective.abs());
            assert!(
                (dense.objective - sparse.objective).abs() / denom < 1e-7,
                "case {case}: dense {} sparse {}",
                dense.objective,
                sparse.objective
            );
        }
    }
    assert!(optimal >= 25, "generator produced too few optimal LPs");
}
