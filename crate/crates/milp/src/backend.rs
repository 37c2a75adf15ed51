//! LP relaxation dispatch.
//!
//! Models up to [`DENSE_ROW_LIMIT`] rows run on the in-crate dense simplex;
//! larger ones go to `microlp`'s sparse simplex. Both paths return the same
//! [`LpSolution`] and every accepted solution is re-checked against the model
//! before it is used for bounding or reporting.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::dense_simplex::DenseSimplex;
use crate::model::{MilpModel, Sense};
use crate::{LpSolution, LpStatus, MilpError};

/// Above this many rows the dense basis inverse stops being economical.
pub const DENSE_ROW_LIMIT: usize = 420;

pub fn solve_lp(
    model: &MilpModel,
    lower: &[f64],
    upper: &[f64],
    feas_tol: f64,
) -> Result<LpSolution, MilpError> {
    for (l, u) in lower.iter().zip(upper) {
        if l > u {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: f64::INFINITY,
                values: vec![0.0; model.num_vars()],
            });
        }
    }
    let sol = if model.num_constraints() <= DENSE_ROW_LIMIT {
        // The sparse backend doubles as a recovery path when the dense basis
        // runs into numerical trouble.
        match DenseSimplex::solve(model, lower, upper) {
            Ok(sol) => sol,
            Err(MilpError::Numerical(_)) => solve_microlp(model, lower, upper)?,
            Err(e) => return Err(e),
        }
    } else {
        solve_microlp(model, lower, upper)?
    };
    if sol.status == LpStatus::Optimal {
        let (viol, row) = worst_violation_under(model, &sol.values, lower, upper);
        if viol > 1e3 * feas_tol {
            return Err(MilpError::Numerical(format!(
                "LP solution violates {row} by relative {viol:e}"
            )));
        }
    }
    Ok(sol)
}

/// Worst relative violation and the offending row (or bound) name. Each row
/// is scaled by its own right-hand side and activity magnitude.
fn worst_violation_under(
    model: &MilpModel,
    values: &[f64],
    lower: &[f64],
    upper: &[f64],
) -> (f64, String) {
    let mut worst: f64 = 0.0;
    let mut name = String::from("bounds");
    for (j, ((x, l), u)) in values.iter().zip(lower).zip(upper).enumerate() {
        let scale = 1.0 + l.abs().min(u.abs());
        let v = (l - x).max(x - u) / scale;
        if v > worst {
            worst = v;
            name = format!("bound of {}", model.variables[j].name);
        }
    }
    for c in &model.constraints {
        let mut lhs = 0.0;
        let mut mag: f64 = 0.0;
        for &(v, co) in &c.coeffs {
            let term = co * values[v.0];
            lhs += term;
            mag = mag.max(term.abs());
        }
        let viol = match c.sense {
            Sense::Le => lhs - c.rhs,
            Sense::Ge => c.rhs - lhs,
            Sense::Eq => (lhs - c.rhs).abs(),
        };
        let rel = viol / (1.0 + c.rhs.abs().max(mag));
        if rel > worst {
            worst = rel;
            name = c.name.clone();
        }
    }
    (worst, name)
}

fn solve_microlp(model: &MilpModel, lower: &[f64], upper: &[f64]) -> Result<LpSolution, MilpError> {
    // Light presolve before handing off: singleton rows fold into bounds and
    // variables pinned by branching substitute into right-hand sides. Both
    // transforms are exact, shrink node LPs as a dive deepens, and strip the
    // degenerate rows that upset the sparse factorization.
    let n = model.num_vars();
    let infeasible = || LpSolution {
        status: LpStatus::Infeasible,
        objective: f64::INFINITY,
        values: vec![0.0; n],
    };
    let mut lo = lower.to_vec();
    let mut up = upper.to_vec();
    let mut dropped = vec![false; model.num_constraints()];
    loop {
        let mut changed = false;
        for (ci, c) in model.constraints.iter().enumerate() {
            if dropped[ci] {
                continue;
            }
            let mut free: Option<(usize, f64)> = None;
            let mut free_count = 0usize;
            let mut fixed_sum = 0.0;
            let mut fixed_mag: f64 = 0.0;
            for &(v, co) in &c.coeffs {
                if lo[v.0] == up[v.0] {
                    let term = co * lo[v.0];
                    fixed_sum += term;
                    fixed_mag = fixed_mag.max(term.abs());
                } else {
                    free_count += 1;
                    free = Some((v.0, co));
                }
            }
            let feas_eps = 1e-9 * (1.0 + c.rhs.abs().max(fixed_mag));
            match free_count {
                0 => {
                    let resid = c.rhs - fixed_sum;
                    let ok = match c.sense {
                        Sense::Le => resid >= -feas_eps,
                        Sense::Ge => resid <= feas_eps,
                        Sense::Eq => resid.abs() <= feas_eps,
                    };
                    if !ok {
                        return Ok(infeasible());
                    }
                    dropped[ci] = true;
                    changed = true;
                }
                1 => {
                    let (j, a) = free.expect("one free column");
                    let bound = (c.rhs - fixed_sum) / a;
                    let tighten_upper = match c.sense {
                        Sense::Le => a > 0.0,
                        Sense::Ge => a < 0.0,
                        Sense::Eq => true,
                    };
                    let tighten_lower = match c.sense {
                        Sense::Le => a < 0.0,
                        Sense::Ge => a > 0.0,
                        Sense::Eq => true,
                    };
                    if tighten_upper && bound < up[j] {
                        up[j] = bound;
                    }
                    if tighten_lower && bound > lo[j] {
                        lo[j] = bound;
                    }
                    if lo[j] > up[j] {
                        let cross_eps = 1e-9 * (1.0 + lo[j].abs().max(up[j].abs()));
                        if lo[j] - up[j] <= cross_eps {
                            let mid = 0.5 * (lo[j] + up[j]);
                            lo[j] = mid;
                            up[j] = mid;
                        } else {
                            return Ok(infeasible());
                        }
                    }
                    dropped[ci] = true;
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }

    if (0..n).all(|j| lo[j] == up[j]) {
        // Fully determined by presolve.
        let values = lo;
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            objective: model.objective_value(&values),
            values,
        });
    }

    // Surviving rows over free columns, with fixed columns substituted.
    struct Row {
        coeffs: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    }
    let mut rows: Vec<Row> = Vec::new();
    for (ci, c) in model.constraints.iter().enumerate() {
        if dropped[ci] {
            continue;
        }
        let mut coeffs = Vec::with_capacity(c.coeffs.len());
        let mut rhs = c.rhs;
        for &(v, co) in &c.coeffs {
            if lo[v.0] == up[v.0] {
                rhs -= co * lo[v.0];
            } else {
                coeffs.push((v.0, co));
            }
        }
        debug_assert!(coeffs.len() >= 2, "presolve left a short row");
        rows.push(Row {
            coeffs,
            sense: c.sense,
            rhs,
        });
    }

    if rows.is_empty() {
        // Box-constrained minimization: each free variable sits at the bound
        // favored by its cost.
        let mut values = lo.clone();
        for j in 0..n {
            if lo[j] != up[j] {
                let c = model.variables[j].objective;
                let pick = if c > 0.0 {
                    lo[j]
                } else if c < 0.0 {
                    up[j]
                } else {
                    lo[j].max(up[j].min(0.0))
                };
                if pick.is_infinite() {
                    return Ok(LpSolution {
                        status: LpStatus::Unbounded,
                        objective: f64::NEG_INFINITY,
                        values: vec![0.0; n],
                    });
                }
                values[j] = pick;
            }
        }
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            objective: model.objective_value(&values),
            values,
        });
    }

    // Equilibration with power-of-two factors (lossless in binary floats):
    // rows first, then columns, to pull every coefficient toward unit size.
    let pow2 = |s: f64| -> f64 {
        if s.is_finite() && s > 0.0 {
            (2.0f64).powi(s.log2().round() as i32)
        } else {
            1.0
        }
    };
    let mut row_scale = vec![1.0f64; rows.len()];
    for (i, r) in rows.iter().enumerate() {
        let max = r
            .coeffs
            .iter()
            .map(|&(_, co)| co.abs())
            .fold(0.0f64, f64::max);
        row_scale[i] = pow2(1.0 / max.max(1e-12));
    }
    let mut col_scale = vec![1.0f64; n];
    let mut col_max = vec![0.0f64; n];
    for (i, r) in rows.iter().enumerate() {
        for &(j, co) in &r.coeffs {
            col_max[j] = col_max[j].max((co * row_scale[i]).abs());
        }
    }
    for j in 0..n {
        if col_max[j] > 0.0 {
            col_scale[j] = pow2(1.0 / col_max[j]);
        }
    }

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let mut vars: Vec<Option<microlp::Variable>> = Vec::with_capacity(n);
    for (j, v) in model.variables.iter().enumerate() {
        if lo[j] == up[j] {
            vars.push(None);
        } else {
            let cs = col_scale[j];
            vars.push(Some(problem.add_var(
                v.objective * cs,
                (lo[j] / cs, up[j] / cs),
            )));
        }
    }
    for (i, r) in rows.iter().enumerate() {
        let expr: Vec<(microlp::Variable, f64)> = r
            .coeffs
            .iter()
            .map(|&(j, co)| {
                (
                    vars[j].expect("free column"),
                    co * row_scale[i] * col_scale[j],
                )
            })
            .collect();
        let op = match r.sense {
            Sense::Le => ComparisonOp::Le,
            Sense::Ge => ComparisonOp::Ge,
            Sense::Eq => ComparisonOp::Eq,
        };
        problem.add_constraint(&expr, op, r.rhs * row_scale[i]);
    }

    match problem.solve() {
        Ok(sol) => {
            let values: Vec<f64> = vars
                .iter()
                .enumerate()
                .map(|(j, v)| match v {
                    Some(mv) => sol[*mv] * col_scale[j],
                    None => lo[j],
                })
                .collect();
            Ok(LpSolution {
                status: LpStatus::Optimal,
                objective: model.objective_value(&values),
                values,
            })
        }
        Err(microlp::Error::Infeasible) => Ok(infeasible()),
        Err(microlp::Error::Unbounded) => Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            values: vec![0.0; n],
        }),
        Err(e) => Err(MilpError::Numerical(format!("sparse LP backend: {e:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_backends_agree_on_a_small_lp() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 0.0, 10.0, 2.0);
        let y = m.add_continuous("y", 0.0, 10.0, 3.0);
        m.add_constraint("cover", vec![(x, 1.0), (y, 1.0)], Sense::Ge, 4.0);
        m.add_constraint("cap", vec![(x, 1.0)], Sense::Le, 3.0);
        let lower: Vec<f64> = m.variables.iter().map(|v| v.lower).collect();
        let upper: Vec<f64> = m.variables.iter().map(|v| v.upper).collect();
        let dense = DenseSimplex::solve(&m, &lower, &upper).unwrap();
        let sparse = solve_microlp(&m, &lower, &upper).unwrap();
        assert_eq!(dense.status, LpStatus::Optimal);
        assert_eq!(sparse.status, LpStatus::Optimal);
        assert!((dense.objective - sparse.objective).abs() < 1e-8);
        // x = 3 exhausts the cheap variable, y covers the rest: 2*3 + 3*1.
        assert!((dense.objective - 9.0).abs() < 1e-8);
    }

    #[test]
    fn fixed_variables_pass_through_both_backends() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 2.0, 2.0, 1.0);
        let y = m.add_continuous("y", 0.0, 5.0, 1.0);
        m.add_constraint("sum", vec![(x, 1.0), (y, 1.0)], Sense::Ge, 3.0);
        let lower: Vec<f64> = m.variables.iter().map(|v| v.lower).collect();
        let upper: Vec<f64> = m.variables.iter().map(|v| v.upper).collect();
        let dense = DenseSimplex::solve(&m, &lower, &upper).unwrap();
        let sparse = solve_microlp(&m, &lower, &upper).unwrap();
        assert!((dense.objective - 3.0).abs() < 1e-8);
        assert!((sparse.objective - 3.0).abs() < 1e-8);
    }
}
