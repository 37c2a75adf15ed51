//! Bounded-variable revised simplex with a dense basis inverse.
//!
//! Two phases: artificial variables cover rows whose slack cannot absorb the
//! initial residual, then the original objective is minimized. The basis
//! inverse is refactorized from scratch every [`REFACTOR_INTERVAL`] pivots to
//! bound numerical drift, and pricing falls back to Bland's rule after a run
//! of degenerate steps to break cycles.

use crate::model::{MilpModel, Sense};
use crate::{LpSolution, LpStatus, MilpError};

const REFACTOR_INTERVAL: usize = 50;
const PIVOT_TOL: f64 = 1e-9;
const DEGEN_STEP_TOL: f64 = 1e-11;

#[derive(Clone, Copy, PartialEq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Free variable resting at zero.
    Free,
}

struct Tableau {
    /// Column-major sparse constraint matrix over all columns.
    cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    n_structural: usize,
    n_rows: usize,
    /// Column index of the artificial for each row, if one was added.
    artificials: Vec<Option<usize>>,
}

pub struct DenseSimplex {
    tab: Tableau,
    state: Vec<VarState>,
    value: Vec<f64>,
    basis: Vec<usize>,
    /// Dense basis inverse, row-major `n_rows x n_rows`.
    binv: Vec<f64>,
    pivots_since_refactor: usize,
    degenerate_run: usize,
    bland: bool,
    feas_tol: f64,
}

impl DenseSimplex {
    /// Solves the LP relaxation of `model` under the effective bounds
    /// `lower`/`upper` (same length as the model's variable list).
    pub fn solve(
        model: &MilpModel,
        lower: &[f64],
        upper: &[f64],
    ) -> Result<LpSolution, MilpError> {
        let n = model.num_vars();
        let m = model.num_constraints();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut lo = lower.to_vec();
        let mut up = upper.to_vec();
        let mut cost: Vec<f64> = model.variables.iter().map(|v| v.objective).collect();
        let mut rhs = Vec::with_capacity(m);

        for (i, c) in model.constraints.iter().enumerate() {
            for &(v, coef) in &c.coeffs {
                cols[v.0].push((i, coef));
            }
            rhs.push(c.rhs);
        }
        // One slack per row; its bounds encode the sense.
        for (i, c) in model.constraints.iter().enumerate() {
            let (sl, su) = match c.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            cols.push(vec![(i, 1.0)]);
            lo.push(sl);
            up.push(su);
            cost.push(0.0);
        }

        for (j, (&l, &u)) in lo.iter().zip(up.iter()).enumerate() {
            if l > u + 1e-12 {
                // Bound crossing (e.g. from branch fixings): trivially infeasible.
                let _ = j;
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    objective: f64::INFINITY,
                    values: vec![0.0; n],
                });
            }
        }

        let tab = Tableau {
            cols,
            lower: lo,
            upper: up,
            cost,
            rhs,
            n_structural: n,
            n_rows: m,
            artificials: vec![None; m],
        };
        let mut s = DenseSimplex {
            tab,
            state: Vec::new(),
            value: Vec::new(),
            basis: Vec::new(),
            binv: Vec::new(),
            pivots_since_refactor: 0,
            degenerate_run: 0,
            bland: false,
            feas_tol: 1e-7,
        };
        s.run(model)
    }

    fn run(&mut self, model: &MilpModel) -> Result<LpSolution, MilpError> {
        self.initialize();
        let n = self.tab.n_structural;
        let m = self.tab.n_rows;

        if m > 0 {
            // Phase 1: minimize the sum of artificials.
            let mut phase1_cost = vec![0.0; self.tab.cols.len()];
            for art in self.tab.artificials.iter().flatten() {
                phase1_cost[*art] = 1.0;
            }
            let status = self.optimize(&phase1_cost, true)?;
            if status == LpStatus::Unbounded {
                return Err(MilpError::Numerical(
                    "phase-1 objective reported unbounded".into(),
                ));
            }
            let infeas: f64 = self
                .tab
                .artificials
                .iter()
                .flatten()
                .map(|&a| self.value[a])
                .sum();
            if infeas > self.feas_tol * (1.0 + self.rhs_scale()) {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    objective: f64::INFINITY,
                    values: vec![0.0; n],
                });
            }
            self.drive_out_artificials()?;
        }

        // Phase 2: original objective; artificials are pinned at zero.
        for art in self.tab.artificials.iter().flatten().copied().collect::<Vec<_>>() {
            self.tab.lower[art] = 0.0;
            self.tab.upper[art] = 0.0;
        }
        let phase2_cost = self.tab.cost.clone();
        let status = self.optimize(&phase2_cost, false)?;
        if status == LpStatus::Unbounded {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                objective: f64::NEG_INFINITY,
                values: vec![0.0; n],
            });
        }

        let values: Vec<f64> = self.value[..n].to_vec();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            objective: model.objective_value(&values),
            values,
        })
    }

    fn rhs_scale(&self) -> f64 {
        self.tab.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()))
    }

    fn initialize(&mut self) {
        let total = self.tab.cols.len();
        let m = self.tab.n_rows;
        self.state = vec![VarState::AtLower; total];
        self.value = vec![0.0; total];
        for j in 0..total {
            let (l, u) = (self.tab.lower[j], self.tab.upper[j]);
            let (st, v) = if l.is_infinite() && u.is_infinite() {
                (VarState::Free, 0.0)
            } else if l.is_infinite() {
                (VarState::AtUpper, u)
            } else if u.is_infinite() || l.abs() <= u.abs() {
                (VarState::AtLower, l)
            } else {
                (VarState::AtUpper, u)
            };
            self.state[j] = st;
            self.value[j] = v;
        }

        // Residual each row must cover once every column sits at its bound.
        let mut resid = self.tab.rhs.clone();
        for (j, col) in self.tab.cols.iter().enumerate() {
            if self.value[j] != 0.0 {
                for &(i, a) in col {
                    resid[i] -= a * self.value[j];
                }
            }
        }

        self.basis = Vec::with_capacity(m);
        for i in 0..m {
            let slack = self.tab.n_structural + i;
            let r = resid[i] + self.value[slack]; // slack currently at its start value
            let (sl, su) = (self.tab.lower[slack], self.tab.upper[slack]);
            if r >= sl && r <= su {
                self.state[slack] = VarState::Basic;
                self.value[slack] = r;
                self.basis.push(slack);
            } else {
                // Slack pinned at the bound nearest the residual; artificial
                // with unit column (signed) covers the rest.
                let pinned = r.clamp(sl, su);
                let pinned = if pinned.is_nan() { 0.0 } else { pinned };
                self.value[slack] = pinned;
                self.state[slack] = if pinned == sl {
                    VarState::AtLower
                } else {
                    VarState::AtUpper
                };
                let gap = r - pinned;
                let art = self.tab.cols.len();
                self.tab.cols.push(vec![(i, gap.signum())]);
                self.tab.lower.push(0.0);
                self.tab.upper.push(f64::INFINITY);
                self.tab.cost.push(0.0);
                self.tab.artificials[i] = Some(art);
                self.state.push(VarState::Basic);
                self.value.push(gap.abs());
                self.basis.push(art);
            }
        }
        self.refactor_identity_start();
    }

    /// The starting basis is slacks/artificials with unit columns, so the
    /// inverse starts as a signed permutation of the identity.
    fn refactor_identity_start(&mut self) {
        let m = self.tab.n_rows;
        self.binv = vec![0.0; m * m];
        for (r, &bj) in self.basis.iter().enumerate() {
            let (row, sign) = self.tab.cols[bj][0];
            debug_assert_eq!(row, r);
            self.binv[r * m + row] = 1.0 / sign;
        }
        self.pivots_since_refactor = 0;
    }

    fn optimize(&mut self, cost: &[f64], phase1: bool) -> Result<LpStatus, MilpError> {
        let m = self.tab.n_rows;
        let total = self.tab.cols.len();
        let iter_cap = 200 * (m + total) + 20_000;
        self.bland = false;
        self.degenerate_run = 0;

        for _iter in 0..iter_cap {
            // BTRAN: y = binv' * c_B
            let mut y = vec![0.0; m];
            for (r, &bj) in self.basis.iter().enumerate() {
                let cb = cost[bj];
                if cb != 0.0 {
                    let row = &self.binv[r * m..(r + 1) * m];
                    for (i, &v) in row.iter().enumerate() {
                        if v != 0.0 {
                            y[i] += cb * v;
                        }
                    }
                }
            }

            let scale = 1.0 + cost.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            let dual_tol = 1e-10 * scale;
            let mut entering: Option<(usize, f64, i8)> = None; // (col, score, direction)
            for j in 0..total {
                if self.state[j] == VarState::Basic {
                    continue;
                }
                // Artificials may never re-enter, and cannot move in phase 2.
                if !phase1 && self.tab.lower[j] == self.tab.upper[j] {
                    continue;
                }
                if phase1 && cost[j] == 0.0 && self.tab.lower[j] == self.tab.upper[j] {
                    continue;
                }
                let d = cost[j]
                    - self.tab.cols[j]
                        .iter()
                        .map(|&(i, a)| y[i] * a)
                        .sum::<f64>();
                let dir: i8 = match self.state[j] {
                    VarState::AtLower if d < -dual_tol => 1,
                    VarState::AtUpper if d > dual_tol => -1,
                    VarState::Free if d.abs() > dual_tol => {
                        if d < 0.0 {
                            1
                        } else {
                            -1
                        }
                    }
                    _ => continue,
                };
                if self.bland {
                    entering = Some((j, d.abs(), dir));
                    break;
                }
                match entering {
                    Some((_, best, _)) if d.abs() <= best => {}
                    _ => entering = Some((j, d.abs(), dir)),
                }
            }

            let Some((q, _, dir)) = entering else {
                return Ok(LpStatus::Optimal); // dual feasible
            };

            // FTRAN: alpha = binv * A_q
            let mut alpha = vec![0.0; m];
            for &(i, a) in &self.tab.cols[q] {
                if a != 0.0 {
                    for r in 0..m {
                        let v = self.binv[r * m + i];
                        if v != 0.0 {
                            alpha[r] += v * a;
                        }
                    }
                }
            }

            let sigma = dir as f64;
            // Ratio test in two passes: find the tightest step, then among
            // rows blocking within a small window pick the largest pivot for
            // stability (lowest basis index under Bland's rule).
            let own_gap = self.tab.upper[q] - self.tab.lower[q];
            let mut blockers: Vec<(usize, f64)> = Vec::new(); // (row, t)
            let mut t_min = own_gap; // may be +inf
            for (r, &bj) in self.basis.iter().enumerate() {
                let coef = sigma * alpha[r];
                let t = if coef > PIVOT_TOL && self.tab.lower[bj].is_finite() {
                    (self.value[bj] - self.tab.lower[bj]).max(0.0) / coef
                } else if coef < -PIVOT_TOL && self.tab.upper[bj].is_finite() {
                    (self.tab.upper[bj] - self.value[bj]).max(0.0) / (-coef)
                } else {
                    continue;
                };
                blockers.push((r, t));
                if t < t_min {
                    t_min = t;
                }
            }
            let window = 1e-9 * (1.0 + if t_min.is_finite() { t_min.abs() } else { 0.0 });
            let mut t_best = t_min;
            let mut leave: Option<usize> = None;
            for &(r, t) in &blockers {
                if t <= t_min + window && self.should_prefer(r, leave, &alpha) {
                    t_best = t;
                    leave = Some(r);
                }
            }
            // A strictly cheaper bound flip overrides a pivot chosen inside
            // the tie window.
            if own_gap < t_best {
                leave = None;
                t_best = own_gap;
            }

            if t_best.is_infinite() {
                return Ok(LpStatus::Unbounded);
            }

            if t_best <= DEGEN_STEP_TOL {
                self.degenerate_run += 1;
                if self.degenerate_run > 2 * (m + 10) {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
                self.bland = false;
            }

            match leave {
                None => {
                    // Bound flip: entering variable crosses to its other bound.
                    let t = t_best * sigma;
                    for (r, &bj) in self.basis.iter().enumerate() {
                        self.value[bj] -= t * alpha[r];
                    }
                    self.value[q] += t;
                    self.state[q] = if dir > 0 {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                }
                Some(r) => {
                    let piv = alpha[r];
                    if piv.abs() < PIVOT_TOL {
                        return Err(MilpError::Numerical(format!(
                            "pivot magnitude {piv:e} below tolerance"
                        )));
                    }
                    let t = t_best * sigma;
                    let old_basic = self.basis[r];
                    for (rr, &bj) in self.basis.iter().enumerate() {
                        self.value[bj] -= t * alpha[rr];
                    }
                    self.value[q] += t;
                    // Snap the leaver exactly onto the bound it hit.
                    let leaving_to_lower = sigma * piv > 0.0;
                    self.value[old_basic] = if leaving_to_lower {
                        self.tab.lower[old_basic]
                    } else {
                        self.tab.upper[old_basic]
                    };
                    self.state[old_basic] = if leaving_to_lower {
                        VarState::AtLower
                    } else {
                        VarState::AtUpper
                    };
                    self.state[q] = VarState::Basic;
                    self.basis[r] = q;

                    // Product-form update of the dense inverse.
                    let mrange = m;
                    let pivot_row: Vec<f64> =
                        self.binv[r * mrange..(r + 1) * mrange].to_vec();
                    for rr in 0..mrange {
                        if rr == r {
                            continue;
                        }
                        let factor = alpha[rr] / piv;
                        if factor != 0.0 {
                            for i in 0..mrange {
                                self.binv[rr * mrange + i] -= factor * pivot_row[i];
                            }
                        }
                    }
                    let inv_piv = 1.0 / piv;
                    for i in 0..mrange {
                        self.binv[r * mrange + i] = pivot_row[i] * inv_piv;
                    }

                    self.pivots_since_refactor += 1;
                    if self.pivots_since_refactor >= REFACTOR_INTERVAL {
                        self.refactor()?;
                    }
                }
            }
        }
        Err(MilpError::Numerical(
            "simplex iteration limit exceeded".into(),
        ))
    }

    /// Tie-break in the ratio test: larger pivot magnitude wins, except under
    /// Bland's rule where the lowest basis position wins.
    fn should_prefer(&self, cand: usize, incumbent: Option<usize>, alpha: &[f64]) -> bool {
        match incumbent {
            None => true,
            Some(inc) => {
                if self.bland {
                    self.basis[cand] < self.basis[inc]
                } else {
                    alpha[cand].abs() > alpha[inc].abs()
                }
            }
        }
    }

    /// Recomputes the dense inverse from the current basis via Gauss-Jordan
    /// with partial pivoting, then recomputes basic values from scratch.
    fn refactor(&mut self) -> Result<(), MilpError> {
        let m = self.tab.n_rows;
        let mut mat = vec![0.0; m * m];
        for (c, &bj) in self.basis.iter().enumerate() {
            for &(i, a) in &self.tab.cols[bj] {
                mat[i * m + c] = a;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv_row = col;
            let mut piv_val = mat[col * m + col].abs();
            for r in (col + 1)..m {
                let v = mat[r * m + col].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val < 1e-12 {
                return Err(MilpError::Numerical("singular basis at refactor".into()));
            }
            if piv_row != col {
                for k in 0..m {
                    mat.swap(col * m + k, piv_row * m + k);
                    inv.swap(col * m + k, piv_row * m + k);
                }
            }
            let piv = mat[col * m + col];
            for k in 0..m {
                mat[col * m + k] /= piv;
                inv[col * m + k] /= piv;
            }
            for r in 0..m {
                if r != col {
                    let f = mat[r * m + col];
                    if f != 0.0 {
                        for k in 0..m {
                            mat[r * m + k] -= f * mat[col * m + k];
                            inv[r * m + k] -= f * inv[col * m + k];
                        }
                    }
                }
            }
        }
        // inv now maps: row `r` of inv solves for basis position of column r.
        // Because we eliminated columns in basis order, inv rows correspond to
        // basis positions directly.
        self.binv = inv;
        self.pivots_since_refactor = 0;

        // Recompute basic values: x_B = binv * (b - N x_N).
        let mut resid = self.tab.rhs.clone();
        for (j, col) in self.tab.cols.iter().enumerate() {
            if self.state[j] != VarState::Basic && self.value[j] != 0.0 {
                for &(i, a) in col {
                    resid[i] -= a * self.value[j];
                }
            }
        }
        for (r, &bj) in self.basis.iter().enumerate() {
            let mut v = 0.0;
            for i in 0..m {
                let w = self.binv[r * m + i];
                if w != 0.0 {
                    v += w * resid[i];
                }
            }
            self.value[bj] = v;
        }
        Ok(())
    }

    /// Pivots basic artificials (at value zero) out of the basis when any
    /// non-artificial column has a nonzero entry in their row; rows that
    /// admit no such column are redundant and keep the artificial pinned.
    fn drive_out_artificials(&mut self) -> Result<(), MilpError> {
        let m = self.tab.n_rows;
        for r in 0..m {
            let bj = self.basis[r];
            let is_art = self.tab.artificials.iter().flatten().any(|&a| a == bj);
            if !is_art {
                continue;
            }
            if self.value[bj].abs() > self.feas_tol {
                continue; // phase 1 failed; caller reports infeasible
            }
            let limit = self.tab.n_structural + m;
            let mut replacement: Option<(usize, f64)> = None;
            for j in 0..limit {
                if self.state[j] == VarState::Basic {
                    continue;
                }
                let mut alpha_r = 0.0;
                for &(i, a) in &self.tab.cols[j] {
                    alpha_r += self.binv[r * m + i] * a;
                }
                if alpha_r.abs() > 1e-7 {
                    replacement = Some((j, alpha_r));
                    break;
                }
            }
            if let Some((q, piv)) = replacement {
                // Degenerate pivot: the artificial is at zero, so values move
                // by nothing; only the basis and inverse change.
                let mut alpha = vec![0.0; m];
                for &(i, a) in &self.tab.cols[q] {
                    for rr in 0..m {
                        alpha[rr] += self.binv[rr * m + i] * a;
                    }
                }
                let entering_value = self.value[q];
                self.state[bj] = VarState::AtLower;
                self.value[bj] = 0.0;
                self.state[q] = VarState::Basic;
                self.basis[r] = q;
                let pivot_row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
                for rr in 0..m {
                    if rr == r {
                        continue;
                    }
                    let factor = alpha[rr] / piv;
                    if factor != 0.0 {
                        for i in 0..m {
                            self.binv[rr * m + i] -= factor * pivot_row[i];
                        }
                    }
                }
                for i in 0..m {
                    self.binv[r * m + i] = pivot_row[i] / piv;
                }
                self.value[q] = entering_value;
                self.pivots_since_refactor += 1;
            }
        }
        self.refactor()
    }
}
