//! Branch-and-bound over LP relaxations.
//!
//! Branching picks the most fractional integer variable (ties to the lowest
//! index) and evaluates both children's relaxations immediately: the search
//! plunges into the cheaper child and parks the sibling in a best-bound heap
//! keyed by its own LP objective. Root incumbents come from two rounding
//! heuristics (nearest and all-up) completed by LPs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::backend::solve_lp;
use crate::model::MilpModel;
use crate::{LpSolution, LpStatus, MilpError, MilpSolution, MilpStatus, SolveOptions, SolveStats};

#[derive(Clone)]
struct Node {
    /// Bound overrides accumulated from the root, applied in order.
    fixings: Vec<(usize, f64, f64)>,
    /// This node's own LP objective when already evaluated, else the parent's.
    bound: f64,
    /// LP solution carried into a plunge to avoid re-solving.
    lp: Option<LpSolution>,
    seq: u64,
}

struct HeapEntry(Node);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.0.bound == other.0.bound && self.0.seq == other.0.seq
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap inverted: smallest bound pops first, insertion sequence as
        // the deterministic tie-break.
        other
            .0
            .bound
            .partial_cmp(&self.0.bound)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.0.seq.cmp(&self.0.seq))
    }
}

struct Search<'a> {
    model: &'a MilpModel,
    opts: &'a SolveOptions,
    int_vars: Vec<usize>,
    root_lower: Vec<f64>,
    root_upper: Vec<f64>,
    incumbent: Option<(f64, Vec<f64>)>,
    stats: SolveStats,
    started: Instant,
}

impl<'a> Search<'a> {
    fn cutoff(&self) -> f64 {
        let inc = match &self.incumbent {
            Some((obj, _)) => obj - self.opts.gap_margin(*obj),
            None => f64::INFINITY,
        };
        inc.min(self.opts.cutoff.unwrap_or(f64::INFINITY))
    }

    fn bounds_for(&self, fixings: &[(usize, f64, f64)]) -> (Vec<f64>, Vec<f64>) {
        let mut lower = self.root_lower.clone();
        let mut upper = self.root_upper.clone();
        for &(j, lo, up) in fixings {
            lower[j] = lo;
            upper[j] = up;
        }
        (lower, upper)
    }

    fn solve_node_lp(&mut self, fixings: &[(usize, f64, f64)]) -> Result<LpSolution, MilpError> {
        let (lower, upper) = self.bounds_for(fixings);
        self.stats.lp_solves += 1;
        solve_lp(self.model, &lower, &upper, self.opts.feas_tol)
    }

    fn offer_incumbent(&mut self, objective: f64, values: Vec<f64>) {
        let better = match &self.incumbent {
            Some((cur, _)) => objective < *cur,
            None => true,
        };
        if better {
            self.incumbent = Some((objective, values));
        }
    }

    /// Fix every integer variable to a rounded value and complete with an LP.
    fn rounding_heuristic(&mut self, relax: &[f64], mode_up: bool) -> Result<(), MilpError> {
        let mut lo = self.root_lower.clone();
        let mut up = self.root_upper.clone();
        for &j in &self.int_vars {
            let raw = if mode_up {
                relax[j].ceil()
            } else {
                relax[j].round()
            };
            let v = raw.clamp(self.root_lower[j], self.root_upper[j]);
            lo[j] = v;
            up[j] = v;
        }
        self.stats.lp_solves += 1;
        let lp = solve_lp(self.model, &lo, &up, self.opts.feas_tol)?;
        if lp.status == LpStatus::Optimal {
            self.offer_incumbent(lp.objective, lp.values);
        }
        Ok(())
    }

    /// Fix the caller-supplied assignment and complete with an LP.
    fn hint_heuristic(&mut self) -> Result<(), MilpError> {
        let Some(hint) = self.opts.hint.clone() else {
            return Ok(());
        };
        let mut lo = self.root_lower.clone();
        let mut up = self.root_upper.clone();
        for (var, value) in hint {
            let v = value.clamp(self.root_lower[var.0], self.root_upper[var.0]);
            lo[var.0] = v;
            up[var.0] = v;
        }
        self.stats.lp_solves += 1;
        let lp = solve_lp(self.model, &lo, &up, self.opts.feas_tol)?;
        if lp.status == LpStatus::Optimal {
            // Only accept if genuinely integral on the non-hinted integers.
            if self.most_fractional(&lp.values).is_none() {
                self.offer_incumbent(lp.objective, lp.values);
            }
        }
        Ok(())
    }

    fn most_fractional(&self, values: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for &j in &self.int_vars {
            let x = values[j];
            let dist = (x - x.round()).abs();
            if dist > self.opts.int_tol {
                match best {
                    Some((_, _, d)) if dist <= d => {}
                    _ => best = Some((j, x, dist)),
                }
            }
        }
        best.map(|(j, x, _)| (j, x))
    }
}

pub fn solve(model: &MilpModel, opts: &SolveOptions) -> Result<MilpSolution, MilpError> {
    model.validate()?;
    let n = model.num_vars();
    let mut search = Search {
        model,
        opts,
        int_vars: (0..n).filter(|&j| model.variables[j].is_integer).collect(),
        root_lower: model.variables.iter().map(|v| v.lower).collect(),
        root_upper: model.variables.iter().map(|v| v.upper).collect(),
        incumbent: None,
        stats: SolveStats::default(),
        started: Instant::now(),
    };

    if !search.int_vars.is_empty() {
        search.hint_heuristic()?;
    }

    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut seq: u64 = 0;
    let mut dive: Option<Node> = None;
    heap.push(HeapEntry(Node {
        fixings: Vec::new(),
        bound: f64::NEG_INFINITY,
        lp: None,
        seq,
    }));
    seq += 1;

    let mut hit_limit = false;
    let mut root_bound = f64::NEG_INFINITY;
    loop {
        let mut node = match dive.take() {
            Some(nd) => nd,
            None => match heap.pop() {
                Some(HeapEntry(nd)) => nd,
                None => break,
            },
        };
        if node.bound >= search.cutoff() {
            continue;
        }
        let over_time = opts
            .time_limit
            .map(|limit| search.started.elapsed() >= limit)
            .unwrap_or(false);
        if search.stats.nodes >= opts.node_limit || over_time {
            hit_limit = true;
            heap.push(HeapEntry(node));
            break;
        }
        search.stats.nodes += 1;

        let lp = match node.lp.take() {
            Some(lp) => lp,
            None => search.solve_node_lp(&node.fixings)?,
        };
        match lp.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                // A continuous recession direction survives integer fixings.
                return Ok(MilpSolution {
                    status: MilpStatus::Unbounded,
                    objective: f64::NEG_INFINITY,
                    values: vec![0.0; n],
                    bound_gap: f64::INFINITY,
                    stats: search.stats,
                });
            }
            LpStatus::Optimal => {}
        }
        if node.fixings.is_empty() {
            root_bound = lp.objective;
        }
        if lp.objective >= search.cutoff() {
            continue;
        }

        match search.most_fractional(&lp.values) {
            None => {
                search.offer_incumbent(lp.objective, lp.values);
            }
            Some((j, xj)) => {
                if node.fixings.is_empty() && !search.int_vars.is_empty() {
                    search.rounding_heuristic(&lp.values, false)?;
                    search.rounding_heuristic(&lp.values, true)?;
                }

                let floor = xj.floor();
                let (lo_j, up_j) = {
                    let (lower, upper) = search.bounds_for(&node.fixings);
                    (lower[j], upper[j])
                };
                let mut down_fix = node.fixings.clone();
                down_fix.push((j, lo_j, floor));
                let mut up_fix = node.fixings.clone();
                up_fix.push((j, floor + 1.0, up_j));

                // Evaluate both children now: their true objectives order the
                // plunge and sharpen the best-bound heap.
                let down_lp = search.solve_node_lp(&down_fix)?;
                let up_lp = search.solve_node_lp(&up_fix)?;
                let mut children: Vec<Node> = Vec::new();
                for (fixings, lp) in [(down_fix, down_lp), (up_fix, up_lp)] {
                    match lp.status {
                        LpStatus::Infeasible => continue,
                        LpStatus::Unbounded => {
                            return Ok(MilpSolution {
                                status: MilpStatus::Unbounded,
                                objective: f64::NEG_INFINITY,
                                values: vec![0.0; n],
                                bound_gap: f64::INFINITY,
                                stats: search.stats,
                            });
                        }
                        LpStatus::Optimal => {}
                    }
                    if lp.objective >= search.cutoff() {
                        continue;
                    }
                    children.push(Node {
                        fixings,
                        bound: lp.objective,
                        lp: Some(lp),
                        seq,
                    });
                    seq += 1;
                }
                children.sort_by(|a, b| {
                    a.bound
                        .partial_cmp(&b.bound)
                        .unwrap_or(Ordering::Equal)
                        .then_with(|| a.seq.cmp(&b.seq))
                });
                let mut iter = children.into_iter();
                if let Some(first) = iter.next() {
                    dive = Some(first);
                }
                for mut rest in iter {
                    // Parked siblings drop their LP payload; it is re-solved
                    // only if the node survives pruning.
                    rest.lp = None;
                    heap.push(HeapEntry(rest));
                }
            }
        }
    }

    search.stats.elapsed = search.started.elapsed();
    let global_lower = {
        let mut lo = match (&dive, heap.peek()) {
            (Some(nd), Some(HeapEntry(h))) => nd.bound.min(h.bound),
            (Some(nd), None) => nd.bound,
            (None, Some(HeapEntry(h))) => h.bound,
            (None, None) => f64::INFINITY,
        };
        if let Some((obj, _)) = &search.incumbent {
            lo = lo.min(*obj);
        }
        if lo == f64::NEG_INFINITY {
            lo = root_bound;
        }
        lo
    };

    let stats = search.stats.clone();
    match search.incumbent {
        Some((obj, values)) => {
            let gap = (obj - global_lower).max(0.0);
            let status = if hit_limit {
                MilpStatus::GapLimit
            } else {
                MilpStatus::Optimal
            };
            Ok(MilpSolution {
                status,
                objective: obj,
                values,
                bound_gap: if hit_limit {
                    gap
                } else {
                    gap.min(opts.gap_margin(obj))
                },
                stats,
            })
        }
        None => Ok(MilpSolution {
            status: if hit_limit {
                MilpStatus::GapLimit
            } else {
                MilpStatus::Infeasible
            },
            objective: f64::INFINITY,
            values: vec![0.0; n],
            bound_gap: if hit_limit { f64::INFINITY } else { 0.0 },
            stats,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sense;

    #[test]
    fn knapsack_matches_brute_force() {
        // min -(3 x1 + 4 x2), binary, 2 x1 + 3 x2 <= 4.
        // Brute force over the four points gives (0,1) at -4.
        let mut m = MilpModel::new();
        let x1 = m.add_binary("x1", -3.0);
        let x2 = m.add_binary("x2", -4.0);
        m.add_constraint("w", vec![(x1, 2.0), (x2, 3.0)], Sense::Le, 4.0);
        let sol = solve(&m, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, MilpStatus::Optimal);
        assert!((sol.objective + 4.0).abs() < 1e-8);
        assert!(sol.values[x1.0] < 1e-6);
        assert!((sol.values[x2.0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn infeasible_bounds_detected() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", f64::NEG_INFINITY, f64::INFINITY, 0.0);
        m.add_constraint("ge", vec![(x, 1.0)], Sense::Ge, 1.0);
        m.add_constraint("le", vec![(x, 1.0)], Sense::Le, 0.0);
        let sol = solve(&m, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, MilpStatus::Infeasible);
    }

    #[test]
    fn node_limit_reports_gap_limit() {
        let mut m = MilpModel::new();
        let vars: Vec<_> = (0..10)
            .map(|i| m.add_binary(format!("b{i}"), -1.0))
            .collect();
        let mut coeffs: Vec<(crate::VarId, f64)> = Vec::new();
        for (i, &v) in vars.iter().enumerate() {
            coeffs.push((v, 1.0 + 0.01 * i as f64));
        }
        m.add_constraint("half", coeffs, Sense::Le, 4.55);
        let opts = SolveOptions {
            node_limit: 1,
            ..SolveOptions::default()
        };
        let sol = solve(&m, &opts).unwrap();
        assert_eq!(sol.status, MilpStatus::GapLimit);
    }

    #[test]
    fn unbounded_integer_problem_detected() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 0.0, f64::INFINITY, -1.0);
        let b = m.add_binary("b", 0.0);
        m.add_constraint("couple", vec![(x, 1.0), (b, -1.0)], Sense::Ge, 0.0);
        let sol = solve(&m, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, MilpStatus::Unbounded);
    }
}
