//! Distribution shaping: the decision-dependent scenario probabilities
//! `pi_s(z)` expressed as linear constraints over per-level probability
//! variables.
//!
//! Level 0 holds the baseline (all lines energized). Each level applies one
//! line's decision through Bayes-rule ratio bounds: de-energizing scales
//! damaged-line scenarios up by `wip1/wip0` and surviving-line scenarios down
//! by `(1-wip1)/(1-wip0)`; keeping the line energized leaves the level
//! unchanged. The per-level normalization forces every upper bound tight, so
//! the final level equals the closed-form product distribution.

use psps_milp::{Sense, VarId};

use crate::outage::{OutageScenarioSet, ShapingCoefficients};

use super::{ModelBuilder, ZMinus};

/// Adds the shaping constraint block; returns the final-level probability
/// variables, one per scenario.
pub fn add_shaping_block(
    builder: &mut ModelBuilder,
    scen_set: &OutageScenarioSet,
    coeffs: &ShapingCoefficients,
    zminus: &[ZMinus],
) -> Vec<VarId> {
    let n_scen = scen_set.len();
    let levels = scen_set.n_lines();
    assert_eq!(zminus.len(), levels);

    // prev[s] is either the constant baseline (level 0) or the previous
    // level's variable.
    enum Prev {
        Const(f64),
        Var(VarId),
    }
    let mut prev: Vec<Prev> = scen_set.pi0.iter().map(|&p| Prev::Const(p)).collect();

    let mut current: Vec<VarId> = Vec::new();
    for level in 0..levels {
        let line = scen_set.nzr_lines[level];
        current = (0..n_scen)
            .map(|s| {
                builder
                    .model
                    .add_continuous(format!("pi_l{line}_s{s}"), 0.0, 1.0, 0.0)
            })
            .collect();

        for (s, scen) in scen_set.scenarios.iter().enumerate() {
            let ratio = if scen.xi[level] {
                coeffs.down[level]
            } else {
                coeffs.up[level]
            };
            // Scale bound: pi_l <= ratio * pi_{l-1} + z.
            let mut scale = vec![(current[s], 1.0)];
            let mut scale_rhs = 0.0;
            match prev[s] {
                Prev::Const(p) => scale_rhs += ratio * p,
                Prev::Var(v) => scale.push((v, -ratio)),
            }
            match zminus[level] {
                ZMinus::Fixed(z) => scale_rhs += if z { 1.0 } else { 0.0 },
                ZMinus::Var(v) => scale.push((v, -1.0)),
            }
            builder.model.add_constraint(
                format!("shape_scale_l{line}_s{s}"),
                scale,
                Sense::Le,
                scale_rhs,
            );

            // Keep bound: pi_l <= pi_{l-1} + (1 - z).
            let mut keep = vec![(current[s], 1.0)];
            let mut keep_rhs = 1.0;
            match prev[s] {
                Prev::Const(p) => keep_rhs += p,
                Prev::Var(v) => keep.push((v, -1.0)),
            }
            match zminus[level] {
                ZMinus::Fixed(z) => keep_rhs -= if z { 1.0 } else { 0.0 },
                ZMinus::Var(v) => keep.push((v, 1.0)),
            }
            builder.model.add_constraint(
                format!("shape_keep_l{line}_s{s}"),
                keep,
                Sense::Le,
                keep_rhs,
            );
        }

        // Per-level normalization makes the upper bounds bind.
        builder.model.add_constraint(
            format!("shape_norm_l{line}"),
            current.iter().map(|&v| (v, 1.0)).collect(),
            Sense::Eq,
            1.0,
        );

        prev = current.iter().map(|&v| Prev::Var(v)).collect();
    }

    if levels == 0 {
        // Degenerate scenario space: the single empty scenario has
        // probability one; expose it as a fixed variable for uniformity.
        let v = builder.model.add_continuous("pi_l0_s0", 1.0, 1.0, 0.0);
        current = vec![v];
    }
    current
}
