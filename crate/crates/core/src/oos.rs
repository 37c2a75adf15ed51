//! Out-of-sample Monte Carlo evaluation of a fixed plan: sample line
//! survival vectors from the real-time ignition probabilities, re-dispatch
//! against each realization with commitments and shut-offs frozen, and
//! aggregate the cost distribution.
//!
//! Sampling uses ChaCha8 with one substream per sample index, so reports are
//! bit-reproducible for a given seed on any platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use psps_milp::{solve, MilpStatus, SolveOptions};

use crate::formulation::{CommitRepr, ModelBuilder, ZMinus};
use crate::grid::Network;
use crate::outage::OutageScenarioSet;
use crate::planners::{PlanResult, PlannerError};

#[derive(Debug, Clone)]
pub struct OutageSampleSet {
    pub seed: u64,
    /// Survival vector per sample over the NZR lines (true = in service).
    pub samples: Vec<Vec<bool>>,
}

/// Draws `n` independent Bernoulli survival vectors; line `k` fails with
/// probability `wip_rt[k]`. Sample `i` reads from substream `i` of the seed.
pub fn sample_outages(wip_rt: &[f64], n: usize, seed: u64) -> OutageSampleSet {
    assert!(n >= 1, "at least one sample");
    assert!(
        wip_rt.iter().all(|p| (0.0..=1.0).contains(p)),
        "ignition probabilities must lie in [0, 1]"
    );
    let samples = (0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            wip_rt.iter().map(|&p| rng.gen::<f64>() >= p).collect()
        })
        .collect();
    OutageSampleSet { seed, samples }
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleOutcome {
    pub survival: Vec<bool>,
    pub total_cost: f64,
    pub dispatch_cost: f64,
    pub voll_cost: f64,
    pub shed_mwh: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OosReport {
    pub seed: u64,
    pub n_samples: usize,
    /// Samples whose dispatch LP failed; excluded from the aggregates.
    pub excluded: usize,
    pub expected_cost: f64,
    pub std_error: f64,
    /// (quantile, cost) pairs at 5/25/50/75/95 percent.
    pub quantiles: Vec<(f64, f64)>,
    pub samples: Vec<SampleOutcome>,
}

/// Re-dispatch cost of one realized survival vector under a frozen plan.
/// The effective status of an NZR line is its plan decision AND its survival.
pub fn evaluate_outcome(
    net: &Network,
    scen_set: &OutageScenarioSet,
    plan: &PlanResult,
    survival: &[bool],
    demand_rt: Option<&[Vec<f64>]>,
) -> Result<SampleOutcome, PlannerError> {
    let mut b = ModelBuilder::new(net);
    let zfixed: Vec<ZMinus> = plan.energized.iter().map(|&z| ZMinus::Fixed(z)).collect();
    let statuses = b.line_statuses(scen_set, &zfixed, survival);
    let block = b.add_dispatch_block_with_demand(
        &CommitRepr::Fixed(&plan.commitments),
        &statuses,
        "rt",
        demand_rt,
    );
    b.model.set_objective(block.cost, 1.0);
    let sol = solve(&b.model, &SolveOptions::default())?;
    if sol.status != MilpStatus::Optimal {
        return Err(PlannerError::NotOptimal(sol.status, sol.bound_gap));
    }
    let h = net.horizon();
    let mut dispatch_cost = 0.0;
    for (gi, g) in net.generators().iter().enumerate() {
        for t in 0..h {
            dispatch_cost += g.cost_marginal * sol.value(block.gen_power[gi][t]);
        }
    }
    let demand_matrix: Vec<Vec<f64>> = match demand_rt {
        Some(d) => d.to_vec(),
        None => crate::grid::expected_demand(net),
    };
    let mut voll_cost = 0.0;
    let mut shed_mwh = 0.0;
    for (di, d) in net.demands().iter().enumerate() {
        for t in 0..h {
            let shed = (1.0 - sol.value(block.served[di][t])) * demand_matrix[di][t];
            shed_mwh += shed;
            voll_cost += d.voll * shed;
        }
    }
    Ok(SampleOutcome {
        survival: survival.to_vec(),
        total_cost: plan.decomposition.uc_cost + dispatch_cost + voll_cost,
        dispatch_cost,
        voll_cost,
        shed_mwh,
    })
}

/// Evaluates a plan against a sample set. Distinct survival vectors are
/// dispatched once and mapped back onto the sample order.
pub fn evaluate_plan(
    net: &Network,
    scen_set: &OutageScenarioSet,
    plan: &PlanResult,
    samples: &OutageSampleSet,
    demand_rt: Option<&[Vec<f64>]>,
    parallel: bool,
) -> Result<OosReport, PlannerError> {
    let mut distinct: Vec<Vec<bool>> = Vec::new();
    let mut index_of: Vec<usize> = Vec::with_capacity(samples.samples.len());
    for s in &samples.samples {
        match distinct.iter().position(|d| d == s) {
            Some(i) => index_of.push(i),
            None => {
                distinct.push(s.clone());
                index_of.push(distinct.len() - 1);
            }
        }
    }
    let eval =
        |v: &Vec<bool>| -> Result<SampleOutcome, PlannerError> {
            evaluate_outcome(net, scen_set, plan, v, demand_rt)
        };
    let outcomes: Vec<Result<SampleOutcome, PlannerError>> = if parallel {
        distinct.par_iter().map(eval).collect()
    } else {
        distinct.iter().map(eval).collect()
    };

    let mut per_sample = Vec::with_capacity(samples.samples.len());
    let mut excluded = 0usize;
    for &ix in &index_of {
        match &outcomes[ix] {
            Ok(out) => per_sample.push(out.clone()),
            Err(_) => excluded += 1,
        }
    }
    let kept = per_sample.len();
    if kept == 0 {
        return Err(PlannerError::Invalid(
            "every sample failed to dispatch".into(),
        ));
    }
    let totals: Vec<f64> = per_sample.iter().map(|o| o.total_cost).collect();
    let mean = totals.iter().sum::<f64>() / kept as f64;
    let variance = if kept > 1 {
        totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (kept as f64 - 1.0)
    } else {
        0.0
    };
    let std_error = (variance / kept as f64).sqrt();
    let mut sorted = totals.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let quantiles = [0.05, 0.25, 0.5, 0.75, 0.95]
        .iter()
        .map(|&q| {
            let rank = ((q * kept as f64).ceil() as usize).clamp(1, kept) - 1;
            (q, sorted[rank])
        })
        .collect();

    Ok(OosReport {
        seed: samples.seed,
        n_samples: samples.samples.len(),
        excluded,
        expected_cost: mean,
        std_error,
        quantiles,
        samples: per_sample,
    })
}
