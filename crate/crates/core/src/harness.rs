//! Reproducible parallel trials.
//!
//! Every trial draws from its own ChaCha8 stream seeded by
//! [`trial_seed`]`(master, trial)`, and results come back in trial order, so
//! output does not depend on how many workers ran them.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    check_comparison_lemma, check_supermartingale, CertificateCheck, CertificateSequence,
    ComparisonCheck, TrialSummary,
};
use crate::graphgen::{run_observed, DegreeState, GraphError, RunOptions};
use crate::hub::HubRecord;
use crate::weights::{reference_constants, WeightFunction};

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` under master seed `master`.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    mix(mix(master.wrapping_add(0x9e37_79b9_7f4a_7c15)) ^ trial.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

/// Runs `f(trial, seed)` for `trial in 0..trials` on `workers` threads (all
/// cores when `None`) and returns the results in trial order.
pub fn run_trials<T, F>(master: u64, trials: u64, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync + Send,
{
    let job = || {
        (0..trials)
            .into_par_iter()
            .map(|t| f(t, trial_seed(master, t)))
            .collect()
    };
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(job),
        None => job(),
    }
}

/// Which per-state checks to run during a trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StateChecks {
    pub supermartingale: bool,
    pub comparison: bool,
}

/// One trajectory with optional per-state checks folded into its summary.
pub fn checked_trial(
    weights: Arc<WeightFunction>,
    m0: u64,
    trial: u64,
    seed: u64,
    n_steps: u64,
    opts: &RunOptions,
    checks: StateChecks,
) -> Result<TrialSummary, GraphError> {
    let mut state = DegreeState::new_trajectory(weights.clone(), m0, seed)?;
    let mut hub = HubRecord::from_degrees(state.degrees(), 0);
    let mut super_bad = 0u64;
    let mut comp_bad = 0u64;
    let mut checked = 0u64;
    let mut summary = if checks.supermartingale || checks.comparison {
        let consts = reference_constants(&weights)?;
        let cert = CertificateSequence::new(consts.beta0).map_err(|e| {
            GraphError::Weight(crate::weights::WeightError::InvalidParameter(e.to_string()))
        })?;
        run_observed(&mut state, n_steps, &mut hub, opts, |s, h| {
            let mut seen = false;
            if checks.supermartingale {
                match check_supermartingale(s, h, &cert, consts.a0) {
                    CertificateCheck::Skipped => {}
                    c => {
                        seen = true;
                        super_bad += c.is_violation() as u64;
                    }
                }
            }
            if checks.comparison {
                match check_comparison_lemma(s, h, &consts) {
                    ComparisonCheck::Skipped => {}
                    c => {
                        seen = true;
                        comp_bad += c.is_violation() as u64;
                    }
                }
            }
            checked += seen as u64;
        })?
    } else {
        run_observed(&mut state, n_steps, &mut hub, opts, |_, _| {})?
    };
    summary.trial = trial;
    summary.supermartingale_violations = super_bad;
    summary.comparison_violations = comp_bad;
    summary.checked_states = checked;
    Ok(summary)
}

/// `trials` independent trajectories in trial order.
#[allow(clippy::too_many_arguments)]
pub fn simulate_trials(
    weights: Arc<WeightFunction>,
    m0: u64,
    master_seed: u64,
    trials: u64,
    n_steps: u64,
    opts: &RunOptions,
    checks: StateChecks,
    workers: Option<usize>,
) -> Result<Vec<TrialSummary>, GraphError> {
    run_trials(master_seed, trials, workers, |t, seed| {
        checked_trial(weights.clone(), m0, t, seed, n_steps, opts, checks)
    })
    .into_iter()
    .collect()
}
