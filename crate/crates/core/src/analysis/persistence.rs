use std::collections::BTreeMap;

use serde::Serialize;

use super::TrialSummary;

/// Unique-leader changes per trial within one decade window `[from, to)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecadeRate {
    pub from: u64,
    pub to: u64,
    pub changes_per_trial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceReport {
    pub trials: usize,
    pub n_half: u64,
    /// `distinct_sole_leaders -> number of trials`.
    pub distinct_leader_histogram: BTreeMap<u64, u64>,
    /// Trials whose unique leader at `n_half` is the unique final leader.
    pub persistence_fraction: f64,
    pub change_rate_by_decade: Vec<DecadeRate>,
}

/// Fraction of trials with the same unique leader at checkpoints `n1` and
/// `n2`. Ties at either checkpoint count as disagreement.
pub fn leader_agreement(summaries: &[TrialSummary], n1: u64, n2: u64) -> f64 {
    if summaries.is_empty() {
        return 0.0;
    }
    let agree = summaries
        .iter()
        .filter(|s| {
            let a = s.leader_at(n1);
            a.is_some() && a == s.leader_at(n2)
        })
        .count();
    agree as f64 / summaries.len() as f64
}

pub fn hub_persistence_report(summaries: &[TrialSummary], n_half: u64) -> PersistenceReport {
    let mut histogram = BTreeMap::new();
    for s in summaries {
        *histogram.entry(s.distinct_sole_leaders).or_insert(0) += 1;
    }
    let persistence_fraction = if summaries.is_empty() {
        0.0
    } else {
        let agree = summaries
            .iter()
            .filter(|s| {
                let a = s.leader_at(n_half);
                a.is_some() && a == s.leader_at(s.steps)
            })
            .count();
        agree as f64 / summaries.len() as f64
    };

    let longest = summaries.iter().map(|s| s.steps).max().unwrap_or(0);
    let mut change_rate_by_decade = Vec::new();
    let mut from = 1u64;
    while from <= longest {
        let to = from.saturating_mul(10);
        let changes: usize = summaries
            .iter()
            .map(|s| {
                s.sole_leader_changes
                    .iter()
                    .filter(|&&c| c >= from && c < to)
                    .count()
            })
            .sum();
        change_rate_by_decade.push(DecadeRate {
            from,
            to,
            changes_per_trial: changes as f64 / summaries.len() as f64,
        });
        from = to;
    }

    PersistenceReport {
        trials: summaries.len(),
        n_half,
        distinct_leader_histogram: histogram,
        persistence_fraction,
        change_rate_by_decade,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::{simulate, RunOptions};
    use crate::weights::WeightFunction;
    use std::sync::Arc;

    #[test]
    fn zero_length_trials_are_degenerate() {
        let w = Arc::new(WeightFunction::basic());
        let summaries: Vec<_> = (0..5)
            .map(|s| simulate(w.clone(), 1, s, 0, &RunOptions::default()).unwrap())
            .collect();
        let r = hub_persistence_report(&summaries, 0);
        assert_eq!(r.trials, 5);
        assert_eq!(r.persistence_fraction, 1.0);
        assert_eq!(r.distinct_leader_histogram, BTreeMap::from([(1, 5)]));
        assert!(r.change_rate_by_decade.is_empty());
    }

    #[test]
    fn report_on_short_runs() {
        let w = Arc::new(WeightFunction::basic());
        let opts = RunOptions {
            checkpoints: vec![300],
            ..Default::default()
        };
        let summaries: Vec<_> = (0..40)
            .map(|s| simulate(w.clone(), 1, s, 3000, &opts).unwrap())
            .collect();
        let r = hub_persistence_report(&summaries, 300);
        assert_eq!(r.distinct_leader_histogram.values().sum::<u64>(), 40);
        assert!(r.persistence_fraction > 0.0 && r.persistence_fraction <= 1.0);
        assert_eq!(r.change_rate_by_decade.len(), 4);
        let total: f64 = r.change_rate_by_decade.iter().map(|d| d.changes_per_trial).sum();
        let direct: usize = summaries
            .iter()
            .map(|s| s.sole_leader_changes.iter().filter(|&&c| c >= 1).count())
            .sum();
        assert!((total * 40.0 - direct as f64).abs() < 1e-9);
        assert!(leader_agreement(&summaries, 300, 3000) >= r.persistence_fraction - 1e-12);
    }
}
