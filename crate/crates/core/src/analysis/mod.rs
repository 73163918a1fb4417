//! Cross-trial statistics and per-state certificate checks.

mod certificate;
mod comparison;
mod persistence;
mod scaling;

pub use certificate::{check_supermartingale, CertificateCheck, CertificateSequence};
pub use comparison::{check_comparison_lemma, comparison_probability, ComparisonCheck};
pub use persistence::{hub_persistence_report, leader_agreement, DecadeRate, PersistenceReport};
pub use scaling::{fit_scaling_exponent, ScalingFit};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("comparison denominator 2(n-1) + n*beta0 = {0} is not positive")]
    NonPositiveDenominator(f64),
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

/// One `(n, M_n)` sample of the maximal degree, with the unique leader.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurvePoint {
    pub n: u64,
    pub max_degree: u64,
    pub sole_leader: Option<usize>,
}

/// Scalar outcomes of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trial: u64,
    pub seed: u64,
    pub steps: u64,
    pub m0: u64,
    pub final_max_degree: u64,
    pub final_leader: Option<usize>,
    pub distinct_sole_leaders: u64,
    pub last_leader_change_step: u64,
    pub watch_degrees: Vec<u64>,
    pub max_degree_curve: Vec<CurvePoint>,
    pub sole_leader_changes: Vec<u64>,
    pub supermartingale_violations: u64,
    pub comparison_violations: u64,
    /// States on which a certificate or comparison check was not skipped.
    pub checked_states: u64,
    #[serde(skip)]
    pub edges: Vec<(u64, u64)>,
}

impl TrialSummary {
    /// Unique leader at the latest checkpoint not after `n`.
    pub fn leader_at(&self, n: u64) -> Option<usize> {
        let idx = self.max_degree_curve.partition_point(|c| c.n <= n);
        idx.checked_sub(1)
            .and_then(|i| self.max_degree_curve[i].sole_leader)
    }

    /// `(n, M_n)` pairs of the curve.
    pub fn curve_pairs(&self) -> Vec<(u64, u64)> {
        self.max_degree_curve
            .iter()
            .map(|c| (c.n, c.max_degree))
            .collect()
    }
}
