use super::AnalysisError;
use crate::graphgen::DegreeState;
use crate::hub::HubRecord;
use crate::weights::ReferenceConstants;

/// Relative slack allowed when comparing `p` against `p~`.
const COMPARISON_RTOL: f64 = 1e-12;

/// Attachment probability of a degree-`m` leader among `n` vertices in the
/// linear comparison model `W~(k) = k + beta0`.
pub fn comparison_probability(m: u64, n: u64, beta0: f64) -> Result<f64, AnalysisError> {
    if n < 2 || m < 1 {
        return Err(AnalysisError::Domain(format!(
            "comparison probability needs n >= 2 and m >= 1, got n={n}, m={m}"
        )));
    }
    let denom = 2.0 * (n - 1) as f64 + n as f64 * beta0;
    if !(denom > 0.0) {
        return Err(AnalysisError::NonPositiveDenominator(denom));
    }
    Ok((m as f64 + beta0) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComparisonCheck {
    /// Leader degree not above `A0`, or not a tree-model state.
    Skipped,
    Holds { p: f64, p_tilde: f64 },
    Violated { p: f64, p_tilde: f64 },
}

impl ComparisonCheck {
    pub fn is_violation(&self) -> bool {
        matches!(self, ComparisonCheck::Violated { .. })
    }
}

/// Checks `W(m) / w_n >= p~` for a maximum-degree vertex of a tree-model
/// state.
pub fn check_comparison_lemma(
    state: &DegreeState,
    hub: &HubRecord,
    consts: &ReferenceConstants,
) -> ComparisonCheck {
    let m = hub.max_degree();
    let n = state.vertex_count() as u64;
    if state.m0() != 1 || m <= consts.a0 || n < 2 {
        return ComparisonCheck::Skipped;
    }
    let Some(&leader) = hub.leaders().first() else {
        return ComparisonCheck::Skipped;
    };
    let p = state.attachment_probability(leader);
    match comparison_probability(m, n, consts.beta0) {
        Ok(p_tilde) => {
            if p >= p_tilde * (1.0 - COMPARISON_RTOL) {
                ComparisonCheck::Holds { p, p_tilde }
            } else {
                ComparisonCheck::Violated { p, p_tilde }
            }
        }
        Err(_) => ComparisonCheck::Skipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{reference_constants, WeightFunction};
    use std::sync::Arc;

    #[test]
    fn comparison_probability_examples() {
        assert_eq!(comparison_probability(4, 5, 0.0).unwrap(), 0.5);
        for n in 2..50 {
            assert_eq!(comparison_probability(2 * (n - 1), n, 0.0).unwrap(), 1.0);
        }
        assert!((comparison_probability(3, 4, 0.5).unwrap() - 3.5 / 8.0).abs() < 1e-15);
        // beta0 = -1/3 belongs to W(n) = n^2 + 1.
        assert!((comparison_probability(3, 4, -1.0 / 3.0).unwrap() - 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn nonpositive_denominator_is_flagged() {
        // 2(n-1) + n*beta0 with n = 2 and beta0 = -1 is zero.
        assert!(matches!(
            comparison_probability(1, 2, -1.0),
            Err(AnalysisError::NonPositiveDenominator(_))
        ));
        assert!(comparison_probability(1, 1, 0.0).is_err());
    }

    fn check(w: WeightFunction, degrees: &[u64]) -> ComparisonCheck {
        let consts = reference_constants(&w).unwrap();
        let state = DegreeState::from_degrees(Arc::new(w), degrees, 0).unwrap();
        let hub = HubRecord::from_degrees(degrees, 0);
        check_comparison_lemma(&state, &hub, &consts)
    }

    #[test]
    fn basic_model_is_its_own_comparison() {
        match check(WeightFunction::basic(), &[5, 1, 1, 1, 2, 1, 1]) {
            ComparisonCheck::Holds { p, p_tilde } => assert_eq!(p, p_tilde),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn power_two_star() {
        match check(WeightFunction::power(2.0).unwrap(), &[3, 1, 1, 1]) {
            ComparisonCheck::Holds { p, p_tilde } => {
                // beta0 = -2/3 from the chord through (1, 1) and (2, 4).
                assert!((p - 0.75).abs() < 1e-15);
                assert!((p_tilde - 0.7).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn low_leader_is_skipped() {
        assert_eq!(check(WeightFunction::basic(), &[2, 1, 1]), ComparisonCheck::Skipped);
    }
}
