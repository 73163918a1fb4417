//! Monotone coupling of the convex gap `|A - B|` with the gap of the linear
//! comparison walk `W~(n) = n + beta0`.
//!
//! Both gaps see one shared uniform per step. The convex gap grows iff
//! `u < q`, the comparison gap iff `u < q~`, where each is the chance that
//! the leading coordinate moves. A gap of zero always becomes one.

use rand::Rng;
use serde::Serialize;

use super::{WalkError, WalkState};
use crate::weights::{reference_constants, WeightFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoupledState {
    pub delta: u64,
    pub delta_tilde: u64,
    /// Coordinate sum, shared by both walks.
    pub sum: u64,
}

impl CoupledState {
    pub fn from_walk(s: WalkState) -> Self {
        let delta = s.a.abs_diff(s.b);
        CoupledState {
            delta,
            delta_tilde: delta,
            sum: s.sum(),
        }
    }

    fn lead_trail(sum: u64, gap: u64) -> (u64, u64) {
        ((sum + gap) / 2, (sum - gap) / 2)
    }
}

fn leader_step_probability(w: &WeightFunction, sum: u64, gap: u64) -> Result<f64, WalkError> {
    let (lead, trail) = CoupledState::lead_trail(sum, gap);
    let (wl, wt) = (w.eval(lead)?, w.eval(trail)?);
    if wl.is_finite() && wt.is_finite() {
        Ok(wl / (wl + wt))
    } else {
        Ok(1.0 / (1.0 + (w.ln_eval(trail)? - w.ln_eval(lead)?).exp()))
    }
}

/// One coupled step with shared uniform `u`.
///
/// Fails with [`WalkError::CouplingViolation`] when the result has
/// `delta < delta_tilde` or mismatched parity.
pub fn coupled_step(
    c: CoupledState,
    w: &WeightFunction,
    beta0: f64,
    u: f64,
) -> Result<CoupledState, WalkError> {
    let delta = if c.delta == 0 {
        1
    } else if u < leader_step_probability(w, c.sum, c.delta)? {
        c.delta + 1
    } else {
        c.delta - 1
    };
    let delta_tilde = if c.delta_tilde == 0 {
        1
    } else {
        let (lead, _) = CoupledState::lead_trail(c.sum, c.delta_tilde);
        let q_tilde = (lead as f64 + beta0) / (c.sum as f64 + 2.0 * beta0);
        if u < q_tilde {
            c.delta_tilde + 1
        } else {
            c.delta_tilde - 1
        }
    };
    let next = CoupledState {
        delta,
        delta_tilde,
        sum: c.sum + 1,
    };
    if delta < delta_tilde || (delta - delta_tilde) % 2 != 0 {
        return Err(WalkError::CouplingViolation {
            step: next.sum,
            delta,
            delta_tilde,
        });
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingOutcome {
    pub steps: u64,
    /// Steps ending with `delta < delta_tilde`.
    pub violations: u64,
    /// Steps ending with `delta - delta_tilde` odd.
    pub parity_violations: u64,
    pub final_state: CoupledState,
    /// Steps on which the comparison gap was zero.
    pub tilde_zero_visits: u64,
}

/// Runs `steps` coupled steps from `start`. A violation is counted and the
/// run carries on from the offending state.
pub fn run_coupled<R: Rng + ?Sized>(
    w: &WeightFunction,
    start: WalkState,
    steps: u64,
    rng: &mut R,
) -> Result<CouplingOutcome, WalkError> {
    if start.a == 0 || start.b == 0 {
        return Err(WalkError::Domain("walk coordinates must be at least 1".into()));
    }
    let beta0 = reference_constants(w)?.beta0;
    let mut c = CoupledState::from_walk(start);
    let mut out = CouplingOutcome {
        steps,
        violations: 0,
        parity_violations: 0,
        final_state: c,
        tilde_zero_visits: 0,
    };
    for _ in 0..steps {
        if c.delta_tilde == 0 {
            out.tilde_zero_visits += 1;
        }
        c = match coupled_step(c, w, beta0, rng.random()) {
            Ok(next) => next,
            Err(WalkError::CouplingViolation {
                step,
                delta,
                delta_tilde,
            }) => {
                if delta < delta_tilde {
                    out.violations += 1;
                }
                if delta.abs_diff(delta_tilde) % 2 != 0 {
                    out.parity_violations += 1;
                }
                CoupledState {
                    delta,
                    delta_tilde,
                    sum: step,
                }
            }
            Err(e) => return Err(e),
        };
    }
    out.final_state = c;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn self_coupling_is_identical() {
        let w = WeightFunction::basic();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut c = CoupledState::from_walk(WalkState::new(2, 1));
        for _ in 0..5000 {
            c = coupled_step(c, &w, 0.0, rng.random()).unwrap();
            assert_eq!(c.delta, c.delta_tilde);
        }
    }

    #[test]
    fn zero_gap_reflects() {
        let w = WeightFunction::power(2.0).unwrap();
        for u in [0.0, 0.3, 0.999] {
            let c = CoupledState {
                delta: 2,
                delta_tilde: 0,
                sum: 6,
            };
            assert_eq!(coupled_step(c, &w, -1.0 / 3.0, u).unwrap().delta_tilde, 1);
        }
    }

    #[test]
    fn detects_breach() {
        // A comparison offset below the true one makes q~ exceed q.
        let w = WeightFunction::basic();
        let c = CoupledState {
            delta: 3,
            delta_tilde: 3,
            sum: 9,
        };
        // q = 6/9 and q~ = 5.1/7.2; a uniform between them splits the gaps.
        assert!(coupled_step(c, &w, -0.9, 0.6).is_ok());
        let q_tilde = (6.0 - 0.9) / (9.0 - 1.8);
        assert!(q_tilde > 6.0 / 9.0);
        assert!(matches!(
            coupled_step(c, &w, -0.9, 0.69),
            Err(WalkError::CouplingViolation { .. })
        ));
    }

    #[test]
    fn power_two_run_has_no_violations() {
        let w = WeightFunction::power(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let out = run_coupled(&w, WalkState::new(2, 1), 10_000, &mut rng).unwrap();
            assert_eq!(out.violations, 0);
            assert_eq!(out.parity_violations, 0);
            assert!(out.final_state.delta >= out.final_state.delta_tilde);
            assert_eq!(out.final_state.sum, 10_003);
        }
    }
}
