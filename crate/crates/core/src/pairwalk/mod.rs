//! The joint degree walk of two vertices.
//!
//! From `(A, B)` the walk moves to `(A + 1, B)` with probability
//! `W(A) / (W(A) + W(B))` and to `(A, B + 1)` otherwise. This module holds
//! its simulation, exact path combinatorics, first-passage probabilities to
//! the diagonal, the Pólya-urn limit for affine weights and the monotone
//! coupling against the linear comparison walk.

mod coupling;
mod dp;
mod paths;
mod prob;
mod urn;

pub use coupling::{coupled_step, run_coupled, CoupledState, CouplingOutcome};
pub use dp::{
    affine_q_closed_form, diagonal_first_hit, hit_probability_bound, log_log_slope, q_decay_profile, DecayRow,
    ExactFirstHit, FirstHitRow, FirstHitTable, Precision, DECAY_LEVELS, EXACT_SUM_LIMIT,
};
pub use paths::{
    count_admissible_paths, count_paths, count_paths_by_enumeration, enumerate_admissible_paths,
    enumerate_paths, for_each_path, ENUMERATION_CAP,
};
pub use prob::{max_prob_path, path_probability, path_probability_exact};
pub use urn::{beta_limit_parameters, ratio_limit_sample};

use std::fmt;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::weights::{WeightError, WeightFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("path length {len} exceeds the enumeration cap {cap}")]
    TooLong { len: u64, cap: u64 },
    #[error("exact arithmetic needs rational weights")]
    ExactUnavailable,
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("coupling violated at step {step}: delta {delta}, delta~ {delta_tilde}")]
    CouplingViolation {
        step: u64,
        delta: u64,
        delta_tilde: u64,
    },
}

/// A lattice point `(A, B)` with both coordinates at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WalkState {
    pub a: u64,
    pub b: u64,
}

impl WalkState {
    pub fn new(a: u64, b: u64) -> Self {
        WalkState { a, b }
    }

    pub fn sum(&self) -> u64 {
        self.a + self.b
    }

    pub fn on_diagonal(&self) -> bool {
        self.a == self.b
    }
}

impl fmt::Display for WalkState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// An up-right lattice path given by its points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Path(pub Vec<WalkState>);

impl Path {
    pub fn points(&self) -> &[WalkState] {
        &self.0
    }

    pub fn start(&self) -> WalkState {
        self.0[0]
    }

    pub fn end(&self) -> WalkState {
        *self.0.last().expect("path has at least one point")
    }

    /// Number of unit steps.
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks that consecutive points differ by one unit step right or up
    /// and that every coordinate is at least 1.
    pub fn validate(&self) -> Result<(), WalkError> {
        if self.0.is_empty() {
            return Err(WalkError::Domain("empty path".into()));
        }
        if self.0.iter().any(|p| p.a == 0 || p.b == 0) {
            return Err(WalkError::Domain("path coordinates must be at least 1".into()));
        }
        for w in self.0.windows(2) {
            let (p, q) = (w[0], w[1]);
            let right = q.a == p.a + 1 && q.b == p.b;
            let up = q.a == p.a && q.b == p.b + 1;
            if !(right || up) {
                return Err(WalkError::Domain(format!("{p} -> {q} is not a unit step")));
            }
        }
        Ok(())
    }

    /// No interior point lies on the diagonal.
    pub fn is_admissible(&self) -> bool {
        let n = self.0.len();
        n < 3 || self.0[1..n - 1].iter().all(|p| !p.on_diagonal())
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// One walk step driven by the uniform `u` in `[0, 1)`.
pub fn walk_step(s: WalkState, w: &WeightFunction, u: f64) -> Result<WalkState, WalkError> {
    if s.a == 0 || s.b == 0 {
        return Err(WalkError::Domain("walk coordinates must be at least 1".into()));
    }
    let (wa, wb) = (w.eval(s.a)?, w.eval(s.b)?);
    let pa = if wa.is_finite() && wb.is_finite() {
        wa / (wa + wb)
    } else {
        let d = w.ln_eval(s.b)? - w.ln_eval(s.a)?;
        1.0 / (1.0 + d.exp())
    };
    Ok(if u < pa {
        WalkState::new(s.a + 1, s.b)
    } else {
        WalkState::new(s.a, s.b + 1)
    })
}

/// Simulates from `start` until the walk first touches the diagonal at some
/// `(m, m)` with `m <= m_max`; `None` if it has not by then.
pub fn simulate_first_hit<R: Rng + ?Sized>(
    start: WalkState,
    w: &WeightFunction,
    m_max: u64,
    rng: &mut R,
) -> Result<Option<u64>, WalkError> {
    let mut s = start;
    while s.sum() < 2 * m_max {
        s = walk_step(s, w, rng.random())?;
        if s.on_diagonal() {
            return Ok(Some(s.a));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_step_examples() {
        let basic = WeightFunction::basic();
        assert_eq!(walk_step(WalkState::new(1, 1), &basic, 0.49).unwrap(), WalkState::new(2, 1));
        assert_eq!(walk_step(WalkState::new(1, 1), &basic, 0.5).unwrap(), WalkState::new(1, 2));
        assert_eq!(walk_step(WalkState::new(2, 1), &basic, 0.5).unwrap(), WalkState::new(3, 1));
        let p2 = WeightFunction::power(2.0).unwrap();
        assert_eq!(walk_step(WalkState::new(3, 1), &p2, 0.95).unwrap(), WalkState::new(3, 2));
        assert_eq!(walk_step(WalkState::new(3, 1), &p2, 0.89).unwrap(), WalkState::new(4, 1));
        assert!(walk_step(WalkState::new(0, 1), &basic, 0.1).is_err());
    }

    #[test]
    fn walk_step_overflowing_weights() {
        let w = WeightFunction::power(400.0).unwrap();
        assert_eq!(walk_step(WalkState::new(9, 8), &w, 0.5).unwrap(), WalkState::new(10, 8));
    }

    #[test]
    fn path_validation() {
        let p = Path(vec![WalkState::new(2, 1), WalkState::new(3, 1), WalkState::new(3, 2)]);
        p.validate().unwrap();
        assert!(p.is_admissible());
        let bad = Path(vec![WalkState::new(2, 1), WalkState::new(3, 2)]);
        assert!(bad.validate().is_err());
        let touching = Path(vec![
            WalkState::new(2, 1),
            WalkState::new(2, 2),
            WalkState::new(3, 2),
        ]);
        assert!(!touching.is_admissible());
        assert_eq!(touching.to_string(), "(2,1),(2,2),(3,2)");
    }
}
