//! First passage of the walk to the diagonal.
//!
//! The probability mass of states that have not yet touched the diagonal is
//! pushed forward one anti-diagonal `A + B = s` at a time. Mass stepping onto
//! `(m, m)` is absorbed into `q(A, m)`. What is still in flight when the
//! table stops at `m_max` is weighted by an upper bound on its chance of
//! ever reaching the diagonal, giving a certified bound on the remaining
//! tail `q(A) - sum_{m <= m_max} q(A, m)`.
//!
//! That bound uses the linear comparison walk with weight `n + beta0`, which
//! is dominated by the convex walk, hits the diagonal at least as often. For
//! the linear walk the hit probability from `(a, b)`, `a > b`, has the closed
//! form `2 I_{1/2}(a + beta0, b + beta0)`: the walk is a Pólya urn, so given
//! its limiting share `Y ~ Beta(a + beta0, b + beta0)` the steps are i.i.d.
//! and the gap closes with probability `min(1, ((1 - Y) / Y)^(a - b))`. For
//! affine weights the bound therefore equals the tail.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Num, One, Zero};
use serde::Serialize;
use statrs::function::beta::beta_reg;

use super::{WalkError, WalkState};
use crate::weights::{rational_to_f64, reference_constants, WeightFunction};

/// Largest anti-diagonal for which [`Precision::Auto`] picks exact arithmetic.
pub const EXACT_SUM_LIMIT: u64 = 200;

/// Levels past `A` used by [`q_decay_profile`].
pub const DECAY_LEVELS: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Precision {
    /// Rational arithmetic; fails for irrational weights.
    Exact,
    Float,
    /// Exact when weights are rational and `2 m_max <= 200`.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstHitRow {
    pub m: u64,
    pub q: f64,
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactFirstHit {
    /// `q(A, m)` for `m = A..=m_max`.
    pub q: Vec<BigRational>,
    pub cumulative: BigRational,
    pub in_flight: BigRational,
    /// Exact tail, when the hit probabilities are rational.
    pub tail: Option<BigRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstHitTable {
    pub start: WalkState,
    pub m_max: u64,
    pub rows: Vec<FirstHitRow>,
    /// Mass not absorbed by `m_max`; a trivial bound on the tail.
    pub in_flight: f64,
    /// Bound on `q - cumulative` from the comparison walk.
    pub tail_bound: f64,
    /// True for affine weights, where `tail_bound` is the tail itself.
    pub tail_is_exact: bool,
    pub exact: Option<ExactFirstHit>,
}

impl FirstHitTable {
    pub fn cumulative(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.cumulative)
    }

    /// `q(A) = sum_m q(A, m)` lies in `[lower, upper]`.
    pub fn q_bounds(&self) -> (f64, f64) {
        let c = self.cumulative();
        if self.tail_is_exact {
            (c + self.tail_bound, c + self.tail_bound)
        } else {
            (c, c + self.tail_bound.min(self.in_flight))
        }
    }
}

struct Propagation<T> {
    absorbed: Vec<T>,
    /// `(a, b, mass)` on the last anti-diagonal.
    frontier: Vec<(u64, u64, T)>,
}

fn propagate<T: Num + Clone>(start: WalkState, m_max: u64, weight: &[T]) -> Propagation<T> {
    let mut s = start.sum();
    let d0 = (start.a - start.b) as usize;
    let mut cur: Vec<T> = vec![T::zero(); d0 + 1];
    cur[d0] = T::one();
    let mut absorbed = vec![T::zero(); (m_max - start.a + 1) as usize];
    while s < 2 * m_max {
        let mut next = vec![T::zero(); cur.len() + 1];
        for (d, mass) in cur.iter().enumerate() {
            if d == 0 || mass.is_zero() {
                continue;
            }
            let a = (s + d as u64) / 2;
            let b = s - a;
            let (wa, wb) = (&weight[a as usize], &weight[b as usize]);
            let denom = wa.clone() + wb.clone();
            let up = mass.clone() * wa.clone() / denom.clone();
            let down = mass.clone() * wb.clone() / denom;
            next[d + 1] = next[d + 1].clone() + up;
            if d == 1 {
                let m = a;
                let slot = (m - start.a) as usize;
                absorbed[slot] = absorbed[slot].clone() + down;
            } else {
                next[d - 1] = next[d - 1].clone() + down;
            }
        }
        cur = next;
        s += 1;
    }
    let frontier = cur
        .into_iter()
        .enumerate()
        .filter(|(d, m)| *d > 0 && !m.is_zero())
        .map(|(d, m)| {
            let a = (s + d as u64) / 2;
            (a, s - a, m)
        })
        .collect();
    Propagation { absorbed, frontier }
}

/// `I_{1/2}(x, y)` for positive integers: `P(Bin(x + y - 1, 1/2) >= x)`.
fn half_beta_reg_exact(x: u64, y: u64) -> BigRational {
    let n = x + y - 1;
    let mut c = BigUint::one();
    let mut total = BigUint::zero();
    for j in 0..=n {
        if j >= x {
            total += &c;
        }
        c = c * (n - j) / (j + 1);
    }
    BigRational::new(
        BigInt::from(total),
        BigInt::from(BigUint::one() << (n as usize)),
    )
}

/// Upper bound on the probability of ever reaching the diagonal from
/// `(a, b)`, `a > b`, for a convex walk with comparison offset `beta0` and
/// `a > a0`; exact for affine weights.
pub fn hit_probability_bound(a: u64, b: u64, beta0: f64, a0: u64) -> f64 {
    if a <= b || a <= a0 {
        return 1.0;
    }
    (2.0 * beta_reg(a as f64 + beta0, b as f64 + beta0, 0.5)).min(1.0)
}

fn exact_hit_probability(a: u64, b: u64, beta0: f64, a0: u64) -> Option<BigRational> {
    if a <= b || a <= a0 {
        return Some(BigRational::one());
    }
    if beta0.fract() != 0.0 {
        return None;
    }
    let shift = beta0 as i64;
    let (x, y) = (a as i64 + shift, b as i64 + shift);
    if x < 1 || y < 1 {
        return None;
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let h = two * half_beta_reg_exact(x as u64, y as u64);
    Some(if h > BigRational::one() { BigRational::one() } else { h })
}

/// `q(A, m)` for `m = A..=m_max` from `start = (A, B)`, `A > B >= 1`.
pub fn diagonal_first_hit(
    start: WalkState,
    m_max: u64,
    w: &WeightFunction,
    precision: Precision,
) -> Result<FirstHitTable, WalkError> {
    if !(start.a > start.b && start.b >= 1) {
        return Err(WalkError::Domain(format!(
            "first-hit table needs A > B >= 1, got {start}"
        )));
    }
    if m_max < start.a {
        return Err(WalkError::Domain(format!(
            "m_max = {m_max} is below A = {}",
            start.a
        )));
    }
    let top = 2 * m_max;
    let exact_weights: Option<Vec<BigRational>> = match precision {
        Precision::Float => None,
        Precision::Exact => Some(
            (0..=top)
                .map(|n| if n == 0 { Some(BigRational::one()) } else { w.exact(n) })
                .collect::<Option<_>>()
                .ok_or(WalkError::ExactUnavailable)?,
        ),
        Precision::Auto if top <= EXACT_SUM_LIMIT => (0..=top)
            .map(|n| if n == 0 { Some(BigRational::one()) } else { w.exact(n) })
            .collect(),
        Precision::Auto => None,
    };
    let consts = reference_constants(w)?;
    let tail_is_exact = w.is_affine();
    // The closed form holds from every state for affine weights; otherwise
    // only where the leading coordinate is past A0.
    let gate = if tail_is_exact { 0 } else { consts.a0 };

    if let Some(weights) = exact_weights {
        let prop = propagate(start, m_max, &weights);
        let mut cumulative = BigRational::zero();
        let mut rows = Vec::with_capacity(prop.absorbed.len());
        for (i, q) in prop.absorbed.iter().enumerate() {
            cumulative += q;
            rows.push(FirstHitRow {
                m: start.a + i as u64,
                q: rational_to_f64(q),
                cumulative: rational_to_f64(&cumulative),
            });
        }
        let in_flight: BigRational = prop.frontier.iter().map(|(_, _, m)| m.clone()).sum();
        let mut tail = Some(BigRational::zero());
        let mut tail_f = 0.0;
        for (a, b, mass) in &prop.frontier {
            let h = exact_hit_probability(*a, *b, consts.beta0, gate);
            tail_f += rational_to_f64(mass) * hit_probability_bound(*a, *b, consts.beta0, gate);
            tail = match (tail, h) {
                (Some(t), Some(h)) => Some(t + mass * h),
                _ => None,
            };
        }
        if let Some(t) = &tail {
            tail_f = rational_to_f64(t);
        }
        return Ok(FirstHitTable {
            start,
            m_max,
            rows,
            in_flight: rational_to_f64(&in_flight),
            tail_bound: tail_f,
            tail_is_exact,
            exact: Some(ExactFirstHit {
                q: prop.absorbed,
                cumulative,
                in_flight,
                tail,
            }),
        });
    }

    let weights: Vec<f64> = (0..=top)
        .map(|n| if n == 0 { Ok(1.0) } else { w.eval(n) })
        .collect::<Result<_, _>>()?;
    if weights.iter().any(|v| !v.is_finite()) {
        return Err(WalkError::Domain(
            "weights overflow f64 on this range; use a smaller m_max".into(),
        ));
    }
    let prop = propagate(start, m_max, &weights);
    let mut cumulative = 0.0;
    let rows = prop
        .absorbed
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            cumulative += q;
            FirstHitRow {
                m: start.a + i as u64,
                q,
                cumulative,
            }
        })
        .collect();
    let in_flight = prop.frontier.iter().map(|f| f.2).sum();
    let tail_bound = prop
        .frontier
        .iter()
        .map(|&(a, b, mass)| mass * hit_probability_bound(a, b, consts.beta0, gate))
        .sum();
    Ok(FirstHitTable {
        start,
        m_max,
        rows,
        in_flight,
        tail_bound,
        tail_is_exact,
        exact: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRow {
    pub a: u64,
    /// Best value of `q(A)`: exact when the tail is, else the lower bound.
    pub q: f64,
    pub q_upper: f64,
    pub q_times_2a: f64,
    /// Width of the certified interval around `q`.
    pub uncertainty: f64,
    #[serde(skip)]
    pub exact: Option<BigRational>,
}

/// `q(A)` for each `A` in `a_range`, started from `(A, 1)`.
pub fn q_decay_profile(
    a_range: std::ops::RangeInclusive<u64>,
    w: &WeightFunction,
    precision: Precision,
) -> Result<Vec<DecayRow>, WalkError> {
    let mut rows = Vec::new();
    for a in a_range {
        let table = diagonal_first_hit(WalkState::new(a, 1), a + DECAY_LEVELS, w, precision)?;
        let exact_total = table
            .exact
            .as_ref()
            .and_then(|e| e.tail.as_ref().map(|t| (&e.cumulative + t, table.tail_is_exact)));
        let row = match exact_total {
            Some((q, true)) => {
                let qf = rational_to_f64(&q);
                DecayRow {
                    a,
                    q: qf,
                    q_upper: qf,
                    q_times_2a: rational_to_f64(&(q.clone() * BigRational::from_integer(BigInt::one() << (a as usize)))),
                    uncertainty: 0.0,
                    exact: Some(q),
                }
            }
            _ => {
                let (lo, hi) = table.q_bounds();
                // Rounding allowance when the tail is evaluated in floating point.
                let width = if table.tail_is_exact {
                    64.0 * f64::EPSILON * hi
                } else {
                    hi - lo
                };
                DecayRow {
                    a,
                    q: lo,
                    q_upper: hi + if table.tail_is_exact { width } else { 0.0 },
                    q_times_2a: lo * 2f64.powi(a as i32),
                    uncertainty: width,
                    exact: None,
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Least-squares slope of `ln(q(A) 2^A)` against `ln A`.
pub fn log_log_slope(rows: &[DecayRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.a as f64).ln(), r.q_times_2a.ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `q(A)` for an affine weight `n + beta` as `2 I_{1/2}(A + beta, 1 + beta)`,
/// exact when `beta` is a non-negative integer.
pub fn affine_q_closed_form(a: u64, beta: f64) -> Option<BigRational> {
    if beta.fract() != 0.0 || beta < 0.0 {
        return None;
    }
    let b = beta as u64;
    let two = BigRational::from_integer(BigInt::from(2));
    Some(two * half_beta_reg_exact(a + b, 1 + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_q_values_exact() {
        let w = WeightFunction::basic();
        let t = diagonal_first_hit(WalkState::new(2, 1), 3, &w, Precision::Exact).unwrap();
        let e = t.exact.as_ref().unwrap();
        assert_eq!(e.q[0], ratio(1, 3));
        assert_eq!(e.q[1], ratio(1, 15));
        assert_eq!(&e.cumulative + &e.in_flight, BigRational::one());
    }

    #[test]
    fn single_column_hit() {
        // From (A, A-1) the only admissible path to (A, A) is one step up.
        for w in [WeightFunction::basic(), WeightFunction::power(3.0).unwrap()] {
            for a in 2..8u64 {
                let t = diagonal_first_hit(WalkState::new(a, a - 1), a, &w, Precision::Exact).unwrap();
                let wa = w.exact(a).unwrap();
                let wb = w.exact(a - 1).unwrap();
                assert_eq!(t.exact.unwrap().q[0], wb.clone() / (wa + wb));
            }
        }
    }

    #[test]
    fn conservation_in_float_mode() {
        for w in [WeightFunction::basic(), WeightFunction::power(2.5).unwrap()] {
            let t = diagonal_first_hit(WalkState::new(3, 1), 400, &w, Precision::Float).unwrap();
            assert!((t.cumulative() + t.in_flight - 1.0).abs() <= 1e-12);
            assert!(t.tail_bound <= t.in_flight + 1e-15);
        }
    }

    #[test]
    fn precision_auto_and_errors() {
        let w = WeightFunction::power(1.5).unwrap();
        assert_eq!(
            diagonal_first_hit(WalkState::new(3, 1), 10, &w, Precision::Exact).unwrap_err(),
            WalkError::ExactUnavailable
        );
        assert!(diagonal_first_hit(WalkState::new(3, 1), 10, &w, Precision::Auto)
            .unwrap()
            .exact
            .is_none());
        let b = WeightFunction::basic();
        assert!(diagonal_first_hit(WalkState::new(3, 1), 10, &b, Precision::Auto)
            .unwrap()
            .exact
            .is_some());
        assert!(diagonal_first_hit(WalkState::new(3, 1), 150, &b, Precision::Auto)
            .unwrap()
            .exact
            .is_none());
        assert!(diagonal_first_hit(WalkState::new(3, 1), 2, &b, Precision::Float).is_err());
        assert!(diagonal_first_hit(WalkState::new(3, 3), 5, &b, Precision::Float).is_err());
    }

    #[test]
    fn general_start_row() {
        let w = WeightFunction::basic();
        let t = diagonal_first_hit(WalkState::new(5, 3), 5, &w, Precision::Exact).unwrap();
        // (5,3) -> (5,4) -> (5,5): 3/8 * 4/9.
        assert_eq!(t.exact.unwrap().q[0], ratio(1, 6));
    }

    #[test]
    fn exact_half_beta() {
        // I_{1/2}(a, 1) = 2^-a and I_{1/2}(1, 1) = 1/2.
        for a in 1..12u64 {
            assert_eq!(half_beta_reg_exact(a, 1), ratio(1, 1 << a));
        }
        assert_eq!(half_beta_reg_exact(2, 2), ratio(1, 2));
        for (x, y) in [(3u64, 5u64), (7, 2), (10, 10)] {
            let f = beta_reg(x as f64, y as f64, 0.5);
            assert!((rational_to_f64(&half_beta_reg_exact(x, y)) - f).abs() < 1e-14);
        }
    }

    #[test]
    fn affine_tail_closes_the_sum() {
        // cumulative + tail is the same whatever the truncation level.
        let w = WeightFunction::basic();
        for m_max in [3u64, 6, 20, 45] {
            let t = diagonal_first_hit(WalkState::new(3, 1), m_max, &w, Precision::Exact).unwrap();
            let e = t.exact.unwrap();
            assert_eq!(e.cumulative + e.tail.unwrap(), ratio(1, 4));
        }
        let w = WeightFunction::linear(1.0).unwrap();
        let want = affine_q_closed_form(4, 1.0).unwrap();
        let t = diagonal_first_hit(WalkState::new(4, 1), 30, &w, Precision::Exact).unwrap();
        let e = t.exact.unwrap();
        assert_eq!(e.cumulative + e.tail.unwrap(), want);
    }
}
