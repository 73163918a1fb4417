//! Attachment weight functions and their chord machinery.
//!
//! A [`WeightFunction`] maps a non-negative integer degree to a strictly
//! positive attachment weight. All built-in kinds are convex and unbounded.
//! Convexity is scanned eagerly on a small window at construction and then
//! lazily, up to the largest degree ever queried.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Degrees scanned for convexity when a weight function is built.
const EAGER_SCAN_LIMIT: u64 = 64;

/// Default search cap for [`reference_constants`].
pub const DEFAULT_REFERENCE_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("degree {degree} is below the domain floor {floor}")]
    BelowFloor { degree: u64, floor: u64 },
    #[error("weight at degree {degree} is {value}, weights must be strictly positive")]
    NonPositive { degree: u64, value: f64 },
    #[error("weight is not convex at degree {degree}")]
    NonConvex { degree: u64 },
    #[error("invalid weight parameter: {0}")]
    InvalidParameter(String),
    #[error("chord through degrees 1 and {a} is flat")]
    FlatChord { a: u64 },
    #[error("no degree up to {cap} has weight above W(1); weight is not unbounded")]
    NotUnbounded { cap: u64 },
}

/// The shape of a weight rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum WeightKind {
    /// `W(n) = n`.
    Basic,
    /// `W(n) = n + beta`, `beta > -1`.
    Linear { beta: f64 },
    /// `W(n) = n^p`, `p >= 1`.
    Power { p: f64 },
    /// Explicit values `W(0), W(1), ...`, continued linearly with the last slope.
    Table { table: Vec<f64> },
}

impl WeightKind {
    fn validate(&self) -> Result<(), WeightError> {
        match self {
            WeightKind::Basic => Ok(()),
            WeightKind::Linear { beta } => {
                if !beta.is_finite() || *beta <= -1.0 {
                    return Err(WeightError::InvalidParameter(format!(
                        "linear model requires beta > -1, got {beta}"
                    )));
                }
                Ok(())
            }
            WeightKind::Power { p } => {
                if !p.is_finite() || *p < 1.0 {
                    return Err(WeightError::InvalidParameter(format!(
                        "power model requires p >= 1, got {p}"
                    )));
                }
                Ok(())
            }
            WeightKind::Table { table } => {
                if table.len() < 2 {
                    return Err(WeightError::InvalidParameter(
                        "table model needs at least two entries".into(),
                    ));
                }
                if table.iter().any(|v| !v.is_finite()) {
                    return Err(WeightError::InvalidParameter(
                        "table entries must be finite".into(),
                    ));
                }
                let n = table.len();
                if table[n - 1] - table[n - 2] <= 0.0 {
                    return Err(WeightError::InvalidParameter(
                        "table must end with a positive slope so the continuation is unbounded"
                            .into(),
                    ));
                }
                Ok(())
            }
        }
    }

    fn raw(&self, n: u64) -> f64 {
        match self {
            WeightKind::Basic => n as f64,
            WeightKind::Linear { beta } => n as f64 + beta,
            WeightKind::Power { p } => (n as f64).powf(*p),
            WeightKind::Table { table } => {
                let len = table.len();
                if (n as usize) < len {
                    table[n as usize]
                } else {
                    let slope = table[len - 1] - table[len - 2];
                    table[len - 1] + slope * (n - (len as u64 - 1)) as f64
                }
            }
        }
    }

    fn ln_raw(&self, n: u64) -> f64 {
        match self {
            WeightKind::Basic => (n as f64).ln(),
            WeightKind::Linear { beta } => (n as f64 + beta).ln(),
            WeightKind::Power { p } => p * (n as f64).ln(),
            WeightKind::Table { table } => {
                let v = self.raw(n);
                if v.is_finite() {
                    return v.ln();
                }
                let len = table.len();
                let slope = table[len - 1] - table[len - 2];
                let steps = (n - (len as u64 - 1)) as f64;
                slope.ln() + (steps + table[len - 1] / slope).ln()
            }
        }
    }

    fn exact_raw(&self, n: u64) -> Option<BigRational> {
        let int = |v: u64| BigRational::from_integer(BigInt::from(v));
        match self {
            WeightKind::Basic => Some(int(n)),
            WeightKind::Linear { beta } => Some(int(n) + BigRational::from_f64(*beta)?),
            WeightKind::Power { p } => {
                if p.fract() != 0.0 || *p > 4096.0 {
                    return None;
                }
                Some(BigRational::from_integer(num_traits::pow(
                    BigInt::from(n),
                    *p as usize,
                )))
            }
            WeightKind::Table { table } => {
                let len = table.len();
                if (n as usize) < len {
                    BigRational::from_f64(table[n as usize])
                } else {
                    let last = BigRational::from_f64(table[len - 1])?;
                    let prev = BigRational::from_f64(table[len - 2])?;
                    Some(last.clone() + (last - prev) * int(n - (len as u64 - 1)))
                }
            }
        }
    }
}

/// A positive, convex, unbounded attachment weight rule.
///
/// `shift` realises `W'(n) = W(n + shift)`; it is zero unless built through
/// [`shift_for_m0`].
#[derive(Debug)]
pub struct WeightFunction {
    kind: WeightKind,
    shift: u64,
    domain_floor: u64,
    /// Largest degree whose convexity neighbourhood has been verified.
    checked_to: AtomicU64,
}

impl Clone for WeightFunction {
    fn clone(&self) -> Self {
        WeightFunction {
            kind: self.kind.clone(),
            shift: self.shift,
            domain_floor: self.domain_floor,
            checked_to: AtomicU64::new(self.checked_to.load(Ordering::Relaxed)),
        }
    }
}

impl PartialEq for WeightFunction {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.shift == other.shift
            && self.domain_floor == other.domain_floor
    }
}

impl WeightFunction {
    /// Builds a weight function queried from `domain_floor` upwards.
    pub fn new(kind: WeightKind, domain_floor: u64) -> Result<Self, WeightError> {
        Self::with_shift(kind, 0, domain_floor)
    }

    fn with_shift(kind: WeightKind, shift: u64, domain_floor: u64) -> Result<Self, WeightError> {
        kind.validate()?;
        let w = WeightFunction {
            kind,
            shift,
            domain_floor,
            checked_to: AtomicU64::new(domain_floor),
        };
        w.ensure_convex_to(domain_floor.max(EAGER_SCAN_LIMIT))?;
        Ok(w)
    }

    pub fn basic() -> Self {
        Self::new(WeightKind::Basic, 1).expect("basic weight is valid")
    }

    pub fn linear(beta: f64) -> Result<Self, WeightError> {
        Self::new(WeightKind::Linear { beta }, 1)
    }

    pub fn power(p: f64) -> Result<Self, WeightError> {
        Self::new(WeightKind::Power { p }, 1)
    }

    pub fn table(table: Vec<f64>) -> Result<Self, WeightError> {
        Self::new(WeightKind::Table { table }, 1)
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    pub fn domain_floor(&self) -> u64 {
        self.domain_floor
    }

    /// True when `W` is affine in the degree (basic and linear kinds).
    pub fn is_affine(&self) -> bool {
        matches!(self.kind, WeightKind::Basic | WeightKind::Linear { .. })
    }

    /// The offset `beta` of an affine weight `W(n) = n + beta`, shift included.
    pub fn affine_offset(&self) -> Option<f64> {
        match self.kind {
            WeightKind::Basic => Some(self.shift as f64),
            WeightKind::Linear { beta } => Some(beta + self.shift as f64),
            _ => None,
        }
    }

    /// `W(n)` without domain, positivity or convexity checks.
    #[inline]
    pub fn value_unchecked(&self, n: u64) -> f64 {
        self.kind.raw(n + self.shift)
    }

    /// Evaluates `W(n)`.
    #[inline]
    pub fn eval(&self, n: u64) -> Result<f64, WeightError> {
        if n < self.domain_floor {
            return Err(WeightError::BelowFloor {
                degree: n,
                floor: self.domain_floor,
            });
        }
        if n >= self.checked_to.load(Ordering::Relaxed) {
            self.ensure_convex_to(n + 1)?;
        }
        let v = self.value_unchecked(n);
        if v > 0.0 && !v.is_nan() {
            Ok(v)
        } else {
            Err(WeightError::NonPositive { degree: n, value: v })
        }
    }

    /// Natural logarithm of `W(n)`; stays finite where `W(n)` overflows `f64`.
    pub fn ln_eval(&self, n: u64) -> Result<f64, WeightError> {
        let v = self.eval(n);
        match v {
            Ok(v) if v.is_finite() => Ok(v.ln()),
            Ok(_) => Ok(self.kind.ln_raw(n + self.shift)),
            Err(e) => Err(e),
        }
    }

    /// Exact rational value of `W(n)` when the kind has rational weights.
    pub fn exact(&self, n: u64) -> Option<BigRational> {
        if n < self.domain_floor {
            return None;
        }
        let v = self.kind.exact_raw(n + self.shift)?;
        if v > BigRational::zero() {
            Some(v)
        } else {
            None
        }
    }

    /// Checks `W(k+1) + W(k-1) >= 2 W(k)` for every interior `k <= upto`.
    ///
    /// Concurrent callers may repeat work; the high-water mark only grows.
    fn ensure_convex_to(&self, upto: u64) -> Result<(), WeightError> {
        let from = self.checked_to.load(Ordering::Relaxed).max(self.domain_floor + 1);
        for k in from..=upto {
            let (lo, mid, hi) = (
                self.kind.ln_raw(k - 1 + self.shift),
                self.kind.ln_raw(k + self.shift),
                self.kind.ln_raw(k + 1 + self.shift),
            );
            let ok = if mid.is_finite() && mid < 700.0 {
                let (l, m, h) = (
                    self.value_unchecked(k - 1),
                    self.value_unchecked(k),
                    self.value_unchecked(k + 1),
                );
                let scale = l.abs().max(m.abs()).max(h.abs()).max(1.0);
                h + l - 2.0 * m >= -1e-12 * scale
            } else {
                // Log-space comparison: (W(k-1) + W(k+1)) / 2 >= W(k).
                let top = hi.max(lo);
                let ln_avg = top + ((lo - top).exp() + (hi - top).exp()).ln() - 2f64.ln();
                ln_avg >= mid - 1e-12
            };
            if !ok {
                return Err(WeightError::NonConvex { degree: k });
            }
        }
        self.checked_to.fetch_max(upto, Ordering::Relaxed);
        Ok(())
    }
}

/// The line through `(1, W(1))` and `(a, W(a))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChordData {
    pub a: u64,
    pub slope: f64,
    pub intercept: f64,
    /// `intercept / slope`.
    pub beta: f64,
}

impl ChordData {
    pub fn at(&self, n: f64) -> f64 {
        self.slope * n + self.intercept
    }
}

pub fn chord_of(w: &WeightFunction, a: u64) -> Result<ChordData, WeightError> {
    if a < 2 {
        return Err(WeightError::InvalidParameter(format!(
            "chord node must be at least 2, got {a}"
        )));
    }
    let w1 = w.eval(1)?;
    let wa = w.eval(a)?;
    let slope = (wa - w1) / (a - 1) as f64;
    if slope == 0.0 {
        return Err(WeightError::FlatChord { a });
    }
    let intercept = w1 - slope;
    Ok(ChordData {
        a,
        slope,
        intercept,
        beta: intercept / slope,
    })
}

/// `A0` (first degree with `W(A0) > W(1)`) and `beta0 = beta(A0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceConstants {
    pub a0: u64,
    pub beta0: f64,
}

pub fn reference_constants(w: &WeightFunction) -> Result<ReferenceConstants, WeightError> {
    reference_constants_capped(w, DEFAULT_REFERENCE_CAP)
}

pub fn reference_constants_capped(
    w: &WeightFunction,
    cap: u64,
) -> Result<ReferenceConstants, WeightError> {
    let w1 = w.eval(1)?;
    for a in 2..=cap.max(2) {
        if w.eval(a)? > w1 {
            let chord = chord_of(w, a)?;
            return Ok(ReferenceConstants {
                a0: a,
                beta0: chord.beta,
            });
        }
    }
    Err(WeightError::NotUnbounded { cap })
}

/// `W'(n) = W(n + m0 - 1)`, reducing an `m0`-edge walk to the single-edge one.
pub fn shift_for_m0(w: &WeightFunction, m0: u64) -> Result<WeightFunction, WeightError> {
    if m0 == 0 {
        return Err(WeightError::InvalidParameter("m0 must be at least 1".into()));
    }
    WeightFunction::with_shift(w.kind.clone(), w.shift + m0 - 1, w.domain_floor)
}

/// Converts an exact weight to `f64` for reporting.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
