//! The affine walk as a Pólya urn.
//!
//! With `W(n) = n + beta` the walk from `(A, 1)` is an urn holding
//! `A + beta` and `1 + beta` balls, so the share of the second coordinate
//! converges to a `Beta(1 + beta, A + beta)` variable.

use rand::Rng;

use super::WalkError;
use crate::weights::WeightFunction;

/// Parameters `(1 + beta, A + beta)` of the limiting share of the coordinate
/// that starts at 1.
pub fn beta_limit_parameters(a: u64, beta: f64) -> (f64, f64) {
    (1.0 + beta, a as f64 + beta)
}

/// Runs `horizon` steps from `(A, 1)` and returns `B / (A + B)`, a sample
/// approximating the limiting share.
pub fn ratio_limit_sample<R: Rng + ?Sized>(
    a: u64,
    w: &WeightFunction,
    horizon: u64,
    rng: &mut R,
) -> Result<f64, WalkError> {
    if a < 1 {
        return Err(WalkError::Domain("urn start needs A >= 1".into()));
    }
    let beta = w.affine_offset().ok_or_else(|| {
        WalkError::Domain("the beta limit needs an affine weight n + beta".into())
    })?;
    let (mut x, mut y) = (a as f64 + beta, 1.0 + beta);
    for _ in 0..horizon {
        if rng.random::<f64>() * (x + y) < x {
            x += 1.0;
        } else {
            y += 1.0;
        }
    }
    let (a_k, b_k) = (x - beta, y - beta);
    Ok(b_k / (a_k + b_k))
}
