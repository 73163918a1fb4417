use num_rational::BigRational;
use num_traits::One;

use super::{Path, WalkError, WalkState};
use crate::weights::WeightFunction;

#[inline]
fn ln_add_exp(x: f64, y: f64) -> f64 {
    let hi = x.max(y);
    hi + ((x - hi).exp() + (y - hi).exp()).ln()
}

/// Probability that the walk follows `path`.
///
/// The step-by-step product is used while it stays in the normal range of
/// `f64`. Otherwise both parts are accumulated in log space: every path
/// between the same endpoints has the same numerator `prod W(a) * prod W(b)`
/// over the coordinate values it leaves, so only the denominator product
/// `prod (W(a_k) + W(b_k))` depends on the route.
pub fn path_probability(path: &Path, w: &WeightFunction) -> Result<f64, WalkError> {
    path.validate()?;
    let mut direct = 1.0f64;
    for pair in path.points().windows(2) {
        let (p, q) = (pair[0], pair[1]);
        let (wa, wb) = (w.eval(p.a)?, w.eval(p.b)?);
        let mover = if q.a > p.a { wa } else { wb };
        direct *= mover / (wa + wb);
    }
    if direct.is_normal() || path.is_empty() {
        return Ok(direct);
    }
    let (start, end) = (path.start(), path.end());
    let mut ln_num = 0.0;
    for a in start.a..end.a {
        ln_num += w.ln_eval(a)?;
    }
    for b in start.b..end.b {
        ln_num += w.ln_eval(b)?;
    }
    let mut ln_den = 0.0;
    for p in &path.points()[..path.points().len() - 1] {
        ln_den += ln_add_exp(w.ln_eval(p.a)?, w.ln_eval(p.b)?);
    }
    Ok((ln_num - ln_den).exp())
}

/// Exact path probability; `None` when some weight on the path is not
/// rational.
pub fn path_probability_exact(path: &Path, w: &WeightFunction) -> Result<Option<BigRational>, WalkError> {
    path.validate()?;
    let mut prob = BigRational::one();
    for pair in path.points().windows(2) {
        let (p, q) = (pair[0], pair[1]);
        let (Some(wa), Some(wb)) = (w.exact(p.a), w.exact(p.b)) else {
            return Ok(None);
        };
        let mover = if q.a > p.a { wa.clone() } else { wb.clone() };
        prob = prob * mover / (wa + wb);
    }
    Ok(Some(prob))
}

/// The most probable path from `(a, 1)` to `(m, m)` under any convex weight:
/// straight up to `(a, a)`, then alternating right/up along the diagonal.
pub fn max_prob_path(a: u64, m: u64) -> Result<Path, WalkError> {
    if !(m >= a && a > 1) {
        return Err(WalkError::Domain(format!(
            "max_prob_path needs m >= A > 1, got A={a}, m={m}"
        )));
    }
    let mut pts: Vec<WalkState> = (1..=a).map(|b| WalkState::new(a, b)).collect();
    for k in a..m {
        pts.push(WalkState::new(k + 1, k));
        pts.push(WalkState::new(k + 1, k + 1));
    }
    Ok(Path(pts))
}
