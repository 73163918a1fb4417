//! Counting and enumerating up-right lattice paths.

use num_bigint::BigUint;
use num_traits::One;

use super::{Path, WalkError, WalkState};

/// Longest path the brute-force enumerators accept.
pub const ENUMERATION_CAP: u64 = 24;

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Number of up-right paths from `from` to `to` (zero if unreachable).
pub fn count_paths(from: WalkState, to: WalkState) -> BigUint {
    if to.a < from.a || to.b < from.b {
        return BigUint::ZERO;
    }
    let (right, up) = (to.a - from.a, to.b - from.b);
    factorial(right + up) / (factorial(right) * factorial(up))
}

/// Paths from `(a, b)` to `(m, m)` whose interior avoids the diagonal:
/// `(2m - 1 - a - b)! (a - b) / ((m - a)! (m - b)!)`.
pub fn count_admissible_paths(a: u64, b: u64, m: u64) -> Result<BigUint, WalkError> {
    if !(m >= a && a > b && b >= 1) {
        return Err(WalkError::Domain(format!(
            "admissible path count needs m >= A > B >= 1, got A={a}, B={b}, m={m}"
        )));
    }
    Ok(factorial(2 * m - 1 - a - b) * (a - b) / (factorial(m - a) * factorial(m - b)))
}

fn check_len(from: WalkState, to: WalkState) -> Result<(), WalkError> {
    if to.a < from.a || to.b < from.b {
        return Err(WalkError::Domain(format!("{to} is not reachable from {from}")));
    }
    let len = to.sum() - from.sum();
    if len > ENUMERATION_CAP {
        return Err(WalkError::TooLong {
            len,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

/// Visits every up-right path from `from` to `to`, or only the admissible
/// ones, by exhaustive recursion.
pub fn for_each_path<F>(
    from: WalkState,
    to: WalkState,
    admissible_only: bool,
    mut visit: F,
) -> Result<(), WalkError>
where
    F: FnMut(&[WalkState]),
{
    check_len(from, to)?;
    let mut stack = vec![from];
    recurse(&mut stack, to, admissible_only, &mut visit);
    Ok(())
}

fn recurse<F: FnMut(&[WalkState])>(
    stack: &mut Vec<WalkState>,
    to: WalkState,
    admissible_only: bool,
    visit: &mut F,
) {
    let here = *stack.last().unwrap();
    if here == to {
        visit(stack);
        return;
    }
    for next in [
        WalkState::new(here.a + 1, here.b),
        WalkState::new(here.a, here.b + 1),
    ] {
        if next.a > to.a || next.b > to.b {
            continue;
        }
        if admissible_only && next != to && next.on_diagonal() {
            continue;
        }
        stack.push(next);
        recurse(stack, to, admissible_only, visit);
        stack.pop();
    }
}

pub fn enumerate_admissible_paths(from: WalkState, to: WalkState) -> Result<Vec<Path>, WalkError> {
    let mut out = Vec::new();
    for_each_path(from, to, true, |p| out.push(Path(p.to_vec())))?;
    Ok(out)
}

pub fn enumerate_paths(from: WalkState, to: WalkState) -> Result<Vec<Path>, WalkError> {
    let mut out = Vec::new();
    for_each_path(from, to, false, |p| out.push(Path(p.to_vec())))?;
    Ok(out)
}

pub fn count_paths_by_enumeration(
    from: WalkState,
    to: WalkState,
    admissible_only: bool,
) -> Result<u64, WalkError> {
    let mut n = 0u64;
    for_each_path(from, to, admissible_only, |_| n += 1)?;
    Ok(n)
}
