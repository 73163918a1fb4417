use serde::Serialize;

use super::AnalysisError;

/// Least-squares slope of `ln M_n` against `ln n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Pools every checkpoint with `n >= n_min` across `curves` into one
/// regression. Needs at least ten curves.
pub fn fit_scaling_exponent(
    curves: &[Vec<(u64, u64)>],
    n_min: u64,
) -> Result<ScalingFit, AnalysisError> {
    if curves.len() < 10 {
        return Err(AnalysisError::InsufficientData(format!(
            "need at least 10 curves, got {}",
            curves.len()
        )));
    }
    let pts: Vec<(f64, f64)> = curves
        .iter()
        .flatten()
        .filter(|&&(n, m)| n >= n_min.max(1) && m > 0)
        .map(|&(n, m)| ((n as f64).ln(), (m as f64).ln()))
        .collect();
    let k = pts.len() as f64;
    if pts.len() < 3 {
        return Err(AnalysisError::InsufficientData(format!(
            "only {} checkpoints at or above n_min = {n_min}",
            pts.len()
        )));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(AnalysisError::InsufficientData(
            "all checkpoints share one n".into(),
        ));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = (rss / (k - 2.0) / sxx).sqrt();
    Ok(ScalingFit {
        exponent: slope,
        stderr,
        intercept,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::checkpoint_schedule;

    fn synthetic(c: f64, gamma: f64) -> Vec<(u64, u64)> {
        checkpoint_schedule(100_000, &[])
            .into_iter()
            .filter(|&n| n > 0)
            .map(|n| (n, (c * (n as f64).powf(gamma)).ceil() as u64))
            .collect()
    }

    #[test]
    fn recovers_synthetic_exponents() {
        for gamma in [0.25, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            for c in [2.0, 5.0, 10.0] {
                let curves: Vec<_> = (0..10).map(|_| synthetic(c, gamma)).collect();
                let fit = fit_scaling_exponent(&curves, 1000).unwrap();
                assert!((fit.exponent - gamma).abs() <= 0.01, "gamma={gamma} c={c} {fit:?}");
            }
        }
    }

    #[test]
    fn rejects_thin_data() {
        let curves: Vec<_> = (0..9).map(|_| synthetic(1.0, 0.5)).collect();
        assert!(fit_scaling_exponent(&curves, 1000).is_err());
        let curves: Vec<_> = (0..10).map(|_| vec![(5000u64, 70u64)]).collect();
        assert!(fit_scaling_exponent(&curves, 1000).is_err());
    }
}
