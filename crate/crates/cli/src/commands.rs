use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{bail, Result};
use hubsim_core::analysis::{
    fit_scaling_exponent, hub_persistence_report, leader_agreement, PersistenceReport, TrialSummary,
};
use hubsim_core::harness::{run_trials, simulate_trials, StateChecks};
use hubsim_core::pairwalk::{
    count_admissible_paths, diagonal_first_hit, enumerate_admissible_paths, max_prob_path,
    path_probability, path_probability_exact, q_decay_profile, ratio_limit_sample, run_coupled,
    beta_limit_parameters, CouplingOutcome, WalkState,
};
use hubsim_core::stats::{ks_test_beta, mean_and_stderr};
use hubsim_core::weights::{rational_to_f64, reference_constants, WeightFunction};
use hubsim_core::RunOptions;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ExactOp, Format, RunConfig, Suite};
use crate::output::{emit, fmt_f64, to_json, Csv};

/// Exit status when a verification suite finds a violation.
pub const EXIT_VIOLATION: i32 = 2;

fn write(cfg: &RunConfig, bytes: Vec<u8>) -> Result<()> {
    emit(cfg.out.as_deref(), &bytes)
}

fn weights(cfg: &RunConfig) -> Result<Arc<WeightFunction>> {
    Ok(Arc::new(cfg.weight_function()?))
}

fn rational_string(r: &BigRational) -> String {
    r.to_string()
}

pub fn generate(cfg: &RunConfig) -> Result<i32> {
    let opts = RunOptions {
        watch: cfg.watch.clone(),
        checkpoints: cfg.nhalf.into_iter().collect(),
        emit_edges: cfg.emit_edges.is_some(),
    };
    let summaries = simulate_trials(
        weights(cfg)?,
        cfg.m0,
        cfg.seed,
        cfg.trials,
        cfg.steps,
        &opts,
        StateChecks::default(),
        cfg.workers,
    )?;
    if let Some(path) = &cfg.emit_edges {
        let mut csv = Csv::new(&["trial", "source", "target"]);
        for s in &summaries {
            for (u, v) in &s.edges {
                csv.row(&[s.trial.to_string(), u.to_string(), v.to_string()]);
            }
        }
        emit(Some(path), &csv.into_bytes())?;
    }
    let bytes = match cfg.format {
        Format::Json => to_json(&summaries)?,
        Format::Csv => {
            let mut csv = Csv::new(&[
                "trial",
                "seed",
                "steps",
                "final_max_degree",
                "final_leader",
                "distinct_sole_leaders",
                "last_leader_change_step",
                "watch_degrees",
            ]);
            for s in &summaries {
                let watch: Vec<String> = s.watch_degrees.iter().map(u64::to_string).collect();
                csv.row(&[
                    s.trial.to_string(),
                    s.seed.to_string(),
                    s.steps.to_string(),
                    s.final_max_degree.to_string(),
                    s.final_leader.map(|v| v.to_string()).unwrap_or_default(),
                    s.distinct_sole_leaders.to_string(),
                    s.last_leader_change_step.to_string(),
                    watch.join(";"),
                ]);
            }
            csv.into_bytes()
        }
    };
    write(cfg, bytes)?;
    Ok(0)
}

#[derive(Serialize)]
struct AgreementRow {
    n1: u64,
    n2: u64,
    fraction: f64,
}

#[derive(Serialize)]
struct HubsReport {
    steps: u64,
    seed: u64,
    #[serde(flatten)]
    report: PersistenceReport,
    decade_agreement: Vec<AgreementRow>,
}

pub fn hubs(cfg: &RunConfig) -> Result<i32> {
    let n_half = cfg.nhalf.unwrap_or(cfg.steps / 10);
    if 2 * n_half > cfg.steps {
        bail!("nhalf must satisfy 2 * nhalf <= steps, got nhalf = {n_half}, steps = {}", cfg.steps);
    }
    let opts = RunOptions {
        checkpoints: vec![n_half],
        ..Default::default()
    };
    let summaries = simulate_trials(
        weights(cfg)?,
        cfg.m0,
        cfg.seed,
        cfg.trials,
        cfg.steps,
        &opts,
        StateChecks::default(),
        cfg.workers,
    )?;
    let report = hub_persistence_report(&summaries, n_half);
    let mut decade_agreement = Vec::new();
    let mut n1 = 1u64;
    while n1 * 10 <= cfg.steps {
        decade_agreement.push(AgreementRow {
            n1,
            n2: n1 * 10,
            fraction: leader_agreement(&summaries, n1, n1 * 10),
        });
        n1 *= 10;
    }
    let bytes = match cfg.format {
        Format::Json => to_json(&HubsReport {
            steps: cfg.steps,
            seed: cfg.seed,
            report,
            decade_agreement,
        })?,
        Format::Csv => {
            let mut csv = Csv::new(&["distinct_sole_leaders", "trials"]);
            for (k, v) in &report.distinct_leader_histogram {
                csv.row(&[k.to_string(), v.to_string()]);
            }
            csv.into_bytes()
        }
    };
    write(cfg, bytes)?;
    Ok(0)
}

#[derive(Serialize)]
struct WalkRow {
    m: u64,
    q_a_m: f64,
    cumulative: f64,
    tail_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    q_exact: Option<String>,
}

#[derive(Serialize)]
struct WalkReport {
    a: u64,
    b: u64,
    m_max: u64,
    exact: bool,
    tail_is_exact: bool,
    in_flight: f64,
    q_lower: f64,
    q_upper: f64,
    rows: Vec<WalkRow>,
}

pub fn walk(cfg: &RunConfig) -> Result<i32> {
    let w = cfg.weight_function()?;
    let start = WalkState::new(cfg.a, cfg.b);
    let m_max = cfg.mmax.unwrap_or(cfg.a + 32);
    let table = diagonal_first_hit(start, m_max, &w, cfg.mode.into())?;
    let (q_lower, q_upper) = table.q_bounds();
    let exact_total = table
        .exact
        .as_ref()
        .and_then(|e| e.tail.as_ref().map(|t| &e.cumulative + t));
    let mut rows = Vec::with_capacity(table.rows.len());
    let mut exact_cum = BigRational::from_integer(0.into());
    for (i, r) in table.rows.iter().enumerate() {
        let q_exact = table.exact.as_ref().map(|e| e.q[i].clone());
        let tail_bound = match (&exact_total, &q_exact) {
            (Some(total), Some(q)) => {
                exact_cum += q;
                rational_to_f64(&(total - &exact_cum))
            }
            _ => (q_upper - r.cumulative).max(0.0),
        };
        rows.push(WalkRow {
            m: r.m,
            q_a_m: r.q,
            cumulative: r.cumulative,
            tail_bound,
            q_exact: q_exact.as_ref().map(rational_string),
        });
    }
    let bytes = match cfg.format {
        Format::Json => to_json(&WalkReport {
            a: cfg.a,
            b: cfg.b,
            m_max,
            exact: table.exact.is_some(),
            tail_is_exact: table.tail_is_exact,
            in_flight: table.in_flight,
            q_lower,
            q_upper,
            rows,
        })?,
        Format::Csv => {
            let mut csv = Csv::new(&["m", "q_A_m", "cumulative", "tail_bound"]);
            for r in &rows {
                csv.row(&[
                    r.m.to_string(),
                    fmt_f64(r.q_a_m),
                    fmt_f64(r.cumulative),
                    fmt_f64(r.tail_bound),
                ]);
            }
            csv.into_bytes()
        }
    };
    write(cfg, bytes)?;
    Ok(0)
}

#[derive(Serialize)]
struct UrnReport {
    a: u64,
    beta: f64,
    horizon: u64,
    trials: u64,
    beta_parameters: (f64, f64),
    expected_mean: f64,
    mean: f64,
    stderr: f64,
    ks_statistic: f64,
    ks_p_value: f64,
    samples: Vec<f64>,
}

pub fn urn(cfg: &RunConfig) -> Result<i32> {
    let w = cfg.weight_function()?;
    let Some(beta) = w.affine_offset() else {
        bail!("urn needs the basic or linear model");
    };
    if cfg.a < 1 {
        bail!("urn needs A >= 1");
    }
    let samples: Vec<f64> = run_trials(cfg.seed, cfg.trials, cfg.workers, |_, seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ratio_limit_sample(cfg.a, &w, cfg.horizon, &mut rng)
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let (pa, pb) = beta_limit_parameters(cfg.a, beta);
    let ks = ks_test_beta(&samples, pa, pb);
    let (mean, stderr) = mean_and_stderr(&samples);
    let expected_mean = pa / (pa + pb);
    eprintln!(
        "Beta({pa}, {pb}): mean {mean:.6} (expected {expected_mean:.6}, stderr {stderr:.2e}), KS D = {:.5}, p = {:.4}",
        ks.statistic, ks.p_value
    );
    let bytes = match cfg.format {
        Format::Json => to_json(&UrnReport {
            a: cfg.a,
            beta,
            horizon: cfg.horizon,
            trials: cfg.trials,
            beta_parameters: (pa, pb),
            expected_mean,
            mean,
            stderr,
            ks_statistic: ks.statistic,
            ks_p_value: ks.p_value,
            samples,
        })?,
        Format::Csv => {
            let mut csv = Csv::new(&["trial", "seed", "ratio"]);
            for (t, x) in samples.iter().enumerate() {
                csv.row(&[
                    t.to_string(),
                    hubsim_core::harness::trial_seed(cfg.seed, t as u64).to_string(),
                    fmt_f64(*x),
                ]);
            }
            csv.into_bytes()
        }
    };
    write(cfg, bytes)?;
    Ok(0)
}

fn coupling_runs(cfg: &RunConfig) -> Result<Vec<(u64, CouplingOutcome)>> {
    let w = cfg.weight_function()?;
    let start = WalkState::new(cfg.a, cfg.b);
    let runs = run_trials(cfg.seed, cfg.trials, cfg.workers, |_, seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        run_coupled(&w, start, cfg.steps, &mut rng).map(|o| (seed, o))
    });
    Ok(runs.into_iter().collect::<Result<_, _>>()?)
}

#[derive(Serialize)]
struct CouplingReport {
    trials: u64,
    steps: u64,
    beta0: f64,
    violations: u64,
    parity_violations: u64,
    runs: Vec<CouplingOutcome>,
}

pub fn coupling(cfg: &RunConfig) -> Result<i32> {
    let runs = coupling_runs(cfg)?;
    let beta0 = reference_constants(&cfg.weight_function()?)?.beta0;
    let bytes = match cfg.format {
        Format::Json => to_json(&CouplingReport {
            trials: cfg.trials,
            steps: cfg.steps,
            beta0,
            violations: runs.iter().map(|r| r.1.violations).sum(),
            parity_violations: runs.iter().map(|r| r.1.parity_violations).sum(),
            runs: runs.iter().map(|r| r.1).collect(),
        })?,
        Format::Csv => {
            let mut csv = Csv::new(&[
                "trial",
                "seed",
                "steps",
                "violations",
                "parity_violations",
                "final_delta",
                "final_delta_tilde",
            ]);
            for (t, (seed, o)) in runs.iter().enumerate() {
                csv.row(&[
                    t.to_string(),
                    seed.to_string(),
                    o.steps.to_string(),
                    o.violations.to_string(),
                    o.parity_violations.to_string(),
                    o.final_state.delta.to_string(),
                    o.final_state.delta_tilde.to_string(),
                ]);
            }
            csv.into_bytes()
        }
    };
    write(cfg, bytes)?;
    Ok(0)
}

#[derive(Serialize)]
struct ScalingReport {
    exponent: f64,
    stderr: f64,
    intercept: f64,
    points: usize,
    trials: u64,
    steps: u64,
    n_min: u64,
    /// `1 / (2 + beta)` for affine weights.
    predicted: Option<f64>,
    /// `1 / (4 + 2 beta0)`.
    lower_bound: f64,
}

pub fn scaling(cfg: &RunConfig) -> Result<i32> {
    let w = weights(cfg)?;
    let consts = reference_constants(&w)?;
    let summaries = simulate_trials(
        w.clone(),
        cfg.m0,
        cfg.seed,
        cfg.trials,
        cfg.steps,
        &RunOptions::default(),
        StateChecks::default(),
        cfg.workers,
    )?;
    let curves: Vec<_> = summaries.iter().map(TrialSummary::curve_pairs).collect();
    let fit = fit_scaling_exponent(&curves, cfg.nmin)?;
    let report = ScalingReport {
        exponent: fit.exponent,
        stderr: fit.stderr,
        intercept: fit.intercept,
        points: fit.points,
        trials: cfg.trials,
        steps: cfg.steps,
        n_min: cfg.nmin,
        predicted: w.affine_offset().map(|b| 1.0 / (2.0 + b)),
        lower_bound: 1.0 / (4.0 + 2.0 * consts.beta0),
    };
    let bytes = match cfg.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut csv = Csv::new(&["exponent", "stderr", "intercept", "points", "lower_bound"]);
            csv.row(&[
                fmt_f64(report.exponent),
                fmt_f64(report.stderr),
                fmt_f64(report.intercept),
                report.points.to_string(),
                fmt_f64(report.lower_bound),
            ]);
            csv.into_bytes()
        }
    };
    write(cfg, bytes)?;
    Ok(0)
}

#[derive(Serialize)]
struct VerifyReport {
    suite: &'static str,
    trials: u64,
    steps: u64,
    a0: u64,
    beta0: f64,
    checked_states: u64,
    violations: u64,
    parity_violations: u64,
}

pub fn verify(cfg: &RunConfig) -> Result<i32> {
    let w = weights(cfg)?;
    let consts = reference_constants(&w)?;
    let mut report = VerifyReport {
        suite: "",
        trials: cfg.trials,
        steps: cfg.steps,
        a0: consts.a0,
        beta0: consts.beta0,
        checked_states: 0,
        violations: 0,
        parity_violations: 0,
    };
    match cfg.suite {
        Suite::Coupling => {
            report.suite = "coupling";
            let runs = coupling_runs(cfg)?;
            report.checked_states = cfg.trials * cfg.steps;
            report.violations = runs.iter().map(|r| r.1.violations).sum();
            report.parity_violations = runs.iter().map(|r| r.1.parity_violations).sum();
        }
        suite => {
            if cfg.m0 != 1 {
                bail!("the {suite:?} suite checks tree-model states and needs m0 = 1");
            }
            let checks = StateChecks {
                supermartingale: suite == Suite::Supermartingale,
                comparison: suite == Suite::Comparison,
            };
            report.suite = if checks.supermartingale {
                "supermartingale"
            } else {
                "comparison"
            };
            let summaries = simulate_trials(
                w,
                1,
                cfg.seed,
                cfg.trials,
                cfg.steps,
                &RunOptions::default(),
                checks,
                cfg.workers,
            )?;
            report.checked_states = summaries.iter().map(|s| s.checked_states).sum();
            report.violations = summaries
                .iter()
                .map(|s| s.supermartingale_violations + s.comparison_violations)
                .sum();
        }
    }
    let bytes = match cfg.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut csv = Csv::new(&["suite", "checked_states", "violations", "parity_violations"]);
            csv.row(&[
                report.suite.to_string(),
                report.checked_states.to_string(),
                report.violations.to_string(),
                report.parity_violations.to_string(),
            ]);
            csv.into_bytes()
        }
    };
    write(cfg, bytes)?;
    if report.violations + report.parity_violations > 0 {
        eprintln!(
            "{} suite: {} violations, {} parity violations",
            report.suite, report.violations, report.parity_violations
        );
        return Ok(EXIT_VIOLATION);
    }
    Ok(0)
}

#[derive(Serialize)]
struct PathRow {
    path: String,
    probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
}

pub fn exact(cfg: &RunConfig) -> Result<i32> {
    let w = cfg.weight_function()?;
    let need_m = || {
        cfg.m
            .ok_or_else(|| anyhow::anyhow!("this operation needs the diagonal level --m"))
    };
    let bytes = match cfg.op {
        ExactOp::Count => {
            let m = need_m()?;
            let count = count_admissible_paths(cfg.a, cfg.b, m)?;
            match cfg.format {
                Format::Json => {
                    let mut map = BTreeMap::new();
                    map.insert("A", cfg.a.to_string());
                    map.insert("B", cfg.b.to_string());
                    map.insert("m", m.to_string());
                    map.insert("count", count.to_string());
                    to_json(&map)?
                }
                Format::Csv => {
                    let mut csv = Csv::new(&["A", "B", "m", "count"]);
                    csv.row(&[cfg.a.to_string(), cfg.b.to_string(), m.to_string(), count.to_string()]);
                    csv.into_bytes()
                }
            }
        }
        ExactOp::Enumerate | ExactOp::MaxPath => {
            let m = need_m()?;
            let paths = if cfg.op == ExactOp::MaxPath {
                vec![max_prob_path(cfg.a, m)?]
            } else {
                enumerate_admissible_paths(WalkState::new(cfg.a, cfg.b), WalkState::new(m, m))?
            };
            let mut rows = Vec::with_capacity(paths.len());
            for p in &paths {
                rows.push(PathRow {
                    path: p.to_string(),
                    probability: path_probability(p, &w)?,
                    exact: path_probability_exact(p, &w)?.as_ref().map(rational_string),
                });
            }
            match cfg.format {
                Format::Json => to_json(&rows)?,
                Format::Csv => {
                    let mut csv = Csv::new(&["path", "probability", "exact"]);
                    for r in &rows {
                        csv.row(&[
                            format!("\"{}\"", r.path),
                            fmt_f64(r.probability),
                            r.exact.clone().unwrap_or_default(),
                        ]);
                    }
                    csv.into_bytes()
                }
            }
        }
        ExactOp::Decay => {
            if cfg.a < 2 {
                bail!("decay profile needs A >= 2");
            }
            let rows = q_decay_profile(2..=cfg.a, &w, cfg.mode.into())?;
            match cfg.format {
                Format::Json => to_json(&rows)?,
                Format::Csv => {
                    let mut csv =
                        Csv::new(&["A", "q", "q_upper", "q_times_2_pow_A", "uncertainty", "exact"]);
                    for r in &rows {
                        csv.row(&[
                            r.a.to_string(),
                            fmt_f64(r.q),
                            fmt_f64(r.q_upper),
                            fmt_f64(r.q_times_2a),
                            fmt_f64(r.uncertainty),
                            r.exact.as_ref().map(rational_string).unwrap_or_default(),
                        ]);
                    }
                    csv.into_bytes()
                }
            }
        }
    };
    write(cfg, bytes)?;
    Ok(0)
}
