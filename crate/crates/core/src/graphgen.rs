//! The preferential attachment process.
//!
//! Two variants are driven from the same state type:
//!
//! * `m0 = 1`: the tree model. It starts with one vertex of degree zero and
//!   every step adds a vertex joined to one old vertex; the first attachment
//!   is forced.
//! * `m0 > 1`: the multi-edge model. It starts empty; step `n` creates vertex
//!   `n / m0` when `n % m0 == 0` and joins the newest vertex to one strictly
//!   older vertex.
//!
//! Old vertices are chosen with probability proportional to `W(degree)`
//! through a Fenwick tree over the per-vertex weights.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::{CurvePoint, TrialSummary};
use crate::fenwick::Fenwick;
use crate::hub::HubRecord;
use crate::weights::{WeightError, WeightFunction};

/// Steps between full recomputations of the weight index.
pub const RESYNC_INTERVAL: u64 = 1 << 16;

/// Relative tolerance between incremental and recomputed totals.
pub const RESYNC_TOLERANCE: f64 = 1e-9;

/// Weights above this switch the index to log-domain storage.
const LOG_MODE_THRESHOLD: f64 = 1e300;
/// Largest `ln(weight) - shift` stored in log-domain mode.
const LOG_CEILING: f64 = 650.0;
/// Margin left below the ceiling after a re-shift.
const LOG_HEADROOM: f64 = 300.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("m0 must be at least 1")]
    InvalidM0,
    #[error("no vertex is eligible as an attachment target")]
    NoEligibleVertex,
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("weight index drifted: incremental {incremental}, recomputed {recomputed}")]
    Drift { incremental: f64, recomputed: f64 },
    #[error("cached maximal degree disagrees with a full scan at step {step}")]
    HubMismatch { step: u64 },
}

/// Outcome of one elementary step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Attachment {
    /// Vertex whose edge was added (the new vertex in the tree model).
    pub source: usize,
    /// Old vertex that received the edge, if an edge was added.
    pub target: Option<usize>,
    /// Vertex created during this step.
    pub new_vertex: Option<usize>,
}

#[derive(Debug, Clone)]
struct WeightIndex {
    tree: Fenwick,
    /// Stored weight per vertex, scaled by `exp(-shift)` in log mode.
    values: Vec<f64>,
    /// `ln W` per vertex, present only in log-domain mode.
    ln_values: Option<Vec<f64>>,
    shift: f64,
    total: f64,
}

impl WeightIndex {
    fn new() -> Self {
        WeightIndex {
            tree: Fenwick::new(),
            values: Vec::new(),
            ln_values: None,
            shift: 0.0,
            total: 0.0,
        }
    }

    fn log_mode(&self) -> bool {
        self.ln_values.is_some()
    }

    /// Degree-zero vertices carry zero weight; see the module docs.
    fn weight_of(w: &WeightFunction, degree: u64) -> Result<f64, WeightError> {
        if degree == 0 {
            Ok(0.0)
        } else {
            w.eval(degree)
        }
    }

    fn ln_weight_of(w: &WeightFunction, degree: u64) -> Result<f64, WeightError> {
        if degree == 0 {
            Ok(f64::NEG_INFINITY)
        } else {
            w.ln_eval(degree)
        }
    }

    fn push(&mut self, w: &WeightFunction, degree: u64, degrees: &[u64]) -> Result<(), GraphError> {
        self.values.push(0.0);
        self.tree.push(0.0);
        if let Some(ln) = self.ln_values.as_mut() {
            ln.push(f64::NEG_INFINITY);
        }
        self.set(w, self.values.len() - 1, degree, degrees)
    }

    fn set(
        &mut self,
        w: &WeightFunction,
        vertex: usize,
        degree: u64,
        degrees: &[u64],
    ) -> Result<(), GraphError> {
        if !self.log_mode() {
            let value = Self::weight_of(w, degree)?;
            if value <= LOG_MODE_THRESHOLD {
                let delta = value - self.values[vertex];
                self.values[vertex] = value;
                self.tree.add(vertex, delta);
                self.total += delta;
                return Ok(());
            }
            self.enter_log_mode(w, degrees)?;
        }
        let ln = Self::ln_weight_of(w, degree)?;
        self.ln_values.as_mut().expect("log mode")[vertex] = ln;
        if ln - self.shift > LOG_CEILING {
            self.shift = ln - LOG_HEADROOM;
            self.rebuild_from_ln();
            return Ok(());
        }
        let value = (ln - self.shift).exp();
        let delta = value - self.values[vertex];
        self.values[vertex] = value;
        self.tree.add(vertex, delta);
        self.total += delta;
        Ok(())
    }

    fn enter_log_mode(&mut self, w: &WeightFunction, degrees: &[u64]) -> Result<(), GraphError> {
        let ln: Vec<f64> = degrees
            .iter()
            .map(|&d| Self::ln_weight_of(w, d))
            .collect::<Result<_, _>>()?;
        let max = ln.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.shift = if max.is_finite() { max - LOG_HEADROOM } else { 0.0 };
        self.ln_values = Some(ln);
        self.rebuild_from_ln();
        Ok(())
    }

    fn rebuild_from_ln(&mut self) {
        let shift = self.shift;
        let ln = self.ln_values.as_ref().expect("log mode");
        self.values = ln.iter().map(|&l| (l - shift).exp()).collect();
        self.tree = Fenwick::from_values(&self.values);
        self.total = self.values.iter().sum();
    }

    /// Recomputes every weight from `degrees` and rebuilds the tree.
    /// Returns the freshly summed total.
    fn resync(&mut self, w: &WeightFunction, degrees: &[u64]) -> Result<f64, GraphError> {
        if self.log_mode() {
            let ln: Vec<f64> = degrees
                .iter()
                .map(|&d| Self::ln_weight_of(w, d))
                .collect::<Result<_, _>>()?;
            self.ln_values = Some(ln);
            let shift = self.shift;
            self.values = self.ln_values.as_ref().unwrap().iter().map(|&l| (l - shift).exp()).collect();
        } else {
            self.values = degrees
                .iter()
                .map(|&d| Self::weight_of(w, d))
                .collect::<Result<_, _>>()?;
        }
        let fresh: f64 = self.values.iter().sum();
        self.tree = Fenwick::from_values(&self.values);
        Ok(fresh)
    }
}

/// State of one trajectory.
#[derive(Debug, Clone)]
pub struct DegreeState {
    weights: Arc<WeightFunction>,
    m0: u64,
    degrees: Vec<u64>,
    index: WeightIndex,
    step: u64,
    edges: u64,
    seed: u64,
    rng: ChaCha8Rng,
}

impl DegreeState {
    /// Fresh trajectory. `m0 = 1` starts with one isolated vertex, larger
    /// `m0` starts empty.
    pub fn new_trajectory(
        weights: Arc<WeightFunction>,
        m0: u64,
        seed: u64,
    ) -> Result<Self, GraphError> {
        if m0 == 0 {
            return Err(GraphError::InvalidM0);
        }
        let mut state = DegreeState {
            weights,
            m0,
            degrees: Vec::new(),
            index: WeightIndex::new(),
            step: 0,
            edges: 0,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        if m0 == 1 {
            state.push_vertex()?;
        }
        Ok(state)
    }

    /// A tree-model state with the given degrees, as if `degrees.len() - 1`
    /// steps had been completed. Used to probe the sampler and the
    /// per-state checks on hand-built configurations.
    pub fn from_degrees(
        weights: Arc<WeightFunction>,
        degrees: &[u64],
        seed: u64,
    ) -> Result<Self, GraphError> {
        let mut state = Self::new_trajectory(weights, 1, seed)?;
        state.degrees.clear();
        state.index = WeightIndex::new();
        for &d in degrees {
            state.degrees.push(d);
            let degrees = state.degrees.clone();
            state.index.push(&state.weights, d, &degrees)?;
        }
        state.step = degrees.len().saturating_sub(1) as u64;
        state.edges = degrees.iter().sum::<u64>() / 2;
        Ok(state)
    }

    pub fn weights(&self) -> &WeightFunction {
        &self.weights
    }

    pub fn m0(&self) -> u64 {
        self.m0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn degree(&self, vertex: usize) -> u64 {
        self.degrees.get(vertex).copied().unwrap_or(0)
    }

    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }

    /// Completed elementary steps.
    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn edge_count(&self) -> u64 {
        self.edges
    }

    /// Incrementally maintained total weight; scaled by `exp(-shift)` in
    /// log-domain mode, see [`Self::ln_total_weight`].
    pub fn total_weight(&self) -> f64 {
        self.index.total
    }

    pub fn ln_total_weight(&self) -> f64 {
        self.index.shift + self.index.total.ln()
    }

    pub fn log_domain(&self) -> bool {
        self.index.log_mode()
    }

    /// Total weight recomputed from scratch, in the same scale as
    /// [`Self::total_weight`].
    pub fn recomputed_total_weight(&self) -> Result<f64, GraphError> {
        let mut sum = 0.0;
        for &d in &self.degrees {
            sum += if self.index.log_mode() {
                (WeightIndex::ln_weight_of(&self.weights, d)? - self.index.shift).exp()
            } else {
                WeightIndex::weight_of(&self.weights, d)?
            };
        }
        Ok(sum)
    }

    /// Number of vertices that may receive the next edge.
    pub fn eligible_count(&self) -> usize {
        if self.m0 == 1 {
            self.degrees.len()
        } else {
            let next_creates = self.step.is_multiple_of(self.m0);
            if next_creates {
                self.degrees.len()
            } else {
                self.degrees.len().saturating_sub(1)
            }
        }
    }

    /// Probability that the next edge lands on `vertex`.
    pub fn attachment_probability(&self, vertex: usize) -> f64 {
        let eligible = self.eligible_count();
        if vertex >= eligible {
            return 0.0;
        }
        let total = self.index.tree.prefix(eligible);
        if total > 0.0 {
            self.index.values[vertex] / total
        } else {
            1.0 / eligible as f64
        }
    }

    fn push_vertex(&mut self) -> Result<usize, GraphError> {
        self.degrees.push(0);
        let degrees = &self.degrees;
        self.index.push(&self.weights, 0, degrees)?;
        Ok(self.degrees.len() - 1)
    }

    fn bump(&mut self, vertex: usize) -> Result<(), GraphError> {
        self.degrees[vertex] += 1;
        let d = self.degrees[vertex];
        let degrees = &self.degrees;
        self.index.set(&self.weights, vertex, d, degrees)
    }

    /// Draws a target among the first `eligible` vertices with probability
    /// proportional to their weight; uniform when that weight is zero.
    fn sample_among(&mut self, eligible: usize) -> Result<usize, GraphError> {
        if eligible == 0 {
            return Err(GraphError::NoEligibleVertex);
        }
        let total = self.index.tree.prefix(eligible);
        if !(total > 0.0) {
            return Ok(self.rng.random_range(0..eligible));
        }
        let u: f64 = self.rng.random();
        let mut k = self.index.tree.find(u * total);
        if k >= eligible {
            k = eligible - 1;
        }
        // Rounding can land on a zero-weight slot at the very end.
        while self.index.values[k] == 0.0 && k > 0 {
            k -= 1;
        }
        Ok(k)
    }

    /// Samples the target of the next edge, without changing the degrees.
    pub fn sample_target(&mut self) -> Result<usize, GraphError> {
        let eligible = self.eligible_count();
        self.sample_among(eligible)
    }

    /// Executes one elementary step.
    pub fn step(&mut self) -> Result<Attachment, GraphError> {
        let attachment = if self.m0 == 1 {
            let target = if self.step == 0 { 0 } else { self.sample_among(self.degrees.len())? };
            self.bump(target)?;
            let new_vertex = self.push_vertex()?;
            self.bump(new_vertex)?;
            self.edges += 1;
            Attachment {
                source: new_vertex,
                target: Some(target),
                new_vertex: Some(new_vertex),
            }
        } else {
            let new_vertex = if self.step.is_multiple_of(self.m0) {
                Some(self.push_vertex()?)
            } else {
                None
            };
            let newest = self.degrees.len() - 1;
            let target = if newest == 0 {
                None
            } else {
                let t = self.sample_among(newest)?;
                self.bump(t)?;
                self.bump(newest)?;
                self.edges += 1;
                Some(t)
            };
            Attachment {
                source: newest,
                target,
                new_vertex,
            }
        };
        self.step += 1;
        if self.step.is_multiple_of(RESYNC_INTERVAL) {
            self.resync()?;
        }
        Ok(attachment)
    }

    /// Rebuilds the weight index from the degrees, checking the incremental
    /// total and the tree's prefix sums against a naive recomputation.
    pub fn resync(&mut self) -> Result<(), GraphError> {
        let incremental = self.index.total;
        let tree_before = self.index.tree.clone();
        let fresh = self.index.resync(&self.weights, &self.degrees)?;
        let scale = fresh.abs().max(f64::MIN_POSITIVE);
        if (incremental - fresh).abs() > RESYNC_TOLERANCE * scale {
            return Err(GraphError::Drift {
                incremental,
                recomputed: fresh,
            });
        }
        let n = self.index.values.len();
        let mut running = 0.0;
        let mut next_probe = 1usize;
        for (i, v) in self.index.values.iter().enumerate() {
            running += v;
            let count = i + 1;
            if count == next_probe || count == n || count % 1024 == 0 {
                let tree_sum = tree_before.prefix(count);
                if (tree_sum - running).abs() > RESYNC_TOLERANCE * scale {
                    return Err(GraphError::Drift {
                        incremental: tree_sum,
                        recomputed: running,
                    });
                }
                if count == next_probe {
                    next_probe *= 2;
                }
            }
        }
        self.index.total = fresh;
        Ok(())
    }
}

/// Extra behaviour for [`run`].
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Vertices whose final degree is reported; 0 for vertices not yet created.
    pub watch: Vec<usize>,
    /// Checkpoints added to the default geometric schedule.
    pub checkpoints: Vec<u64>,
    /// Keep the edge list in the summary.
    pub emit_edges: bool,
}

/// Checkpoints `0`, `round(10^(j/10))` up to `n_steps`, `n_steps` itself and
/// any `extra` within range; sorted and deduplicated.
pub fn checkpoint_schedule(n_steps: u64, extra: &[u64]) -> Vec<u64> {
    let mut points = vec![0, n_steps];
    let mut j = 0;
    loop {
        let c = 10f64.powf(j as f64 / 10.0).round() as u64;
        if c > n_steps {
            break;
        }
        points.push(c);
        j += 1;
    }
    points.extend(extra.iter().copied().filter(|&c| c <= n_steps));
    points.sort_unstable();
    points.dedup();
    points
}

/// Runs `n_steps` steps, updating `hub` after each.
pub fn run(
    state: &mut DegreeState,
    n_steps: u64,
    hub: &mut HubRecord,
    opts: &RunOptions,
) -> Result<TrialSummary, GraphError> {
    run_observed(state, n_steps, hub, opts, |_, _| {})
}

/// Like [`run`], calling `observer` on every visited state before its step.
pub fn run_observed<F>(
    state: &mut DegreeState,
    n_steps: u64,
    hub: &mut HubRecord,
    opts: &RunOptions,
    mut observer: F,
) -> Result<TrialSummary, GraphError>
where
    F: FnMut(&DegreeState, &HubRecord),
{
    let start = state.step_count();
    let schedule = checkpoint_schedule(start + n_steps, &opts.checkpoints);
    let mut next_cp = schedule.partition_point(|&c| c < start);
    let mut curve = Vec::new();
    let mut edges = Vec::new();

    let mut record = |state: &DegreeState, hub: &HubRecord, curve: &mut Vec<CurvePoint>| {
        while next_cp < schedule.len() && schedule[next_cp] <= state.step_count() {
            if schedule[next_cp] == state.step_count() {
                curve.push(CurvePoint {
                    n: state.step_count(),
                    max_degree: hub.max_degree(),
                    sole_leader: hub.sole_leader(),
                });
            }
            next_cp += 1;
        }
    };

    record(state, hub, &mut curve);
    for _ in 0..n_steps {
        observer(state, hub);
        let a = state.step()?;
        let step = state.step_count();
        if let Some(t) = a.target {
            hub.observe(step, t, state.degree(t));
            if opts.emit_edges {
                edges.push((a.source as u64, t as u64));
            }
        }
        hub.observe(step, a.source, state.degree(a.source));
        if step.is_multiple_of(RESYNC_INTERVAL) && !hub.verify(state.degrees()) {
            return Err(GraphError::HubMismatch { step });
        }
        record(state, hub, &mut curve);
    }

    Ok(TrialSummary {
        trial: 0,
        seed: state.seed(),
        steps: state.step_count(),
        m0: state.m0(),
        final_max_degree: hub.max_degree(),
        final_leader: hub.sole_leader(),
        distinct_sole_leaders: hub.distinct_sole_leaders() as u64,
        last_leader_change_step: hub.last_sole_change_step(),
        watch_degrees: opts
            .watch
            .iter()
            .map(|&v| state.degrees().get(v).copied().unwrap_or(0))
            .collect(),
        max_degree_curve: curve,
        sole_leader_changes: hub.sole_leader_changes().to_vec(),
        supermartingale_violations: 0,
        comparison_violations: 0,
        checked_states: 0,
        edges,
    })
}

/// Convenience: fresh trajectory plus [`run`].
pub fn simulate(
    weights: Arc<WeightFunction>,
    m0: u64,
    seed: u64,
    n_steps: u64,
    opts: &RunOptions,
) -> Result<TrialSummary, GraphError> {
    let mut state = DegreeState::new_trajectory(weights, m0, seed)?;
    let mut hub = HubRecord::from_degrees(state.degrees(), 0);
    run(&mut state, n_steps, &mut hub, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basic() -> Arc<WeightFunction> {
        Arc::new(WeightFunction::basic())
    }

    #[test]
    fn initial_states() {
        let s = DegreeState::new_trajectory(basic(), 1, 1).unwrap();
        assert_eq!(s.degrees(), &[0]);
        let s = DegreeState::new_trajectory(basic(), 3, 1).unwrap();
        assert_eq!(s.vertex_count(), 0);
        assert_eq!(
            DegreeState::new_trajectory(basic(), 0, 1).unwrap_err(),
            GraphError::InvalidM0
        );
    }

    #[test]
    fn first_tree_step_is_forced() {
        let w = Arc::new(WeightFunction::linear(0.5).unwrap());
        for seed in 0..20 {
            let mut s = DegreeState::new_trajectory(w.clone(), 1, seed).unwrap();
            let a = s.step().unwrap();
            assert_eq!(a.target, Some(0));
            assert_eq!(a.new_vertex, Some(1));
            assert_eq!(s.degrees(), &[1, 1]);
        }
    }

    #[test]
    fn multi_edge_start() {
        let mut s = DegreeState::new_trajectory(basic(), 2, 5).unwrap();
        let a = s.step().unwrap();
        assert_eq!((a.target, a.new_vertex), (None, Some(0)));
        let a = s.step().unwrap();
        assert_eq!((a.target, a.new_vertex), (None, None));
        assert_eq!(s.vertex_count(), 1);
        // Step n = 2 creates v1 and must join it to v0.
        let a = s.step().unwrap();
        assert_eq!((a.target, a.new_vertex, a.source), (Some(0), Some(1), 1));
        let a = s.step().unwrap();
        assert_eq!(a.target, Some(0));
        assert_eq!(s.degrees(), &[2, 2]);
    }

    #[test]
    fn multi_edge_counts() {
        for m0 in 2..6u64 {
            let mut s = DegreeState::new_trajectory(basic(), m0, 9).unwrap();
            for n in 0..500u64 {
                s.step().unwrap();
                assert_eq!(s.vertex_count() as u64, n / m0 + 1);
                assert_eq!(s.degrees().iter().sum::<u64>(), 2 * s.edge_count());
            }
            // Only the creation step of v0 adds no edge.
            assert_eq!(s.edge_count(), 500 - m0);
        }
    }

    #[test]
    fn tree_handshake() {
        let mut s = DegreeState::new_trajectory(basic(), 1, 3).unwrap();
        for n in 1..=2000u64 {
            s.step().unwrap();
            assert_eq!(s.vertex_count() as u64, n + 1);
            assert_eq!(s.degrees().iter().sum::<u64>(), 2 * n);
            assert_eq!(s.total_weight(), (2 * n) as f64);
        }
    }

    #[test]
    fn attachment_probabilities_from_degrees() {
        let s = DegreeState::from_degrees(basic(), &[2, 1, 1], 0).unwrap();
        assert_eq!(s.attachment_probability(0), 0.5);
        let s = DegreeState::from_degrees(basic(), &[3, 1], 0).unwrap();
        assert_eq!(s.attachment_probability(0), 0.75);
        let p2 = Arc::new(WeightFunction::power(2.0).unwrap());
        let s = DegreeState::from_degrees(p2, &[1, 1, 2], 0).unwrap();
        assert!((s.attachment_probability(2) - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn empty_sampling_is_an_error() {
        let mut s = DegreeState::new_trajectory(basic(), 2, 0).unwrap();
        assert_eq!(s.sample_target(), Err(GraphError::NoEligibleVertex));
    }

    #[test]
    fn degree_zero_target_falls_back_to_uniform() {
        let mut s = DegreeState::new_trajectory(basic(), 1, 0).unwrap();
        assert_eq!(s.total_weight(), 0.0);
        assert_eq!(s.sample_target().unwrap(), 0);
    }

    #[test]
    fn resync_detects_drift() {
        let mut s = DegreeState::from_degrees(basic(), &[3, 1, 1, 1], 0).unwrap();
        s.resync().unwrap();
        s.index.total += 1.0;
        assert!(matches!(s.resync(), Err(GraphError::Drift { .. })));
    }

    #[test]
    fn explosive_weights_use_log_domain() {
        let w = Arc::new(WeightFunction::power(200.0).unwrap());
        let mut s = DegreeState::new_trajectory(w, 1, 11).unwrap();
        let mut hub = HubRecord::from_degrees(s.degrees(), 0);
        let summary = run(&mut s, 3000, &mut hub, &RunOptions::default()).unwrap();
        assert!(s.log_domain());
        // With weights n^200 the first hub keeps essentially every edge.
        assert!(summary.final_max_degree > 2900, "{}", summary.final_max_degree);
        let fresh = s.recomputed_total_weight().unwrap();
        assert!((fresh - s.total_weight()).abs() <= 1e-9 * fresh);
    }

    #[test]
    fn checkpoints_include_decades() {
        let cps = checkpoint_schedule(100_000, &[7]);
        for c in [0, 1, 7, 10, 100, 1000, 10_000, 100_000] {
            assert!(cps.contains(&c), "{c}");
        }
        assert!(cps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn run_summary_basics() {
        let s = simulate(basic(), 1, 42, 0, &RunOptions::default()).unwrap();
        assert_eq!(s.final_max_degree, 0);
        assert_eq!(s.steps, 0);

        let opts = RunOptions {
            watch: vec![0, 1, 5_000_000],
            ..Default::default()
        };
        let s = simulate(basic(), 1, 42, 10_000, &opts).unwrap();
        assert_eq!(s.steps, 10_000);
        assert_eq!(s.watch_degrees.len(), 3);
        assert_eq!(s.watch_degrees[2], 0);
        let curve = &s.max_degree_curve;
        assert_eq!(curve.last().unwrap().n, 10_000);
        assert!(curve.windows(2).all(|w| w[0].n < w[1].n && w[0].max_degree <= w[1].max_degree));
    }

    #[test]
    fn deterministic_for_seed() {
        let opts = RunOptions {
            watch: vec![0, 3],
            emit_edges: true,
            ..Default::default()
        };
        let a = simulate(basic(), 2, 77, 5000, &opts).unwrap();
        let b = simulate(basic(), 2, 77, 5000, &opts).unwrap();
        assert_eq!(a, b);
        let c = simulate(basic(), 2, 78, 5000, &opts).unwrap();
        assert_ne!(a.edges, c.edges);
    }

    #[test]
    fn resync_runs_past_interval() {
        let w = Arc::new(WeightFunction::power(1.5).unwrap());
        let mut s = DegreeState::new_trajectory(w, 1, 1).unwrap();
        let mut hub = HubRecord::from_degrees(s.degrees(), 0);
        run(&mut s, 2 * RESYNC_INTERVAL + 5, &mut hub, &RunOptions::default()).unwrap();
        let fresh = s.recomputed_total_weight().unwrap();
        assert!((fresh - s.total_weight()).abs() <= 1e-9 * fresh);
        assert!(hub.verify(s.degrees()));
    }
}
