//! Maximal degree and leader tracking along one trajectory.

use std::collections::BTreeSet;

use serde::Serialize;

/// A change of the set of maximum-degree vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeaderChange {
    pub step: u64,
    pub old: Vec<usize>,
    pub new: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct HubRecord {
    max_degree: u64,
    leaders: BTreeSet<usize>,
    change_log: Vec<LeaderChange>,
    /// Most recent unique leader, kept through ties.
    last_sole: Option<usize>,
    last_sole_change: u64,
    sole_leaders_seen: BTreeSet<usize>,
    sole_changes: Vec<u64>,
}

impl HubRecord {
    /// Initialises from the degrees present at `step`.
    pub fn from_degrees(degrees: &[u64], step: u64) -> Self {
        let mut hub = HubRecord::default();
        if let Some(&max) = degrees.iter().max() {
            hub.max_degree = max;
            hub.leaders = degrees
                .iter()
                .enumerate()
                .filter(|(_, &d)| d == max)
                .map(|(i, _)| i)
                .collect();
        }
        hub.note_sole(step);
        hub
    }

    pub fn max_degree(&self) -> u64 {
        self.max_degree
    }

    pub fn leaders(&self) -> &BTreeSet<usize> {
        &self.leaders
    }

    pub fn change_log(&self) -> &[LeaderChange] {
        &self.change_log
    }

    /// The unique maximum-degree vertex, if there is no tie.
    pub fn sole_leader(&self) -> Option<usize> {
        if self.leaders.len() == 1 {
            self.leaders.first().copied()
        } else {
            None
        }
    }

    /// Step of the latest change of unique leader; `None` while tied.
    pub fn last_sole_leader_change(&self) -> Option<u64> {
        self.sole_leader().map(|_| self.last_sole_change)
    }

    /// Step of the latest change of unique leader, ties ignored.
    pub fn last_sole_change_step(&self) -> u64 {
        self.last_sole_change
    }

    pub fn distinct_sole_leaders(&self) -> usize {
        self.sole_leaders_seen.len()
    }

    /// Steps at which a new vertex became the unique leader.
    pub fn sole_leader_changes(&self) -> &[u64] {
        &self.sole_changes
    }

    /// Records that `vertex` now has `degree`, after `step` completed steps.
    /// Degrees never decrease.
    pub fn observe(&mut self, step: u64, vertex: usize, degree: u64) {
        let changed = if degree > self.max_degree || self.leaders.is_empty() {
            let old = std::mem::take(&mut self.leaders);
            self.max_degree = degree;
            self.leaders.insert(vertex);
            Some(old)
        } else if degree == self.max_degree && !self.leaders.contains(&vertex) {
            let old = self.leaders.clone();
            self.leaders.insert(vertex);
            Some(old)
        } else {
            None
        };
        if let Some(old) = changed {
            if old != self.leaders {
                self.change_log.push(LeaderChange {
                    step,
                    old: old.into_iter().collect(),
                    new: self.leaders.iter().copied().collect(),
                });
            }
            self.note_sole(step);
        }
    }

    fn note_sole(&mut self, step: u64) {
        if let Some(v) = self.sole_leader() {
            if self.last_sole != Some(v) {
                self.last_sole = Some(v);
                self.last_sole_change = step;
                self.sole_leaders_seen.insert(v);
                self.sole_changes.push(step);
            }
        }
    }

    /// Full-scan check of the cached maximum.
    pub fn verify(&self, degrees: &[u64]) -> bool {
        let max = degrees.iter().copied().max().unwrap_or(0);
        let leaders: BTreeSet<usize> = degrees
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == max)
            .map(|(i, _)| i)
            .collect();
        max == self.max_degree && (degrees.is_empty() || leaders == self.leaders)
    }
}
