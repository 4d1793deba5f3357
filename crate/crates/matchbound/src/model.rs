//! The evolving graph, the fractional matching state, and the contract every
//! online algorithm must satisfy.
//!
//! A run is a sequence of [`ArrivalEvent`]s. Each event reveals a batch of
//! new vertices together with their edges to earlier vertices; the algorithm
//! answers with an [`AlgorithmDecision`] assigning nonnegative load to some of
//! the freshly revealed edges. The only feasibility constraint is that every
//! vertex carries total load at most one.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for all feasibility checks on fractional loads.
pub const FEAS_TOL: f64 = 1e-9;

/// Identifier of a vertex, assigned in arrival order and never reused.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct VertexId(pub u64);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("decision would push vertex {vertex} to {would_be}, above the unit cap")]
    InfeasibleDecision { vertex: VertexId, would_be: f64 },
    #[error("increment on edge ({u}, {v}) that was not revealed by the triggering event")]
    UnknownEdge { u: VertexId, v: VertexId },
    #[error("average of an empty vertex set")]
    EmptySet,
    #[error("bad initialization: {0}")]
    BadInitialization(String),
    #[error("malformed arrival event: {0}")]
    BadEvent(String),
}

/// A batch of simultaneous arrivals. Every entry lists one new vertex and the
/// earlier vertices it is adjacent to; no edges exist inside the batch.
#[derive(Debug, Clone)]
pub struct ArrivalEvent {
    pub batch: Vec<(VertexId, Vec<VertexId>)>,
    pub simultaneous: bool,
}

impl ArrivalEvent {
    /// Edges revealed by this event, in canonical (min, max) order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.batch.iter().flat_map(|(u, nbrs)| {
            let u = *u;
            nbrs.iter().map(move |&v| canonical(u, v))
        })
    }
}

fn canonical(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u.0 <= v.0 {
        (u, v)
    } else {
        (v, u)
    }
}

/// The algorithm's answer to one arrival event: per-edge load increments,
/// keyed by (new vertex, old vertex).
#[derive(Debug, Clone, Default)]
pub struct AlgorithmDecision {
    pub increments: BTreeMap<(VertexId, VertexId), f64>,
}

impl AlgorithmDecision {
    pub fn total_mass(&self) -> f64 {
        self.increments.values().sum()
    }

    pub fn push(&mut self, new: VertexId, old: VertexId, amount: f64) {
        if amount != 0.0 {
            *self.increments.entry((new, old)).or_insert(0.0) += amount;
        }
    }
}

/// Fractional matching state of the evolving instance.
///
/// Initialization portions are tracked separately from edge loads: a vertex's
/// matched portion is `init + Σ incident edge loads`, so per-vertex and global
/// conservation hold exactly for the edge part.
#[derive(Debug, Clone, Default)]
pub struct MatchState {
    init: Vec<f64>,
    load_sum: Vec<f64>,
    edge_load: BTreeMap<(VertexId, VertexId), f64>,
}

impl MatchState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex_count(&self) -> usize {
        self.init.len()
    }

    /// Matched portion of `v`.
    pub fn x(&self, v: VertexId) -> f64 {
        self.init[v.index()] + self.load_sum[v.index()]
    }

    pub fn total_x(&self) -> f64 {
        self.init.iter().sum::<f64>() + self.load_sum.iter().sum::<f64>()
    }

    pub fn edge_load(&self, u: VertexId, v: VertexId) -> Option<f64> {
        self.edge_load.get(&canonical(u, v)).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = ((VertexId, VertexId), f64)> + '_ {
        self.edge_load.iter().map(|(&e, &l)| (e, l))
    }

    pub fn edge_count(&self) -> usize {
        self.edge_load.len()
    }

    /// Adds one isolated vertex carrying an initialization portion.
    pub fn add_isolated(&mut self, portion: f64) -> VertexId {
        let id = VertexId(self.init.len() as u64);
        self.init.push(portion);
        self.load_sum.push(0.0);
        id
    }

    /// Reveals an event's vertices and edges. New ids must continue the
    /// arrival order; neighbors must all predate the batch.
    pub fn insert_event(&mut self, event: &ArrivalEvent) -> Result<(), ModelError> {
        let batch_start = self.init.len() as u64;
        for (k, (u, nbrs)) in event.batch.iter().enumerate() {
            if u.0 != batch_start + k as u64 {
                return Err(ModelError::BadEvent(format!(
                    "vertex {u} arrives out of order (expected {})",
                    batch_start + k as u64
                )));
            }
            for &v in nbrs {
                if v.0 >= batch_start {
                    return Err(ModelError::BadEvent(format!(
                        "edge ({u}, {v}) points inside the batch or into the future"
                    )));
                }
            }
        }
        for (u, nbrs) in &event.batch {
            self.init.push(0.0);
            self.load_sum.push(0.0);
            for &v in nbrs {
                self.edge_load.insert(canonical(*u, v), 0.0);
            }
        }
        debug_assert_eq!(self.init.len(), self.load_sum.len());
        let _ = batch_start;
        Ok(())
    }

    /// Applies a decision to a copy of the state and returns it.
    ///
    /// Every increment must sit on an edge revealed by `event`, and no vertex
    /// may end above `1 + FEAS_TOL`; offending decisions are rejected whole.
    pub fn apply_decision(
        &self,
        event: &ArrivalEvent,
        decision: &AlgorithmDecision,
    ) -> Result<MatchState, ModelError> {
        let mut next = self.clone();
        next.apply_decision_in_place(event, decision)?;
        Ok(next)
    }

    /// In-place variant of [`MatchState::apply_decision`]. Validation happens
    /// before any mutation, so a rejected decision leaves the state intact.
    pub fn apply_decision_in_place(
        &mut self,
        event: &ArrivalEvent,
        decision: &AlgorithmDecision,
    ) -> Result<(), ModelError> {
        let revealed: HashSet<(VertexId, VertexId)> = event.edges().collect();
        let mut gain: BTreeMap<VertexId, f64> = BTreeMap::new();
        for (&(new, old), &inc) in &decision.increments {
            let e = canonical(new, old);
            if !revealed.contains(&e) {
                return Err(ModelError::UnknownEdge { u: new, v: old });
            }
            if inc < 0.0 {
                return Err(ModelError::InfeasibleDecision {
                    vertex: new,
                    would_be: inc,
                });
            }
            *gain.entry(new).or_insert(0.0) += inc;
            *gain.entry(old).or_insert(0.0) += inc;
        }
        for (&v, &g) in &gain {
            let would_be = self.x(v) + g;
            if would_be > 1.0 + FEAS_TOL {
                return Err(ModelError::InfeasibleDecision {
                    vertex: v,
                    would_be,
                });
            }
        }
        for (&(new, old), &inc) in &decision.increments {
            *self.edge_load.get_mut(&canonical(new, old)).unwrap() += inc;
            self.load_sum[new.index()] += inc;
            self.load_sum[old.index()] += inc;
        }
        Ok(())
    }

    /// Arithmetic mean of the matched portions over `set`.
    pub fn average_portion(&self, set: &[VertexId]) -> Result<f64, ModelError> {
        if set.is_empty() {
            return Err(ModelError::EmptySet);
        }
        Ok(set.iter().map(|&v| self.x(v)).sum::<f64>() / set.len() as f64)
    }

    /// Checks conservation and feasibility; returns a description of the
    /// first violated invariant.
    pub fn validate(&self) -> Result<(), String> {
        let mut incident = vec![0.0; self.init.len()];
        let mut load_total = 0.0;
        for (&(u, v), &l) in &self.edge_load {
            if !(-FEAS_TOL..=1.0 + FEAS_TOL).contains(&l) {
                return Err(format!("edge ({u}, {v}) carries load {l}"));
            }
            incident[u.index()] += l;
            incident[v.index()] += l;
            load_total += l;
        }
        for (i, (&s, &inc)) in self.load_sum.iter().zip(&incident).enumerate() {
            if (s - inc).abs() > FEAS_TOL {
                return Err(format!("vertex {i}: cached load {s} vs incident {inc}"));
            }
            let x = self.init[i] + s;
            if !(-FEAS_TOL..=1.0 + FEAS_TOL).contains(&x) {
                return Err(format!("vertex {i}: portion {x} out of range"));
            }
        }
        let total = self.total_x() - self.init.iter().sum::<f64>();
        if (total - 2.0 * load_total).abs() > FEAS_TOL {
            return Err(format!(
                "conservation: sum of portions {total} vs twice load {}",
                2.0 * load_total
            ));
        }
        Ok(())
    }
}

/// A deterministic online fractional-matching algorithm.
///
/// One instance drives one run and may keep arbitrary per-run memory. The
/// state view passed to `on_arrival` is the full visible history: revealed
/// edges and current portions, nothing about the adversary's bookkeeping.
pub trait OnlineAlgorithm {
    /// Chooses the initial portions vector: length `n`, entries in `[0, 1]`,
    /// mean equal to `target_mean`.
    fn on_init(&mut self, n: usize, target_mean: f64) -> Vec<f64>;

    /// Answers one arrival event.
    fn on_arrival(&mut self, event: &ArrivalEvent, state: &MatchState) -> AlgorithmDecision;
}

impl<T: OnlineAlgorithm + ?Sized> OnlineAlgorithm for Box<T> {
    fn on_init(&mut self, n: usize, target_mean: f64) -> Vec<f64> {
        (**self).on_init(n, target_mean)
    }

    fn on_arrival(&mut self, event: &ArrivalEvent, state: &MatchState) -> AlgorithmDecision {
        (**self).on_arrival(event, state)
    }
}

/// Validates an initialization vector against the `on_init` contract.
pub fn check_init_vector(v: &[f64], n: usize, target_mean: f64) -> Result<(), ModelError> {
    if v.len() != n {
        return Err(ModelError::BadInitialization(format!(
            "expected {n} entries, got {}",
            v.len()
        )));
    }
    if let Some(bad) = v.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(ModelError::BadInitialization(format!(
            "entry {bad} outside [0, 1]"
        )));
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    if (mean - target_mean).abs() > FEAS_TOL {
        return Err(ModelError::BadInitialization(format!(
            "mean {mean} differs from required {target_mean}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event(batch: Vec<(u64, Vec<u64>)>) -> ArrivalEvent {
        ArrivalEvent {
            batch: batch
                .into_iter()
                .map(|(u, ns)| (VertexId(u), ns.into_iter().map(VertexId).collect()))
                .collect(),
            simultaneous: true,
        }
    }

    fn decision(incs: &[(u64, u64, f64)]) -> AlgorithmDecision {
        let mut d = AlgorithmDecision::default();
        for &(u, v, a) in incs {
            d.push(VertexId(u), VertexId(v), a);
        }
        d
    }

    #[test]
    fn single_edge_saturation() {
        let mut s = MatchState::new();
        s.add_isolated(0.0);
        let ev = event(vec![(1, vec![0])]);
        s.insert_event(&ev).unwrap();
        let s = s.apply_decision(&ev, &decision(&[(1, 0, 1.0)])).unwrap();
        assert_eq!(s.x(VertexId(0)), 1.0);
        assert_eq!(s.x(VertexId(1)), 1.0);
        s.validate().unwrap();
    }

    #[test]
    fn cap_at_one_rejected() {
        let mut s = MatchState::new();
        s.add_isolated(0.0);
        let ev1 = event(vec![(1, vec![0])]);
        s.insert_event(&ev1).unwrap();
        s.apply_decision_in_place(&ev1, &decision(&[(1, 0, 0.7)]))
            .unwrap();
        let ev2 = event(vec![(2, vec![0])]);
        s.insert_event(&ev2).unwrap();
        let err = s
            .apply_decision(&ev2, &decision(&[(2, 0, 0.4)]))
            .unwrap_err();
        assert!(matches!(
            err,
            ModelError::InfeasibleDecision {
                vertex: VertexId(0),
                ..
            }
        ));
    }

    #[test]
    fn zero_decision_is_identity() {
        let mut s = MatchState::new();
        s.add_isolated(0.3);
        s.add_isolated(0.0);
        let ev = event(vec![(2, vec![0, 1])]);
        s.insert_event(&ev).unwrap();
        let before = s.total_x();
        let d = decision(&[(2, 0, 0.0), (2, 1, 0.0)]);
        let s2 = s.apply_decision(&ev, &d).unwrap();
        assert_eq!(s2.total_x(), before);
    }

    #[test]
    fn unknown_edge_rejected() {
        let mut s = MatchState::new();
        s.add_isolated(0.0);
        s.add_isolated(0.0);
        let ev = event(vec![(2, vec![0])]);
        s.insert_event(&ev).unwrap();
        let err = s
            .apply_decision(&ev, &decision(&[(2, 1, 0.5)]))
            .unwrap_err();
        assert!(matches!(err, ModelError::UnknownEdge { .. }));
    }

    #[test]
    fn average_portion_cases() {
        let mut s = MatchState::new();
        let ids: Vec<VertexId> = [0.0, 0.0, 1.0, 1.0]
            .iter()
            .map(|&p| s.add_isolated(p))
            .collect();
        assert_eq!(s.average_portion(&ids).unwrap(), 0.5);
        let mut t = MatchState::new();
        let a = t.add_isolated(0.25);
        let b = t.add_isolated(0.75);
        assert_eq!(t.average_portion(&[a, b]).unwrap(), 0.5);
        let c = t.add_isolated(0.3);
        assert_eq!(t.average_portion(&[c]).unwrap(), 0.3);
        assert!(matches!(t.average_portion(&[]), Err(ModelError::EmptySet)));
    }

    #[test]
    fn intra_batch_edges_rejected() {
        let mut s = MatchState::new();
        s.add_isolated(0.0);
        let ev = event(vec![(1, vec![]), (2, vec![1])]);
        assert!(matches!(s.insert_event(&ev), Err(ModelError::BadEvent(_))));
    }

    #[test]
    fn init_vector_contract() {
        check_init_vector(&[1.0, 0.0], 2, 0.5).unwrap();
        assert!(check_init_vector(&[0.9, 0.3], 2, 0.5).is_err());
        assert!(check_init_vector(&[0.5], 2, 0.5).is_err());
        assert!(check_init_vector(&[1.5, -0.5], 2, 0.5).is_err());
    }
}
