//! The recursive hard-instance construction.
//!
//! The adversary keeps a partition of the live vertices into mutually
//! non-adjacent, symmetric groups. Each round it attacks every active group
//! `A` with a fresh complete-bipartite block `B` (`|B| = ε|A|`, or `|B| = |A|`
//! in the closing round), watches how much mass `a` the algorithm commits,
//! and compares the two value-function continuations:
//!
//! * aggressive response — keep both `A` and `B` alive as separate groups,
//!   punishing heavy matching later;
//! * conservative response — retire `B` together with the `|B|` least matched
//!   vertices of `A` as a perfectly matchable block the algorithm under-used.
//!
//! Vertices retire in adjacent pairs, so the final graph always carries a
//! perfect matching of size `|V|/2`, while the algorithm's total is
//! `½·Σ_v x_v`; the surplus `v_alg = ½(Σ x_v - Γ·|V|)` is driven below zero
//! whenever `F_n(0) < 0`.

use serde::Serialize;
use thiserror::Error;

use crate::model::{
    check_init_vector, AlgorithmDecision, ArrivalEvent, MatchState, ModelError, OnlineAlgorithm,
    VertexId, FEAS_TOL,
};
use crate::recursion::{f_grids, Branch, FGrid, FParams, RecursionError};

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Params(#[from] RecursionError),
    #[error("structural claim violated: {0}")]
    Structure(#[from] StructureViolation),
}

/// Which structural claim failed on a completed run.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureViolation {
    #[error("bipartite two-coloring breaks at edge ({0}, {1})")]
    Bipartite(u64, u64),
    #[error("deactivation pairs do not form a perfect matching: {0}")]
    PerfectMatching(String),
    #[error("partition of size {size} is not a multiple of (1/eps)^{steps}")]
    Divisibility { size: u64, steps: usize },
    #[error("vertex {0} carries portion {1} above the cap")]
    Feasibility(u64, f64),
}

/// Construction parameters `(n, N, x₀)` over shared grid parameters.
#[derive(Debug, Clone, Copy)]
pub struct AdversaryParams {
    pub n: usize,
    pub num_vertices: u64,
    pub x0: f64,
    pub fparams: FParams,
}

impl AdversaryParams {
    pub fn new(
        n: usize,
        num_vertices: u64,
        x0: f64,
        fparams: FParams,
    ) -> Result<Self, RecursionError> {
        if n == 0 {
            return Err(RecursionError::BadParams("need n >= 1".into()));
        }
        if !(0.0..=1.0).contains(&x0) {
            return Err(RecursionError::BadParams(format!("x0 = {x0}")));
        }
        let unit = Self::minimal_vertices(n, fparams)?;
        if num_vertices == 0 || !num_vertices.is_multiple_of(unit) {
            return Err(RecursionError::BadParams(format!(
                "N = {num_vertices} must be a positive multiple of {unit}"
            )));
        }
        Ok(Self {
            n,
            num_vertices,
            x0,
            fparams,
        })
    }

    /// The smallest admissible population: `(1/eps)^n`, which keeps every
    /// recursive block size integral. A one-step run is just the closing
    /// round and works from any population.
    pub fn minimal_vertices(n: usize, fparams: FParams) -> Result<u64, RecursionError> {
        if n == 1 {
            return Ok(1);
        }
        let m = fparams.inv_eps() as u128;
        let mut unit: u128 = 1;
        for _ in 0..n {
            unit = unit
                .checked_mul(m)
                .filter(|&u| u <= u64::MAX as u128)
                .ok_or_else(|| RecursionError::BadParams("(1/eps)^n overflows".into()))?;
        }
        Ok(unit as u64)
    }
}

/// Two-coloring class maintained by the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Color {
    White,
    Black,
}

impl Color {
    fn flip(self) -> Self {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

/// One active group: mutually non-adjacent vertices sharing their entire
/// neighbor history, hence indistinguishable to the algorithm.
#[derive(Debug, Clone)]
pub struct PartitionState {
    pub members: Vec<VertexId>,
    pub color: Color,
    pub steps_remaining: usize,
}

/// How batches are presented to the algorithm: as one simultaneous event, or
/// serialized one vertex at a time as in the original arrival model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArrivalMode {
    #[default]
    Batch,
    Sequential,
}

#[derive(Debug, Clone, Serialize)]
pub struct TranscriptParams {
    pub n: usize,
    #[serde(rename = "N")]
    pub num_vertices: u64,
    pub eps: f64,
    pub gamma: f64,
    pub x0: f64,
}

/// Compact record of one arrival event: the new vertices of the batch and the
/// shared neighbor block they all attach to.
#[derive(Debug, Clone, Serialize)]
pub struct EventRecord {
    pub new: Vec<u64>,
    pub neighbors: Vec<u64>,
    pub simultaneous: bool,
}

/// Per-step record of the adversary's bookkeeping: sizes, the observed
/// average action, both continuation values, and the branch taken. Base-step
/// records carry no branch data.
#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub partition: usize,
    pub steps_remaining: usize,
    pub size_a: u64,
    pub size_b: u64,
    pub observed_a: f64,
    pub x_before: f64,
    pub x_after: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expr_aggressive: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expr_conservative: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
}

/// Full record of one adversary-vs-algorithm run.
#[derive(Debug, Clone, Serialize)]
pub struct Transcript {
    pub params: TranscriptParams,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub init_portions: Vec<f64>,
    pub events: Vec<EventRecord>,
    pub decisions: Vec<Vec<(u64, u64, f64)>>,
    pub branches: Vec<StepRecord>,
    pub deactivations: Vec<(u64, u64)>,
    pub v_alg: f64,
    pub alg_total: f64,
    pub opt_size: u64,
}

impl Transcript {
    pub fn ratio(&self) -> f64 {
        self.alg_total / self.opt_size as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }
}

/// Driver for one construction run. The step methods are public so tests can
/// exercise single rounds against hand-built configurations.
pub struct AdversaryRun<'a> {
    pub params: AdversaryParams,
    pub mode: ArrivalMode,
    alg: &'a mut dyn OnlineAlgorithm,
    pub state: MatchState,
    pub partitions: Vec<PartitionState>,
    events: Vec<EventRecord>,
    decisions: Vec<Vec<(u64, u64, f64)>>,
    steps: Vec<StepRecord>,
    deactivations: Vec<(VertexId, VertexId)>,
    init_portions: Vec<f64>,
    lazy_inactive_sum: f64,
    lazy_inactive_count: u64,
}

impl<'a> AdversaryRun<'a> {
    pub fn new(
        params: AdversaryParams,
        alg: &'a mut dyn OnlineAlgorithm,
        mode: ArrivalMode,
    ) -> Self {
        Self {
            params,
            mode,
            alg,
            state: MatchState::new(),
            partitions: Vec::new(),
            events: Vec::new(),
            decisions: Vec::new(),
            steps: Vec::new(),
            deactivations: Vec::new(),
            init_portions: Vec::new(),
            lazy_inactive_sum: 0.0,
            lazy_inactive_count: 0,
        }
    }

    /// Creates the `N` isolated vertices.
    ///
    /// For `x₀ = 0` the phase is played out as plain sequential arrivals with
    /// no decisions; otherwise the algorithm distributes the required average
    /// through its initialization callback.
    pub fn initialize(&mut self) -> Result<(), AdversaryError> {
        let n = self.params.num_vertices as usize;
        if self.params.x0 == 0.0 {
            for k in 0..n {
                let ev = ArrivalEvent {
                    batch: vec![(VertexId(k as u64), Vec::new())],
                    simultaneous: false,
                };
                self.state.insert_event(&ev)?;
                let decision = self.alg.on_arrival(&ev, &self.state);
                // no edges exist yet, so any increment is on an unknown edge
                self.state.apply_decision_in_place(&ev, &decision)?;
                self.events.push(EventRecord {
                    new: vec![k as u64],
                    neighbors: Vec::new(),
                    simultaneous: false,
                });
                self.decisions.push(Vec::new());
            }
        } else {
            let portions = self.alg.on_init(n, self.params.x0);
            check_init_vector(&portions, n, self.params.x0)?;
            for &p in &portions {
                self.state.add_isolated(p);
            }
            self.init_portions = portions;
        }
        self.partitions.push(PartitionState {
            members: (0..n as u64).map(VertexId).collect(),
            color: Color::White,
            steps_remaining: self.params.n,
        });
        Ok(())
    }

    /// Reveals one complete-bipartite block against a partition and collects
    /// the algorithm's decision, honoring the arrival mode.
    fn attack(
        &mut self,
        members: &[VertexId],
        block_size: u64,
        simultaneous: bool,
    ) -> Result<(Vec<VertexId>, f64), AdversaryError> {
        let start = self.state.vertex_count() as u64;
        let new_ids: Vec<VertexId> = (start..start + block_size).map(VertexId).collect();
        let mut total_mass = 0.0;
        let mut dec_record = Vec::new();
        match self.mode {
            ArrivalMode::Batch => {
                let ev = ArrivalEvent {
                    batch: new_ids.iter().map(|&u| (u, members.to_vec())).collect(),
                    simultaneous,
                };
                self.state.insert_event(&ev)?;
                let decision = self.alg.on_arrival(&ev, &self.state);
                total_mass += apply_recorded(&mut self.state, &ev, &decision, &mut dec_record)?;
            }
            ArrivalMode::Sequential => {
                for &u in &new_ids {
                    let ev = ArrivalEvent {
                        batch: vec![(u, members.to_vec())],
                        simultaneous: false,
                    };
                    self.state.insert_event(&ev)?;
                    let decision = self.alg.on_arrival(&ev, &self.state);
                    total_mass += apply_recorded(&mut self.state, &ev, &decision, &mut dec_record)?;
                }
            }
        }
        self.events.push(EventRecord {
            new: new_ids.iter().map(|v| v.0).collect(),
            neighbors: members.iter().map(|v| v.0).collect(),
            simultaneous,
        });
        self.decisions.push(dec_record);
        Ok((new_ids, total_mass))
    }

    fn retire_pairs(&mut self, left: &[VertexId], right: &[VertexId]) {
        debug_assert_eq!(left.len(), right.len());
        for (&a, &b) in left.iter().zip(right) {
            self.deactivations.push((a, b));
            self.lazy_inactive_sum += self.state.x(a) + self.state.x(b);
            self.lazy_inactive_count += 2;
        }
    }

    /// One recursive round against partition `idx` (steps remaining `k > 1`):
    /// `ε|A|` new vertices arrive fully connected to `A`, the observed action
    /// is snapped down to the grid, and the branch comparison under
    /// `F_{k-1}` decides between keeping `B` alive and retiring `B ∪ C`.
    pub fn recursive_step(&mut self, idx: usize, f_prev: &FGrid) -> Result<(), AdversaryError> {
        let p = self.params.fparams;
        let members = self.partitions[idx].members.clone();
        let color = self.partitions[idx].color;
        let k = self.partitions[idx].steps_remaining;
        debug_assert!(k > 1);
        debug_assert_eq!(f_prev.n, k - 1);
        let size_a = members.len() as u64;
        debug_assert_eq!(size_a % p.inv_eps(), 0);
        let size_b = size_a / p.inv_eps();
        let x_before = self.state.average_portion(&members)?;

        let (new_ids, mass) = self.attack(&members, size_b, true)?;
        let a_obs = mass / size_b as f64;
        let x_after = self.state.average_portion(&members)?;

        // branch thresholds live on the grid; bookkeeping keeps the exact a
        let h = p.grid_step;
        let a_snap = ((a_obs / h + 1e-12).floor() * h).clamp(0.0, 1.0);
        let fxa = f_prev.eval(x_before + p.eps * a_snap);
        let fa = f_prev.eval(a_snap);
        let e1 = fxa + p.eps * fa;
        let e2 =
            (1.0 - p.eps) * fxa + p.eps * (((1.0 + p.eps) * a_snap + x_before) / 2.0 - p.gamma);
        let branch = if e1 <= e2 {
            Branch::Aggressive
        } else {
            Branch::Conservative
        };

        match branch {
            Branch::Aggressive => {
                self.partitions[idx].steps_remaining = k - 1;
                self.partitions.push(PartitionState {
                    members: new_ids,
                    color: color.flip(),
                    steps_remaining: k - 1,
                });
            }
            Branch::Conservative => {
                // the |B| least matched vertices of A, ties by ascending id
                let mut order: Vec<VertexId> = members.clone();
                order.sort_by(|&a, &b| {
                    self.state
                        .x(a)
                        .partial_cmp(&self.state.x(b))
                        .unwrap()
                        .then(a.0.cmp(&b.0))
                });
                let retired: Vec<VertexId> = order[..size_b as usize].to_vec();
                self.retire_pairs(&new_ids, &retired);
                let keep: Vec<VertexId> = members
                    .iter()
                    .copied()
                    .filter(|v| !retired.contains(v))
                    .collect();
                self.partitions[idx].members = keep;
                self.partitions[idx].steps_remaining = k - 1;
            }
        }

        self.steps.push(StepRecord {
            partition: idx,
            steps_remaining: k,
            size_a,
            size_b,
            observed_a: a_obs,
            x_before,
            x_after,
            expr_aggressive: Some(e1),
            expr_conservative: Some(e2),
            branch: Some(branch),
        });
        Ok(())
    }

    /// The closing round against partition `idx`: a block of `|A|` new
    /// vertices arrives and everything retires in index-aligned pairs.
    pub fn base_step(&mut self, idx: usize) -> Result<(), AdversaryError> {
        let members = self.partitions[idx].members.clone();
        debug_assert_eq!(self.partitions[idx].steps_remaining, 1);
        let size_a = members.len() as u64;
        let x_before = self.state.average_portion(&members)?;
        let (new_ids, mass) = self.attack(&members, size_a, true)?;
        let x_after = self.state.average_portion(&members)?;
        self.retire_pairs(&members, &new_ids);
        self.partitions[idx].members.clear();
        self.partitions[idx].steps_remaining = 0;
        self.steps.push(StepRecord {
            partition: idx,
            steps_remaining: 1,
            size_a,
            size_b: size_a,
            observed_a: mass / size_a as f64,
            x_before,
            x_after,
            expr_aggressive: None,
            expr_conservative: None,
            branch: None,
        });
        Ok(())
    }

    /// Closes the run: every vertex must be retired exactly once.
    pub fn finish(self) -> Result<Transcript, AdversaryError> {
        let total = self.state.vertex_count() as u64;
        if self.lazy_inactive_count != total {
            return Err(StructureViolation::PerfectMatching(format!(
                "{} of {} vertices retired",
                self.lazy_inactive_count, total
            ))
            .into());
        }
        let sum_x = self.state.total_x();
        debug_assert!(
            (sum_x - self.lazy_inactive_sum).abs() <= 1e-6,
            "lazy retirement accounting drifted: {sum_x} vs {}",
            self.lazy_inactive_sum
        );
        let gamma = self.params.fparams.gamma;
        let v_alg = 0.5 * (sum_x - gamma * total as f64);
        Ok(Transcript {
            params: TranscriptParams {
                n: self.params.n,
                num_vertices: self.params.num_vertices,
                eps: self.params.fparams.eps,
                gamma,
                x0: self.params.x0,
            },
            init_portions: self.init_portions,
            events: self.events,
            decisions: self.decisions,
            branches: self.steps,
            deactivations: self
                .deactivations
                .iter()
                .map(|&(a, b)| (a.0, b.0))
                .collect(),
            v_alg,
            alg_total: 0.5 * sum_x,
            opt_size: total / 2,
        })
    }
}

fn apply_recorded(
    state: &mut MatchState,
    ev: &ArrivalEvent,
    decision: &AlgorithmDecision,
    record: &mut Vec<(u64, u64, f64)>,
) -> Result<f64, ModelError> {
    state.apply_decision_in_place(ev, decision)?;
    let mut mass = 0.0;
    for (&(u, v), &inc) in &decision.increments {
        record.push((u.0, v.0, inc));
        mass += inc;
    }
    Ok(mass)
}

/// Runs the full construction: initialization, `n-1` recursive rounds over
/// every active partition, then the closing round. Returns the transcript and
/// the final matching state.
pub fn run_construction_full(
    params: AdversaryParams,
    alg: &mut dyn OnlineAlgorithm,
    mode: ArrivalMode,
) -> Result<(Transcript, MatchState), AdversaryError> {
    let grids = f_grids(params.fparams, params.n.saturating_sub(1).max(1));
    let mut run = AdversaryRun::new(params, alg, mode);
    run.initialize()?;
    for k in (2..=params.n).rev() {
        let live: Vec<usize> = (0..run.partitions.len())
            .filter(|&i| {
                run.partitions[i].steps_remaining == k && !run.partitions[i].members.is_empty()
            })
            .collect();
        for idx in live {
            run.recursive_step(idx, &grids[k - 2])?;
        }
    }
    let live: Vec<usize> = (0..run.partitions.len())
        .filter(|&i| {
            run.partitions[i].steps_remaining == 1 && !run.partitions[i].members.is_empty()
        })
        .collect();
    for idx in live {
        run.base_step(idx)?;
    }
    let state = run.state.clone();
    let transcript = run.finish()?;
    Ok((transcript, state))
}

/// Batch-mode construction run.
pub fn run_construction(
    params: AdversaryParams,
    alg: &mut dyn OnlineAlgorithm,
) -> Result<(Transcript, MatchState), AdversaryError> {
    run_construction_full(params, alg, ArrivalMode::Batch)
}

/// Structural summary of a verified run.
#[derive(Debug, Clone, Copy)]
pub struct StructureReport {
    pub vertices: u64,
    pub edges: u64,
    pub pairs: u64,
}

/// Re-derives the instance from the transcript's event log and checks the
/// structural claims: a valid two-coloring, deactivation pairs forming a
/// perfect matching along edges, partition sizes divisible by
/// `(1/eps)^{steps}`, and feasibility of the final portions.
pub fn check_structure(
    transcript: &Transcript,
    state: &MatchState,
) -> Result<StructureReport, StructureViolation> {
    let total = state.vertex_count();
    let mut color: Vec<Option<Color>> = vec![None; total];
    for c in color.iter_mut().take(transcript.init_portions.len()) {
        *c = Some(Color::White);
    }
    let mut edge_count: u64 = 0;
    for ev in &transcript.events {
        let mut nbr_color: Option<Color> = None;
        for &v in &ev.neighbors {
            let c = color[v as usize].ok_or(StructureViolation::Bipartite(v, v))?;
            match nbr_color {
                None => nbr_color = Some(c),
                Some(prev) if prev != c => {
                    return Err(StructureViolation::Bipartite(ev.neighbors[0], v));
                }
                _ => {}
            }
        }
        let assigned = nbr_color.map(Color::flip).unwrap_or(Color::White);
        for &u in &ev.new {
            if color[u as usize].is_some() {
                return Err(StructureViolation::PerfectMatching(format!(
                    "vertex {u} arrives twice"
                )));
            }
            color[u as usize] = Some(assigned);
        }
        edge_count += (ev.new.len() * ev.neighbors.len()) as u64;
    }
    // every edge of the final graph must be bichromatic
    for ((u, v), _) in state.edges() {
        let (cu, cv) = (color[u.index()], color[v.index()]);
        match (cu, cv) {
            (Some(a), Some(b)) if a != b => {}
            _ => return Err(StructureViolation::Bipartite(u.0, v.0)),
        }
    }

    let mut seen = vec![false; total];
    for &(a, b) in &transcript.deactivations {
        for id in [a, b] {
            if id as usize >= total || seen[id as usize] {
                return Err(StructureViolation::PerfectMatching(format!(
                    "vertex {id} missing or retired twice"
                )));
            }
            seen[id as usize] = true;
        }
        if state.edge_load(VertexId(a), VertexId(b)).is_none() {
            return Err(StructureViolation::PerfectMatching(format!(
                "pair ({a}, {b}) is not an edge"
            )));
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(StructureViolation::PerfectMatching(
            "some vertex never retired".into(),
        ));
    }

    // recursive steps need |B| = eps·|A| integral; the closing round pairs
    // the block one-to-one and is exempt
    let inv_eps = (1.0 / transcript.params.eps).round() as u128;
    for step in &transcript.branches {
        if step.steps_remaining < 2 {
            continue;
        }
        let unit = inv_eps.pow(step.steps_remaining as u32);
        if !(step.size_a as u128).is_multiple_of(unit) {
            return Err(StructureViolation::Divisibility {
                size: step.size_a,
                steps: step.steps_remaining,
            });
        }
    }

    for i in 0..total {
        let x = state.x(VertexId(i as u64));
        if x > 1.0 + FEAS_TOL {
            return Err(StructureViolation::Feasibility(i as u64, x));
        }
    }

    Ok(StructureReport {
        vertices: total as u64,
        edges: edge_count,
        pairs: transcript.deactivations.len() as u64,
    })
}
