//! The fleet of online fractional-matching algorithms.
//!
//! The centerpiece is threshold water-filling: an arriving vertex pours mass
//! continuously into its least-matched neighbors (ties rise together) and
//! stops as soon as its own level reaches `a(x_v)` for the current least
//! level `x_v`, or the neighbors saturate. `a ≡ 1` is greedy, `a ≡ c` a fixed
//! cap, and the table built from the optimality frontier gives the algorithm
//! matching the impossibility bound.
//!
//! The pour engine works on `(level, count)` buckets with any number of
//! simultaneous pourers, so the same code drives both per-vertex runs and the
//! level-bucketed populations of [`crate::aggregate`].

use std::collections::HashMap;

use thiserror::Error;

use crate::frontier::FrontierFunctions;
use crate::model::{AlgorithmDecision, ArrivalEvent, MatchState, OnlineAlgorithm, VertexId};

#[derive(Debug, Error)]
pub enum AlgorithmError {
    #[error("bad threshold table: {0}")]
    BadThreshold(String),
    #[error("unknown algorithm name: {0}")]
    BadName(String),
}

/// Non-increasing stopping rule `a: [0,1] → [0,1]`, tabulated on a uniform
/// grid and evaluated by linear interpolation.
#[derive(Debug, Clone)]
pub struct ThresholdFunction {
    table: Vec<f64>,
    step: f64,
}

impl ThresholdFunction {
    pub fn new(table: Vec<f64>) -> Result<Self, AlgorithmError> {
        if table.len() < 2 {
            return Err(AlgorithmError::BadThreshold(
                "need at least 2 points".into(),
            ));
        }
        if table.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(AlgorithmError::BadThreshold("values outside [0, 1]".into()));
        }
        if table.windows(2).any(|w| w[1] > w[0] + 1e-9) {
            return Err(AlgorithmError::BadThreshold("table increases".into()));
        }
        let step = 1.0 / (table.len() - 1) as f64;
        Ok(Self { table, step })
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c, c]).expect("constant in [0,1]")
    }

    /// Non-increasing upper envelope of the frontier's threshold table.
    ///
    /// The raw `a` table dips to `Γ` below the kink of `G` and jumps back to
    /// one just above it; the running maximum from the right is the least
    /// non-increasing table dominating it, and it satisfies the same
    /// sufficient conditions.
    pub fn from_frontier(f: &FrontierFunctions) -> Self {
        let mut env = f.a.clone();
        for i in (0..env.len() - 1).rev() {
            env[i] = env[i].max(env[i + 1]);
        }
        let step = f.grid_step;
        Self { table: env, step }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let m = self.table.len() - 1;
        if x <= 0.0 {
            return self.table[0];
        }
        let t = x / self.step;
        let i = t as usize;
        if i >= m {
            return self.table[m];
        }
        let frac = t - i as f64;
        self.table[i] * (1.0 - frac) + self.table[i + 1] * frac
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }
}

/// A group of vertices sharing one water level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelBucket {
    pub level: f64,
    pub count: f64,
}

/// Runs `w` simultaneous pourers, each starting at level `q0`, against the
/// sorted bucket population. Pourers rise at unit rate; the wet front rises
/// at rate `w / (wet count)`. Stops at the first of: the pourer level meets
/// the threshold at the current front, or everything saturates at one.
///
/// Returns the final pourer level and collapses the wet prefix in place.
pub fn water_fill_weighted(
    q0: f64,
    buckets: &mut Vec<LevelBucket>,
    w: f64,
    stop: &ThresholdFunction,
) -> f64 {
    if buckets.is_empty() || w <= 0.0 {
        return q0;
    }
    let mut q = q0;
    let mut lev = buckets[0].level;
    let mut wet = 1usize;
    while wet < buckets.len() && buckets[wet].level <= lev + 1e-15 {
        wet += 1;
    }
    loop {
        if q >= stop.eval(lev) - 1e-15 || lev >= 1.0 - 1e-15 {
            break;
        }
        let n_wet: f64 = buckets[..wet].iter().map(|b| b.count).sum();
        let rate = w / n_wet;
        let dq_merge = if wet < buckets.len() {
            (buckets[wet].level - lev) / rate
        } else {
            f64::INFINITY
        };
        let dq_sat = (1.0 - lev) / rate;
        let dq_hi = dq_merge.min(dq_sat);
        // the pourer level gains on the non-increasing target at rate >= 1,
        // so the first crossing in this segment is unique
        let phi = |dq: f64| (q + dq) - stop.eval(lev + dq * rate);
        if phi(dq_hi) >= 0.0 {
            let (mut lo, mut hi) = (0.0f64, dq_hi);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if phi(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            // the upper end is the first grid of the bracket where the stop
            // condition holds
            let dq = hi;
            q += dq;
            lev += dq * rate;
            break;
        }
        q += dq_hi;
        lev += dq_hi * rate;
        if dq_hi == dq_merge {
            lev = buckets[wet].level;
            wet += 1;
            while wet < buckets.len() && buckets[wet].level <= lev + 1e-15 {
                wet += 1;
            }
        }
    }
    let n_wet: f64 = buckets[..wet].iter().map(|b| b.count).sum();
    buckets.splice(
        ..wet,
        [LevelBucket {
            level: lev,
            count: n_wet,
        }],
    );
    q
}

/// Event-exact water-filling of one new vertex at `u_level` into neighbors at
/// the given levels. Returns per-neighbor increments in input order.
pub fn water_fill(u_level: f64, neighbors: &[f64], stop: &ThresholdFunction) -> Vec<f64> {
    if neighbors.is_empty() {
        return Vec::new();
    }
    let mut sorted: Vec<f64> = neighbors.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut buckets: Vec<LevelBucket> = Vec::new();
    for &l in &sorted {
        match buckets.last_mut() {
            Some(b) if (b.level - l).abs() <= 1e-15 => b.count += 1.0,
            _ => buckets.push(LevelBucket {
                level: l,
                count: 1.0,
            }),
        }
    }
    water_fill_weighted(u_level, &mut buckets, 1.0, stop);
    let front = buckets[0].level;
    neighbors
        .iter()
        .map(|&l| if l < front { front - l } else { 0.0 })
        .collect()
}

/// Water-filling driven by a fixed threshold table. Batch events are
/// processed vertex by vertex in arrival order, each pour seeing the levels
/// left by the previous one.
pub struct WaterFillAlgorithm {
    stop: ThresholdFunction,
}

impl WaterFillAlgorithm {
    pub fn new(stop: ThresholdFunction) -> Self {
        Self { stop }
    }

    pub fn greedy() -> Self {
        Self::new(ThresholdFunction::constant(1.0))
    }

    pub fn fixed_level(c: f64) -> Self {
        Self::new(ThresholdFunction::constant(c))
    }
}

/// The threshold algorithm instantiated from frontier tables.
pub fn tz_algorithm(frontier: &FrontierFunctions) -> WaterFillAlgorithm {
    WaterFillAlgorithm::new(ThresholdFunction::from_frontier(frontier))
}

impl OnlineAlgorithm for WaterFillAlgorithm {
    fn on_init(&mut self, n: usize, target_mean: f64) -> Vec<f64> {
        vec![target_mean; n]
    }

    fn on_arrival(&mut self, event: &ArrivalEvent, state: &MatchState) -> AlgorithmDecision {
        let mut decision = AlgorithmDecision::default();
        let mut pending: HashMap<VertexId, f64> = HashMap::new();
        let level = |v: VertexId, pending: &HashMap<VertexId, f64>| {
            state.x(v) + pending.get(&v).copied().unwrap_or(0.0)
        };
        for (u, nbrs) in &event.batch {
            let levels: Vec<f64> = nbrs.iter().map(|&v| level(v, &pending)).collect();
            let incs = water_fill(level(*u, &pending), &levels, &self.stop);
            for (&v, inc) in nbrs.iter().zip(&incs) {
                if *inc > 0.0 {
                    decision.push(*u, v, *inc);
                    *pending.entry(v).or_insert(0.0) += inc;
                    *pending.entry(*u).or_insert(0.0) += inc;
                }
            }
        }
        decision
    }
}

/// Spreads `a·|B|` mass uniformly over each revealed complete-bipartite
/// block, capped by per-vertex feasibility on the old side.
pub struct EvenSplitAlgorithm {
    pub level: f64,
}

impl OnlineAlgorithm for EvenSplitAlgorithm {
    fn on_init(&mut self, n: usize, target_mean: f64) -> Vec<f64> {
        vec![target_mean; n]
    }

    fn on_arrival(&mut self, event: &ArrivalEvent, state: &MatchState) -> AlgorithmDecision {
        let mut decision = AlgorithmDecision::default();
        let mut pending: HashMap<VertexId, f64> = HashMap::new();
        // maximal runs of identical neighbor lists form one block
        let mut i = 0;
        while i < event.batch.len() {
            let mut j = i + 1;
            while j < event.batch.len() && event.batch[j].1 == event.batch[i].1 {
                j += 1;
            }
            let nbrs = &event.batch[i].1;
            if !nbrs.is_empty() {
                let block = (j - i) as f64;
                let target = self.level * block / nbrs.len() as f64;
                for &v in nbrs {
                    let x = state.x(v) + pending.get(&v).copied().unwrap_or(0.0);
                    let gain = target.min(1.0 - x).max(0.0);
                    if gain > 0.0 {
                        let per_edge = gain / block;
                        for (u, _) in &event.batch[i..j] {
                            decision.push(*u, v, per_edge);
                        }
                        *pending.entry(v).or_insert(0.0) += gain;
                    }
                }
            }
            i = j;
        }
        decision
    }
}

/// Wrapper replacing an algorithm's initialization by the most skewed vector
/// with the required mean: a prefix of fully matched vertices.
pub struct SkewInit<A>(pub A);

impl<A: OnlineAlgorithm> OnlineAlgorithm for SkewInit<A> {
    fn on_init(&mut self, n: usize, target_mean: f64) -> Vec<f64> {
        let total = target_mean * n as f64;
        let full = total.floor() as usize;
        let rem = total - full as f64;
        let mut v = vec![0.0; n];
        for slot in v.iter_mut().take(full.min(n)) {
            *slot = 1.0;
        }
        if full < n && rem > 1e-12 {
            v[full] = rem;
        }
        v
    }

    fn on_arrival(&mut self, event: &ArrivalEvent, state: &MatchState) -> AlgorithmDecision {
        self.0.on_arrival(event, state)
    }
}

/// Registry key for the algorithm fleet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmSpec {
    Tz,
    Greedy,
    Fixed(f64),
    EvenSplit(f64),
}

impl std::str::FromStr for AlgorithmSpec {
    type Err = AlgorithmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "tz" {
            return Ok(Self::Tz);
        }
        if s == "greedy" {
            return Ok(Self::Greedy);
        }
        if let Some(c) = s.strip_prefix("fixed:") {
            let c: f64 = c
                .parse()
                .map_err(|_| AlgorithmError::BadName(s.to_string()))?;
            if !(0.0..=1.0).contains(&c) {
                return Err(AlgorithmError::BadName(s.to_string()));
            }
            return Ok(Self::Fixed(c));
        }
        if let Some(a) = s.strip_prefix("evensplit:") {
            let a: f64 = a
                .parse()
                .map_err(|_| AlgorithmError::BadName(s.to_string()))?;
            if !(0.0..=1.0).contains(&a) {
                return Err(AlgorithmError::BadName(s.to_string()));
            }
            return Ok(Self::EvenSplit(a));
        }
        Err(AlgorithmError::BadName(s.to_string()))
    }
}

impl std::fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Tz => write!(f, "tz"),
            Self::Greedy => write!(f, "greedy"),
            Self::Fixed(c) => write!(f, "fixed:{c}"),
            Self::EvenSplit(a) => write!(f, "evensplit:{a}"),
        }
    }
}

impl AlgorithmSpec {
    /// Fresh per-run instance. The frontier tables are only consulted for
    /// [`AlgorithmSpec::Tz`].
    pub fn online(&self, frontier: &FrontierFunctions) -> Box<dyn OnlineAlgorithm> {
        match *self {
            Self::Tz => Box::new(tz_algorithm(frontier)),
            Self::Greedy => Box::new(WaterFillAlgorithm::greedy()),
            Self::Fixed(c) => Box::new(WaterFillAlgorithm::fixed_level(c)),
            Self::EvenSplit(a) => Box::new(EvenSplitAlgorithm { level: a }),
        }
    }

    /// The standard test fleet.
    pub fn fleet() -> Vec<AlgorithmSpec> {
        vec![
            Self::Tz,
            Self::Greedy,
            Self::Fixed(0.0),
            Self::Fixed(0.3),
            Self::Fixed(0.7),
            Self::EvenSplit(0.2),
            Self::EvenSplit(0.5),
            Self::EvenSplit(1.0),
        ]
    }
}
