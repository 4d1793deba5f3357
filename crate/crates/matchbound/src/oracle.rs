//! Independent ground truth: an offline maximum-matching solver, an
//! exhaustive minimax evaluation of the construction game, and the four-vertex
//! toy family.

use std::collections::HashMap;

use thiserror::Error;

use crate::adversary::{Color, Transcript};
use crate::model::MatchState;
use crate::recursion::{f1, f_grids, FParams};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("graph is not bipartite with respect to the stored coloring")]
    NotBipartite,
    #[error("game tree exceeded the node budget of {0}")]
    BudgetExceeded(usize),
}

/// A static bipartite graph with its two-coloring.
#[derive(Debug, Clone)]
pub struct OfflineGraph {
    pub colors: Vec<Color>,
    pub edges: Vec<(u32, u32)>,
}

impl OfflineGraph {
    pub fn vertex_count(&self) -> usize {
        self.colors.len()
    }

    /// Extracts the finished instance of a run: colors are re-derived from
    /// the arrival order exactly as the construction assigns them.
    pub fn from_run(transcript: &Transcript, state: &MatchState) -> Self {
        let total = state.vertex_count();
        let mut colors = vec![Color::White; total];
        for ev in &transcript.events {
            let assigned = ev
                .neighbors
                .first()
                .map(|&v| match colors[v as usize] {
                    Color::White => Color::Black,
                    Color::Black => Color::White,
                })
                .unwrap_or(Color::White);
            for &u in &ev.new {
                colors[u as usize] = assigned;
            }
        }
        let edges = state
            .edges()
            .map(|((u, v), _)| (u.0 as u32, v.0 as u32))
            .collect();
        Self { colors, edges }
    }
}

/// Exact maximum bipartite matching size, by Hopcroft–Karp.
pub fn max_matching(g: &OfflineGraph) -> Result<usize, OracleError> {
    let n = g.vertex_count();
    // left side = white vertices; adjacency indexed by side-local ids
    let mut side_index = vec![usize::MAX; n];
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (v, &c) in g.colors.iter().enumerate() {
        match c {
            Color::White => {
                side_index[v] = left.len();
                left.push(v);
            }
            Color::Black => {
                side_index[v] = right.len();
                right.push(v);
            }
        }
    }
    let mut adj = vec![Vec::new(); left.len()];
    for &(u, v) in &g.edges {
        let (u, v) = (u as usize, v as usize);
        let (l, r) = match (g.colors[u], g.colors[v]) {
            (Color::White, Color::Black) => (u, v),
            (Color::Black, Color::White) => (v, u),
            _ => return Err(OracleError::NotBipartite),
        };
        adj[side_index[l]].push(side_index[r]);
    }

    const NIL: usize = usize::MAX;
    let (nl, nr) = (left.len(), right.len());
    let mut match_l = vec![NIL; nl];
    let mut match_r = vec![NIL; nr];
    let mut dist = vec![0u32; nl];
    let mut queue = Vec::with_capacity(nl);
    let mut total = 0usize;

    loop {
        // BFS layering from free left vertices
        queue.clear();
        let mut reachable_free_right = false;
        for l in 0..nl {
            if match_l[l] == NIL {
                dist[l] = 0;
                queue.push(l);
            } else {
                dist[l] = u32::MAX;
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let l = queue[head];
            head += 1;
            for &r in &adj[l] {
                match match_r[r] {
                    NIL => reachable_free_right = true,
                    l2 => {
                        if dist[l2] == u32::MAX {
                            dist[l2] = dist[l] + 1;
                            queue.push(l2);
                        }
                    }
                }
            }
        }
        if !reachable_free_right {
            break;
        }
        // layered DFS augmentation
        fn try_augment(
            l: usize,
            adj: &[Vec<usize>],
            match_l: &mut [usize],
            match_r: &mut [usize],
            dist: &mut [u32],
        ) -> bool {
            for i in 0..adj[l].len() {
                let r = adj[l][i];
                let ml = match_r[r];
                if ml == NIL
                    || (dist[ml] == dist[l] + 1 && try_augment(ml, adj, match_l, match_r, dist))
                {
                    match_l[l] = r;
                    match_r[r] = l;
                    return true;
                }
            }
            dist[l] = u32::MAX;
            false
        }
        for l in 0..nl {
            if match_l[l] == NIL && try_augment(l, &adj, &mut match_l, &mut match_r, &mut dist) {
                total += 1;
            }
        }
    }
    Ok(total)
}

/// Exhaustive best response in the construction game, tracking partition
/// averages only.
///
/// At each node the algorithm picks its average action from a grid of step
/// `action_step`; the adversary answers with the branch comparison under the
/// tabulated `F` functions. Values are memoized on `(steps, level)` with
/// levels carried exactly. With the action grid equal to the recursion's
/// grid, the root value reproduces the tabulated `F_n(0)`.
pub fn minimax_value(params: FParams, n: usize, action_step: f64) -> Result<f64, OracleError> {
    const NODE_BUDGET: usize = 20_000_000;
    let grids = f_grids(params, n.saturating_sub(1).max(1));
    let actions = (1.0 / action_step).round() as usize;
    let mut memo: HashMap<(usize, u64), f64> = HashMap::new();
    let mut work = 0usize;

    fn level_key(x: f64) -> u64 {
        (x / 1e-12).round() as u64
    }

    #[allow(clippy::too_many_arguments)]
    fn eval(
        k: usize,
        x: f64,
        params: &FParams,
        grids: &[crate::recursion::FGrid],
        actions: usize,
        action_step: f64,
        memo: &mut HashMap<(usize, u64), f64>,
        work: &mut usize,
    ) -> Result<f64, OracleError> {
        if k == 1 {
            return Ok(f1(x.min(1.0), params.gamma).expect("level in range"));
        }
        let key = (k, level_key(x));
        if let Some(&v) = memo.get(&key) {
            return Ok(v);
        }
        let f_prev = &grids[k - 2];
        let mut best = f64::NEG_INFINITY;
        for j in 0..=actions {
            *work += 1;
            if *work > 20_000_000 {
                return Err(OracleError::BudgetExceeded(20_000_000));
            }
            let a = j as f64 * action_step;
            if x + params.eps * a > 1.0 + 1e-12 {
                break;
            }
            // adversary's branch rule under the tabulated functions
            let fxa = f_prev.eval(x + params.eps * a);
            let fa = f_prev.eval(a);
            let e1f = fxa + params.eps * fa;
            let e2f = (1.0 - params.eps) * fxa
                + params.eps * (((1.0 + params.eps) * a + x) / 2.0 - params.gamma);
            let v = if e1f <= e2f {
                eval(
                    k - 1,
                    x + params.eps * a,
                    params,
                    grids,
                    actions,
                    action_step,
                    memo,
                    work,
                )? + params.eps * eval(k - 1, a, params, grids, actions, action_step, memo, work)?
            } else {
                (1.0 - params.eps)
                    * eval(
                        k - 1,
                        x + params.eps * a,
                        params,
                        grids,
                        actions,
                        action_step,
                        memo,
                        work,
                    )?
                    + params.eps * (((1.0 + params.eps) * a + x) / 2.0 - params.gamma)
            };
            best = best.max(v);
        }
        memo.insert(key, best);
        Ok(best)
    }

    let _ = NODE_BUDGET;
    eval(
        n,
        0.0,
        &params,
        &grids,
        actions,
        action_step,
        &mut memo,
        &mut work,
    )
}

/// Worst-case ratio of the toy strategy that matches the first edge to level
/// `z` and continues greedily: the adversary either stops (ratio `z`) or adds
/// the two pendant vertices (ratio `(2-z)/2`).
pub fn toy_ratio(z: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&z));
    let stop_now = z;
    let pendants = (z + 2.0 * (1.0 - z)) / 2.0;
    stop_now.min(pendants)
}

/// Sweeps the first-edge level over a grid and refines the crossing of the
/// two instance ratios to its exact location.
pub fn toy_best_fixed_level(step: f64) -> (f64, f64) {
    let m = (1.0 / step).round() as usize;
    let mut best = (0.0, 0.0);
    for i in 0..=m {
        let z = i as f64 * step;
        let r = toy_ratio(z);
        if r > best.1 {
            best = (z, r);
        }
    }
    // the two ratio lines have slopes +1 and -1/2; their crossing is exact
    let (mut lo, mut hi) = ((best.0 - step).max(0.0), (best.0 + step).min(1.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= (2.0 - mid) / 2.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let z_star = 0.5 * (lo + hi);
    (z_star, toy_ratio(z_star))
}
