//! Fractional online bipartite matching with two-sided vertex arrivals.
//!
//! The library has three layers that check each other:
//!
//! * [`frontier`] computes the optimal competitive ratio `Γ*` together with
//!   the threshold machinery (`H`, `G`, `g`, `a`) behind the water-filling
//!   algorithm, and certifies the sufficient conditions that make the
//!   algorithm `Γ`-competitive.
//! * [`recursion`] tabulates the adversary's value functions `F_n` on a grid
//!   and certifies their structural properties (monotone in `n`, concave,
//!   ½-Lipschitz). `F_n(0) < 0` is the signal that no algorithm can be
//!   `Γ`-competitive.
//! * [`adversary`] plays the recursive hard instance against any
//!   [`model::OnlineAlgorithm`], records a full [`adversary::Transcript`],
//!   and checks the structural claims (bipartiteness, perfect matching,
//!   partition divisibility). [`aggregate`] runs the same construction on
//!   level-bucketed populations far beyond what explicit vertices allow.
//!
//! [`oracle`] supplies independent ground truth: an offline maximum-matching
//! solver and an exhaustive minimax game evaluation cross-checking the grid
//! recursion. [`cli`] wires everything into a batch harness.
//!
//! Run `cargo run --example gamma_star` (or any of the other examples) for a
//! guided tour of each capability; the `matchbound` binary exposes the same
//! operations as subcommands.

pub mod adversary;
pub mod aggregate;
pub mod algorithms;
pub mod cli;
pub mod export;
pub mod frontier;
pub mod model;
pub mod oracle;
pub mod recursion;

pub use adversary::{check_structure, run_construction, AdversaryParams, Transcript};
pub use aggregate::{run_scaled, AggregateAlgorithm, ScaledOutcome};
pub use algorithms::{water_fill, AlgorithmSpec, ThresholdFunction};
pub use frontier::{
    build_frontier, compute_gamma_star, gamma_objective, h_closed_form, h_fixed_point,
    verify_fact_tz, FrontierConstants, FrontierFunctions,
};
pub use model::{AlgorithmDecision, ArrivalEvent, MatchState, OnlineAlgorithm, VertexId};
pub use oracle::{max_matching, minimax_value, OfflineGraph};
pub use recursion::{certify_claims, f1, f_grids, f_next, find_negative_n, FGrid, FParams};
