//! The four-vertex toy family: one edge now, possibly two pendant vertices
//! later. Sweeping the first-edge level pins the classic 2/3 bound, and the
//! threshold algorithm run through the real machinery stays above the
//! optimal ratio on both instances.
//!
//! ```text
//! cargo run --example toy_two_thirds
//! ```

use matchbound::algorithms::tz_algorithm;
use matchbound::frontier::{build_frontier, compute_gamma_star};
use matchbound::model::{ArrivalEvent, MatchState, OnlineAlgorithm, VertexId};
use matchbound::oracle::{toy_best_fixed_level, toy_ratio};

fn main() {
    // sweeping the committed level z: stop-now ratio z, pendant ratio (2-z)/2
    let (z_star, ratio) = toy_best_fixed_level(1e-3);
    println!("best fixed first-edge level z* = {z_star:.12}");
    println!("worst-case ratio at z*        = {ratio:.12}");
    assert!((z_star - 2.0 / 3.0).abs() < 1e-12);
    assert!((ratio - 2.0 / 3.0).abs() < 1e-12);
    assert!(toy_ratio(0.6) < ratio && toy_ratio(0.75) < ratio);

    // the threshold algorithm plays the same dilemma through the live model
    let (k_star, gamma_star) = compute_gamma_star(1e-6);
    let frontier = build_frontier(gamma_star, k_star, 1e-4).unwrap();
    let mut alg = tz_algorithm(&frontier);

    let mut state = MatchState::new();
    state.add_isolated(0.0);
    let first_edge = ArrivalEvent {
        batch: vec![(VertexId(1), vec![VertexId(0)])],
        simultaneous: false,
    };
    state.insert_event(&first_edge).unwrap();
    let d = alg.on_arrival(&first_edge, &state);
    state.apply_decision_in_place(&first_edge, &d).unwrap();
    let z = state.x(VertexId(1));
    println!("\nthreshold algorithm commits z = {z:.6} on a fresh edge");
    // the pour stops where the rising level meets the threshold; at the
    // optimum that fixed point is exactly r1
    let cs = &frontier.constants;
    assert!((z - cs.r1).abs() < 5e-3, "z = {z} vs r1 = {}", cs.r1);
    let ratio_stop_now = z / 1.0;

    let pendants = ArrivalEvent {
        batch: vec![
            (VertexId(2), vec![VertexId(0)]),
            (VertexId(3), vec![VertexId(1)]),
        ],
        simultaneous: true,
    };
    state.insert_event(&pendants).unwrap();
    let d = alg.on_arrival(&pendants, &state);
    state.apply_decision_in_place(&pendants, &d).unwrap();
    let alg_total = 0.5 * state.total_x();
    let ratio_pendants = alg_total / 2.0;
    println!("if the pendants arrive, its total becomes {alg_total:.6} against an optimum of 2");
    println!(
        "ratios: stop-now {ratio_stop_now:.6}, pendants {ratio_pendants:.6}, certified {gamma_star:.6}"
    );
    assert!(ratio_stop_now >= gamma_star - 5e-3);
    assert!(ratio_pendants >= gamma_star - 5e-3);
}
