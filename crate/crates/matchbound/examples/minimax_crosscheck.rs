//! Cross-checks the grid recursion against an exhaustive game-tree
//! evaluation that shares nothing with the dynamic program but the branch
//! rule.
//!
//! ```text
//! cargo run --example minimax_crosscheck
//! ```

use matchbound::oracle::minimax_value;
use matchbound::recursion::{f_grids, FParams};

fn main() {
    println!("two-step game vs tabulated recursion (matched action grids):");
    for gamma in [0.6, 0.9] {
        let params = FParams::new(0.5, gamma, 1e-3).unwrap();
        let game = minimax_value(params, 2, 1e-3).unwrap();
        let grid = f_grids(params, 2)[1].values[0];
        println!("  gamma = {gamma}: game = {game:+.9}, grid = {grid:+.9}");
        assert!((game - grid).abs() < 1e-12);
    }

    println!("\ncoarse 1/30 action grid still lands on the affine-crossing values:");
    let params = FParams::new(0.5, 0.6, 1e-3).unwrap();
    let v = minimax_value(params, 2, 1.0 / 30.0).unwrap();
    println!(
        "  gamma = 0.6: game = {v:+.6} vs exact 2/15 = {:+.6}",
        2.0 / 15.0
    );
    assert!((v - 2.0 / 15.0).abs() <= 1.0 / 30.0);

    println!("\nthree-step game never beats the tabulated bound:");
    let params = FParams::new(0.25, 0.55, 1e-3).unwrap();
    let v3 = minimax_value(params, 3, 1e-2).unwrap();
    let f3 = f_grids(params, 3)[2].values[0];
    println!("  eps = 1/4, gamma = 0.55: game = {v3:+.6} <= grid {f3:+.6} + tol");
    assert!(v3 <= f3 + 1e-2 + 2e-3);
}
