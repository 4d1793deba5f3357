//! Tabulates the adversary's value functions, certifies their structural
//! claims, and searches for the step count where `F_n(0)` turns negative.
//!
//! ```text
//! cargo run --example value_recursion
//! ```

use std::path::Path;

use matchbound::export;
use matchbound::recursion::{certify_claims, f_grids, find_negative_n, FParams};

fn main() {
    let params = FParams::new(0.5, 0.6, 1e-3).unwrap();
    let grids = f_grids(params, 4);
    println!("eps = 1/2, gamma = 0.6:");
    println!("  n    F_n(0)      F_n(0.5)    argmax a at 0");
    for g in &grids {
        println!(
            "  {}    {:+.6}   {:+.6}   {:.3}",
            g.n, g.values[0], g.values[500], g.argmax_a[0]
        );
    }
    // two-step values against the affine-crossing closed forms
    assert!((grids[1].values[0] - 2.0 / 15.0).abs() < 2e-3);
    assert!((grids[1].values[500] - 0.05).abs() < 2e-3);

    let report = certify_claims(&grids);
    println!(
        "claims:  monotone {:.2e}, concavity {:.2e}, lipschitz {:.2e}  (tolerance {:.0e})",
        report.monotone_violation,
        report.concavity_violation,
        report.lipschitz_violation,
        report.tolerance
    );
    assert!(report.pass());

    // above the frontier the origin value must eventually turn negative
    let hard = FParams::new(0.5, 0.9, 1e-3).unwrap();
    let (n, value) = find_negative_n(hard, 16).unwrap();
    println!("gamma = 0.9: F_{n}(0) = {value:.6} < 0 — no 0.9-competitive algorithm");
    assert_eq!(n, 2);

    // at gamma = 1/2 greedy is competitive, so the sign never flips
    let easy = FParams::new(0.5, 0.5, 1e-3).unwrap();
    assert!(find_negative_n(easy, 8).is_none());
    println!("gamma = 0.5: F_n(0) stays nonnegative (n <= 8), as a greedy baseline forces");

    let out = Path::new("target/example-out/f_table.csv");
    export::write_text(out, &export::f_table_csv(&grids)).unwrap();
    println!("wrote {}", out.display());
}
