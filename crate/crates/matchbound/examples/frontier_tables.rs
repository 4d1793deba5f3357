//! Builds the threshold machinery at the optimum, certifies the sufficient
//! conditions, shows how the certification breaks just above the optimum, and
//! exports the tables as CSV.
//!
//! ```text
//! cargo run --example frontier_tables
//! ```

use std::path::Path;

use matchbound::export;
use matchbound::frontier::{
    build_frontier, compute_gamma_star, h_closed_form, h_fixed_point, verify_fact_tz,
    FrontierConstants,
};

fn main() {
    let (k_star, gamma_star) = compute_gamma_star(1e-6);
    let constants = FrontierConstants::new(gamma_star, k_star).unwrap();
    println!(
        "constants: r1 = {:.6}, r2 = {:.6}, alpha1 = {:.6}, alpha2 = {:.6}, c = {:.6}",
        constants.r1, constants.r2, constants.alpha1, constants.alpha2, constants.c
    );
    assert!((h_closed_form(0.0, &constants).unwrap() - constants.c).abs() < 1e-15);
    assert!((h_closed_form(gamma_star, &constants).unwrap() - 1.0).abs() < 1e-6);

    let f = build_frontier(gamma_star, k_star, 1e-4).unwrap();
    let report = verify_fact_tz(&f);
    println!(
        "at the optimum:  certified gamma = {:.9}  (condition-1 violation {:.2e}, condition-2 violation {:.2e})",
        report.certified_gamma, report.max_violation_1, report.max_violation_2
    );
    assert!(report.certified_gamma >= gamma_star - 1e-3);

    let above = build_frontier(gamma_star + 0.01, k_star, 1e-4).unwrap();
    let report_above = verify_fact_tz(&above);
    println!(
        "1% above it:     condition-2 violation jumps to {:.4e} — no threshold rule certifies that ratio",
        report_above.max_violation_2
    );
    assert!(report_above.max_violation_2 > 1e-3);

    // one pass of the integral fixed-point map leaves the closed form in place
    let m = 4000;
    let h0: Vec<f64> = (0..=m)
        .map(|i| h_closed_form(i as f64 * gamma_star / m as f64, &constants).unwrap())
        .collect();
    let h1 = h_fixed_point(&h0, gamma_star, 1).unwrap();
    let max_move = h0
        .iter()
        .zip(&h1)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("fixed-point map moves the closed form by at most {max_move:.2e}");
    assert!(max_move < 1e-5);

    let out = Path::new("target/example-out");
    export::write_text(&out.join("frontier_h.csv"), &export::frontier_h_csv(&f)).unwrap();
    export::write_text(
        &out.join("frontier_tables.csv"),
        &export::frontier_tables_csv(&f),
    )
    .unwrap();
    println!(
        "wrote {}/frontier_h.csv and frontier_tables.csv",
        out.display()
    );
}
