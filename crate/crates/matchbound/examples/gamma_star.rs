//! Computes the optimal competitive ratio and samples the objective curve.
//!
//! ```text
//! cargo run --example gamma_star
//! ```

use matchbound::frontier::{compute_gamma_star, gamma_objective};

fn main() {
    let (k_star, gamma_star) = compute_gamma_star(1e-6);
    println!("k*     = {k_star:.9}");
    println!("gamma* = {gamma_star:.9}");
    assert_eq!((gamma_star * 1000.0).floor() as i64, 526);

    // the objective rises from 1/2 at k = 1 to the optimum, then decays
    println!("\n  k      objective");
    let mut prev = 0.0;
    let mut increased_then_decreased = (false, false);
    for i in 0..=30 {
        let k = 1.0 + i as f64 * 0.1;
        let v = gamma_objective(k).unwrap();
        if i > 0 {
            if v > prev {
                increased_then_decreased.0 = true;
            } else if increased_then_decreased.0 {
                increased_then_decreased.1 = true;
            }
        }
        prev = v;
        if i % 3 == 0 || (k - k_star).abs() < 0.05 {
            println!("  {k:.2}   {v:.9}");
        }
    }
    assert!(increased_then_decreased.0 && increased_then_decreased.1);
    assert!(gamma_star >= gamma_objective(1.0).unwrap());
    println!("\nobjective is unimodal around k* and gamma* dominates the curve");
}
