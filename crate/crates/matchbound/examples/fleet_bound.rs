//! Sweeps the whole algorithm fleet against the construction and checks the
//! surplus bound `v_alg <= F_n(x0)·N` on every run.
//!
//! ```text
//! cargo run --example fleet_bound
//! ```

use matchbound::adversary::{run_construction, AdversaryParams};
use matchbound::algorithms::{AlgorithmSpec, SkewInit};
use matchbound::frontier::{build_frontier, compute_gamma_star};
use matchbound::model::OnlineAlgorithm;
use matchbound::recursion::{f_grids, FParams};

fn main() {
    let (k_star, gamma_star) = compute_gamma_star(1e-6);
    let frontier = build_frontier(gamma_star, k_star, 1e-3).unwrap();

    println!("v_alg vs F_n(x0)·N across the fleet (minimal N each):");
    println!("  algorithm      n  eps   gamma  x0   v_alg      bound     slack");
    let mut runs = 0;
    for spec in AlgorithmSpec::fleet() {
        for n in [2usize, 3] {
            for eps in [0.5, 0.25] {
                for gamma in [0.55, 0.6, 0.9] {
                    for x0 in [0.0, 0.5] {
                        let fp = FParams::new(eps, gamma, 1e-3).unwrap();
                        let unit = AdversaryParams::minimal_vertices(n, fp).unwrap();
                        let params = AdversaryParams::new(n, unit, x0, fp).unwrap();
                        let mut alg: Box<dyn OnlineAlgorithm> = if x0 > 0.0 {
                            Box::new(SkewInit(spec.online(&frontier)))
                        } else {
                            spec.online(&frontier)
                        };
                        let (t, _) = run_construction(params, alg.as_mut()).unwrap();
                        let grids = f_grids(fp, n);
                        let bound = grids[n - 1].eval(x0) * unit as f64 + 2e-3 * unit as f64;
                        assert!(
                            t.v_alg <= bound,
                            "{spec} beats the bound at n={n} eps={eps} gamma={gamma} x0={x0}"
                        );
                        runs += 1;
                        if gamma == 0.6 && eps == 0.5 && x0 == 0.0 {
                            println!(
                                "  {:12} {:2}  {:.2}  {:.2}  {:.1}  {:+8.4}  {:+8.4}  {:+.4}",
                                spec.to_string(),
                                n,
                                eps,
                                gamma,
                                x0,
                                t.v_alg,
                                bound,
                                bound - t.v_alg
                            );
                        }
                    }
                }
            }
        }
    }
    println!("all {runs} runs respect the bound");
}
