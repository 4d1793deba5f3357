//! One full adversary-vs-algorithm run with transcript, structure checks, and
//! the offline matching oracle.
//!
//! ```text
//! cargo run --example adversary_duel
//! ```

use std::path::Path;

use matchbound::adversary::{check_structure, run_construction, AdversaryParams};
use matchbound::algorithms::WaterFillAlgorithm;
use matchbound::export;
use matchbound::oracle::{max_matching, OfflineGraph};
use matchbound::recursion::{f_grids, FParams};

fn main() {
    let fparams = FParams::new(0.5, 0.6, 1e-3).unwrap();
    let params = AdversaryParams::new(2, 4, 0.0, fparams).unwrap();
    let mut greedy = WaterFillAlgorithm::greedy();
    let (transcript, state) = run_construction(params, &mut greedy).unwrap();

    println!("greedy against the two-step construction (eps = 1/2, gamma = 0.6, N = 4):");
    for step in &transcript.branches {
        println!(
            "  step at k={}: |A| = {}, |B| = {}, a = {:.3}, branch = {:?}",
            step.steps_remaining, step.size_a, step.size_b, step.observed_a, step.branch
        );
    }
    println!(
        "  ALG = {:.3}, OPT = {}, ratio = {:.4}, v_alg = {:+.3}",
        transcript.alg_total,
        transcript.opt_size,
        transcript.ratio(),
        transcript.v_alg
    );
    // greedy lands exactly on the classic two-thirds bound here
    assert!((transcript.ratio() - 2.0 / 3.0).abs() < 1e-9);

    // the surplus respects the value-function bound
    let grids = f_grids(fparams, 2);
    let bound = grids[1].values[0] * params.num_vertices as f64;
    println!(
        "  bound: v_alg = {:+.3} <= F_2(0)·N = {bound:+.3}",
        transcript.v_alg
    );
    assert!(transcript.v_alg <= bound + 2e-3 * params.num_vertices as f64);

    // structural claims and the independent matcher
    let report = check_structure(&transcript, &state).unwrap();
    let graph = OfflineGraph::from_run(&transcript, &state);
    let opt = max_matching(&graph).unwrap();
    println!(
        "  structure: {} vertices, {} edges, {} retirement pairs; offline maximum matching = {opt}",
        report.vertices, report.edges, report.pairs
    );
    assert_eq!(opt as u64, transcript.opt_size);

    let out = Path::new("target/example-out/duel_transcript.json");
    export::write_text(out, &transcript.to_json()).unwrap();
    println!("wrote {}", out.display());
}
