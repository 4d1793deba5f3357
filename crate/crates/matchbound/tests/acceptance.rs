//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test -p matchbound --test acceptance -- --nocapture` to
//! see every line.

use std::sync::OnceLock;
use std::time::Instant;

use matchbound::adversary::{check_structure, run_construction, AdversaryParams};
use matchbound::aggregate::{run_scaled, AggregateAlgorithm, DEFAULT_ROUNDS_CAP};
use matchbound::algorithms::{AlgorithmSpec, SkewInit};
use matchbound::frontier::{
    build_frontier, compute_gamma_star, h_closed_form, h_fixed_point, verify_fact_tz,
    FrontierConstants, FrontierFunctions,
};
use matchbound::model::{MatchState, OnlineAlgorithm};
use matchbound::oracle::{max_matching, minimax_value, toy_best_fixed_level, OfflineGraph};
use matchbound::recursion::{certify_claims, f_grids, find_negative_n, FParams};

fn optimum() -> (f64, f64) {
    static OPT: OnceLock<(f64, f64)> = OnceLock::new();
    *OPT.get_or_init(|| compute_gamma_star(1e-6))
}

fn fine_frontier() -> &'static FrontierFunctions {
    static F: OnceLock<FrontierFunctions> = OnceLock::new();
    F.get_or_init(|| {
        let (k, g) = optimum();
        build_frontier(g, k, 1e-4).expect("frontier builds at the optimum")
    })
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(criterion: u32, name: &str, o: &Outcome) {
    println!(
        "criterion {criterion:2} ({name}): {} — {}",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail
    );
    assert!(o.pass, "criterion {criterion} failed: {}", o.detail);
}

#[test]
fn criterion_01_gamma_star_reproduction() {
    let t0 = Instant::now();
    let (k_star, g_star) = compute_gamma_star(1e-6);
    let elapsed = t0.elapsed();
    let three_decimals = (g_star * 1000.0).floor() as i64;
    let o = Outcome {
        pass: three_decimals == 526 && elapsed.as_secs_f64() < 1.0,
        detail: format!(
            "gamma* = {g_star:.9} (k* = {k_star:.6}), {:.3} ms",
            elapsed.as_secs_f64() * 1e3
        ),
    };
    report(1, "gamma* reproduction", &o);
}

#[test]
fn criterion_02_optimality_frontier() {
    let t0 = Instant::now();
    let (k_star, g_star) = optimum();
    let rep = verify_fact_tz(fine_frontier());
    let above = build_frontier(g_star + 0.01, k_star, 1e-4).unwrap();
    let rep_above = verify_fact_tz(&above);
    let elapsed = t0.elapsed();
    let pass = rep.certified_gamma >= g_star - 1e-3
        && rep_above.max_violation_2 > 0.0
        && elapsed.as_secs_f64() < 10.0;
    let o = Outcome {
        pass,
        detail: format!(
            "certified {:.9} (gamma* - {:.2e}); above-optimum violation {:.4e}; {:.2} s",
            rep.certified_gamma,
            g_star - rep.certified_gamma,
            rep_above.max_violation_2,
            elapsed.as_secs_f64()
        ),
    };
    report(2, "optimality frontier", &o);
}

#[test]
fn criterion_03_closed_form_identity() {
    let (k_star, g_star) = optimum();
    let cs = FrontierConstants::new(g_star, k_star).unwrap();
    let m = 10_000usize;
    let mut worst = 0.0f64;
    for i in 0..=m {
        let y = i as f64 * g_star / m as f64;
        let hy = h_closed_form(y, &cs).unwrap();
        let hmy = h_closed_form(g_star - y, &cs).unwrap();
        let lhs = (hy - y) * (hmy - (g_star - y));
        let rhs = cs.c * (1.0 - g_star) + g_star * y - y * y;
        worst = worst.max((lhs - rhs).abs());
    }
    let h0: Vec<f64> = (0..=m)
        .map(|i| h_closed_form(i as f64 * g_star / m as f64, &cs).unwrap())
        .collect();
    let h1 = h_fixed_point(&h0, g_star, 1).unwrap();
    let max_move = h0
        .iter()
        .zip(&h1)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let o = Outcome {
        pass: worst <= 1e-10 && max_move <= 1e-5,
        detail: format!(
            "product identity worst {worst:.2e} over {} points; fixed-point move {max_move:.2e}",
            m + 1
        ),
    };
    report(3, "closed-form H identity", &o);
}

#[test]
fn criterion_04_f_recursion_exact_values() {
    let tol = 2.0 * 1e-3;
    let g06 = f_grids(FParams::new(0.5, 0.6, 1e-3).unwrap(), 2);
    let g09 = f_grids(FParams::new(0.5, 0.9, 1e-3).unwrap(), 2);
    let checks = [
        ("F_2(0) @ 0.6", g06[1].values[0], 2.0 / 15.0),
        ("F_2(0.5) @ 0.6", g06[1].values[500], 0.05),
        ("F_2(0) @ 0.9", g09[1].values[0], -13.0 / 60.0),
    ];
    let worst = checks
        .iter()
        .map(|(_, got, want)| (got - want).abs())
        .fold(0.0f64, f64::max);
    let o = Outcome {
        pass: worst <= tol,
        detail: format!(
            "{} — worst deviation {worst:.2e} (tolerance {tol:.0e})",
            checks
                .iter()
                .map(|(n, got, _)| format!("{n} = {got:.6}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    };
    report(4, "value recursion exact values", &o);
}

#[test]
fn criterion_05_claim_suite() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for &eps in &[0.5, 0.25] {
        for &gamma in &[0.55, 0.6, 0.9] {
            let grids = f_grids(FParams::new(eps, gamma, 1e-3).unwrap(), 5);
            let rep = certify_claims(&grids);
            worst = worst
                .max(rep.monotone_violation)
                .max(rep.concavity_violation)
                .max(rep.lipschitz_violation);
            assert!(
                rep.pass(),
                "claims fail at eps={eps} gamma={gamma}: {rep:?}"
            );
        }
    }
    let elapsed = t0.elapsed();
    let o = Outcome {
        pass: worst <= 2e-3 && elapsed.as_secs_f64() < 60.0,
        detail: format!(
            "n <= 5 over 6 parameter sets: worst violation {worst:.2e} (tolerance 2e-3); {:.1} s",
            elapsed.as_secs_f64()
        ),
    };
    report(5, "claim suite", &o);
}

#[test]
fn criterion_06_impossibility_end_to_end() {
    let fp = FParams::new(0.1, 0.6, 1e-3).unwrap();
    let (n, f_n0) = match find_negative_n(fp, 64) {
        Some(hit) => hit,
        None => {
            report(
                6,
                "impossibility end to end",
                &Outcome {
                    pass: false,
                    detail: "no negative F_n(0) up to n = 64".into(),
                },
            );
            return;
        }
    };
    let minimal = AdversaryParams::minimal_vertices(n, fp).unwrap();
    let params = AdversaryParams::new(n, minimal, 0.0, fp).unwrap();
    let mut lines = Vec::new();
    let mut pass = true;
    for spec in AlgorithmSpec::fleet() {
        let agg = AggregateAlgorithm::from_spec(spec, fine_frontier());
        let out = run_scaled(&params, &agg, DEFAULT_ROUNDS_CAP).unwrap();
        let beats = out.alg_total < 0.6 * out.opt_size;
        pass &= beats;
        lines.push(format!("{spec}: ratio {:.4}", out.ratio()));
    }
    let o = Outcome {
        pass,
        detail: format!(
            "F_{n}(0) = {f_n0:.6} at eps=1/10, gamma=0.6; N = {minimal}; every fleet ratio < 0.6 [{}]",
            lines.join(", ")
        ),
    };
    report(6, "impossibility end to end", &o);
}

fn fleet_sweep() -> Vec<(AlgorithmSpec, usize, f64, f64, f64)> {
    let mut jobs = Vec::new();
    for spec in AlgorithmSpec::fleet() {
        for n in 1..=3usize {
            for &eps in &[0.5, 0.25] {
                for &gamma in &[0.55, 0.6, 0.9] {
                    for &x0 in &[0.0, 0.5] {
                        jobs.push((spec, n, eps, gamma, x0));
                    }
                }
            }
        }
    }
    jobs
}

fn run_sweep_case(
    spec: AlgorithmSpec,
    n: usize,
    eps: f64,
    gamma: f64,
    x0: f64,
) -> (matchbound::Transcript, MatchState, f64) {
    let fp = FParams::new(eps, gamma, 1e-3).unwrap();
    let unit = AdversaryParams::minimal_vertices(n, fp).unwrap();
    let params = AdversaryParams::new(n, unit, x0, fp).unwrap();
    let mut alg: Box<dyn OnlineAlgorithm> = if x0 > 0.0 {
        Box::new(SkewInit(spec.online(fine_frontier())))
    } else {
        spec.online(fine_frontier())
    };
    let (t, state) = run_construction(params, alg.as_mut()).unwrap();
    let grids = f_grids(fp, n);
    let bound = grids[n - 1].eval(x0) * unit as f64 + 2.0 * fp.grid_step * unit as f64;
    (t, state, bound)
}

#[test]
fn criterion_07_adversary_bound() {
    let mut worst_slack = f64::INFINITY;
    let mut runs = 0;
    for (spec, n, eps, gamma, x0) in fleet_sweep() {
        let (t, _, bound) = run_sweep_case(spec, n, eps, gamma, x0);
        assert!(
            t.v_alg <= bound,
            "{spec} at (n={n}, eps={eps}, gamma={gamma}, x0={x0}): v_alg {} > bound {bound}",
            t.v_alg
        );
        worst_slack = worst_slack.min(bound - t.v_alg);
        runs += 1;
    }
    let o = Outcome {
        pass: true,
        detail: format!(
            "{runs} runs all satisfy v_alg <= F_n(x0)·N + 2·step·N (tightest slack {worst_slack:.2e})"
        ),
    };
    report(7, "adversary bound", &o);
}

#[test]
fn criterion_08_structural_claims() {
    let mut runs = 0;
    for (spec, n, eps, gamma, x0) in fleet_sweep() {
        let (t, state, _) = run_sweep_case(spec, n, eps, gamma, x0);
        check_structure(&t, &state).unwrap_or_else(|e| {
            panic!("{spec} at (n={n}, eps={eps}, gamma={gamma}, x0={x0}): {e}")
        });
        let g = OfflineGraph::from_run(&t, &state);
        let opt = max_matching(&g).unwrap();
        assert_eq!(
            opt as u64, t.opt_size,
            "offline matcher disagrees for {spec} at (n={n}, eps={eps}, gamma={gamma}, x0={x0})"
        );
        runs += 1;
    }
    let o = Outcome {
        pass: true,
        detail: format!(
            "{runs} runs: two-coloring, perfect matching via retirement pairs, divisibility, and offline matcher all agree"
        ),
    };
    report(8, "structural claims", &o);
}

#[test]
fn criterion_09_toy_bound() {
    let (z, r) = toy_best_fixed_level(1e-3);
    let o = Outcome {
        pass: (z - 2.0 / 3.0).abs() <= 1e-12 && (r - 2.0 / 3.0).abs() <= 1e-12,
        detail: format!("best first-edge level {z:.12} with worst-case ratio {r:.12}"),
    };
    report(9, "toy family bound", &o);
}

#[test]
fn criterion_10_minimax_crosscheck() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for &gamma in &[0.6, 0.9] {
        let fp = FParams::new(0.5, gamma, 1e-3).unwrap();
        let game = minimax_value(fp, 2, 1e-3).unwrap();
        let grid = f_grids(fp, 2)[1].values[0];
        worst = worst.max((game - grid).abs());
    }
    let elapsed = t0.elapsed();
    let o = Outcome {
        pass: worst <= 1e-12 && elapsed.as_secs_f64() < 10.0,
        detail: format!(
            "game vs grid at gamma in {{0.6, 0.9}}: worst gap {worst:.2e}; {:.2} s",
            elapsed.as_secs_f64()
        ),
    };
    report(10, "minimax crosscheck", &o);
}

#[test]
fn criterion_11_tz_positive_side() {
    let (_, g_star) = optimum();
    let mut worst_margin = f64::INFINITY;
    let mut runs = 0;
    for (spec, n, eps, gamma, x0) in fleet_sweep() {
        if spec != AlgorithmSpec::Tz {
            continue;
        }
        let (t, _, _) = run_sweep_case(spec, n, eps, gamma, x0);
        let floor = g_star - 5.0 * eps;
        let ratio = t.ratio();
        assert!(
            ratio >= floor,
            "tz at (n={n}, eps={eps}, gamma={gamma}, x0={x0}): ratio {ratio} below {floor}"
        );
        worst_margin = worst_margin.min(ratio - floor);
        runs += 1;
    }
    let o = Outcome {
        pass: true,
        detail: format!(
            "{runs} instances: tz ratio >= gamma* - 5*eps everywhere (smallest margin {worst_margin:.3})"
        ),
    };
    report(11, "threshold algorithm positive side", &o);
}
