//! Batch harness behind the `matchbound` binary: compute tables, run duels,
//! sweep the fleet, verify every claim, emit CSV/JSON reports.
//!
//! Every command is a plain function returning its report text, so the thin
//! binary only parses flags and maps errors to exit codes: `0` success, `2`
//! bad configuration, `3` claim failure.

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use thiserror::Error;

use crate::adversary::{check_structure, run_construction, AdversaryParams};
use crate::aggregate::{run_scaled, AggregateAlgorithm, DEFAULT_ROUNDS_CAP};
use crate::algorithms::{AlgorithmSpec, SkewInit};
use crate::export;
use crate::frontier::{build_frontier, compute_gamma_star, verify_fact_tz, FrontierFunctions};
use crate::model::OnlineAlgorithm;
use crate::oracle::{max_matching, minimax_value, toy_best_fixed_level, OfflineGraph};
use crate::recursion::{certify_claims, f_grids, find_negative_n, FParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CLAIM: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("claim failure: {0}")]
    Claim(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Claim(_) => EXIT_CLAIM,
            CliError::Io(_) => EXIT_CONFIG,
        }
    }
}

impl From<crate::recursion::RecursionError> for CliError {
    fn from(e: crate::recursion::RecursionError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<crate::frontier::FrontierError> for CliError {
    fn from(e: crate::frontier::FrontierError) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Worker threads for parameter sweeps, capped by `MATCHBOUND_THREADS`.
pub fn worker_threads() -> usize {
    let avail = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var("MATCHBOUND_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n > 0).unwrap_or(avail),
        Err(_) => avail,
    }
}

fn run_jobs<J: Send + Sync, R: Send>(jobs: Vec<J>, f: impl Fn(&J) -> R + Sync) -> Vec<R> {
    let threads = worker_threads().min(jobs.len().max(1));
    if threads <= 1 {
        return jobs.iter().map(&f).collect();
    }
    let results: Mutex<Vec<(usize, R)>> = Mutex::new(Vec::with_capacity(jobs.len()));
    let next: Mutex<usize> = Mutex::new(0);
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = {
                    let mut n = next.lock().unwrap();
                    let i = *n;
                    *n += 1;
                    i
                };
                if i >= jobs.len() {
                    break;
                }
                let r = f(&jobs[i]);
                results.lock().unwrap().push((i, r));
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|&(i, _)| i);
    results.into_iter().map(|(_, r)| r).collect()
}

/// `gamma-star`: the optimal ratio and its maximizer.
pub fn cmd_gamma_star(tol: f64, curve: Option<&Path>) -> Result<String, CliError> {
    if tol <= 0.0 {
        return Err(CliError::Config("tol must be positive".into()));
    }
    let (k_star, g_star) = compute_gamma_star(tol);
    let mut out = format!(
        "k_star={}\ngamma_star={}\n",
        export::sig(k_star),
        export::sig(g_star)
    );
    if let Some(path) = curve {
        let samples: Vec<(f64, f64)> = (0..=3000)
            .map(|i| {
                let k = 1.0 + i as f64 * 1e-3;
                (k, crate::frontier::gamma_objective(k).unwrap())
            })
            .collect();
        export::write_text(path, &export::objective_curve_csv(&samples))?;
        out.push_str(&format!("curve={}\n", path.display()));
    }
    Ok(out)
}

/// `f-table`: tabulate `F_1..F_n` as CSV.
pub fn cmd_f_table(
    eps: f64,
    gamma: f64,
    grid_step: f64,
    n: usize,
    out: Option<&Path>,
) -> Result<String, CliError> {
    let params = FParams::new(eps, gamma, grid_step)?;
    if n == 0 {
        return Err(CliError::Config("need n >= 1".into()));
    }
    let grids = f_grids(params, n);
    let csv = export::f_table_csv(&grids);
    match out {
        Some(path) => {
            export::write_text(path, &csv)?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(csv),
    }
}

/// `find-n`: smallest n with `F_n(0) < 0`. With `refine`, the value is
/// recomputed at half the grid step as an interpolation-error estimate.
pub fn cmd_find_n(
    eps: f64,
    gamma: f64,
    grid_step: f64,
    n_max: usize,
    refine: bool,
) -> Result<String, CliError> {
    let params = FParams::new(eps, gamma, grid_step)?;
    Ok(match find_negative_n(params, n_max) {
        Some((n, v)) => {
            let mut out = format!("negative_n={n}\nf_n_at_zero={}\n", export::sig(v));
            if refine {
                let fine = FParams::new(eps, gamma, grid_step / 2.0)?;
                let refined = f_grids(fine, n)[n - 1].values[0];
                out.push_str(&format!(
                    "f_n_at_zero_half_step={}\ngrid_shift={}\n",
                    export::sig(refined),
                    export::sig(refined - v)
                ));
            }
            out
        }
        None => format!("negative_n=none (searched n <= {n_max})\n"),
    })
}

fn frontier_at_optimum(grid_step: f64) -> Result<FrontierFunctions, CliError> {
    let (k, g) = compute_gamma_star(1e-6);
    Ok(build_frontier(g, k, grid_step)?)
}

/// Explicit runs stay below this many vertices; larger duels switch to the
/// level-bucket executor.
pub const EXPLICIT_VERTEX_LIMIT: u64 = 50_000;

/// `duel`: one adversary-vs-algorithm run with a summary line and an optional
/// transcript.
#[allow(clippy::too_many_arguments)]
pub fn cmd_duel(
    eps: f64,
    gamma: f64,
    grid_step: f64,
    n: usize,
    num_vertices: Option<u64>,
    x0: f64,
    algorithm: &str,
    out: Option<&Path>,
    force_scaled: bool,
) -> Result<String, CliError> {
    let fparams = FParams::new(eps, gamma, grid_step)?;
    let spec: AlgorithmSpec = algorithm
        .parse()
        .map_err(|e: crate::algorithms::AlgorithmError| CliError::Config(e.to_string()))?;
    let minimal = AdversaryParams::minimal_vertices(n, fparams)?;
    let big_n = num_vertices.unwrap_or(minimal);
    let params = AdversaryParams::new(n, big_n, x0, fparams)?;
    let frontier = frontier_at_optimum(1e-4)?;
    let grids = f_grids(fparams, n);
    let bound = grids[n - 1].eval(x0) * big_n as f64;

    let explicit_size = (big_n as f64) * (1.0 + eps).powi(n as i32);
    let scaled = force_scaled || explicit_size > EXPLICIT_VERTEX_LIMIT as f64;
    let mut out_text = String::new();
    if scaled {
        let agg = AggregateAlgorithm::from_spec(spec, &frontier);
        let outcome = run_scaled(&params, &agg, DEFAULT_ROUNDS_CAP)
            .map_err(|e| CliError::Config(e.to_string()))?;
        out_text.push_str(&format!(
            "mode=scaled algorithm={spec} n={n} N={big_n} eps={} gamma={} x0={} ALG={} OPT={} ratio={} v_alg={} bound={}\n",
            export::sig(eps),
            export::sig(gamma),
            export::sig(x0),
            export::sig(outcome.alg_total),
            export::sig(outcome.opt_size),
            export::sig(outcome.ratio()),
            export::sig(outcome.v_alg),
            export::sig(bound),
        ));
    } else {
        let mut alg = spec.online(&frontier);
        let (transcript, state) =
            run_construction(params, alg.as_mut()).map_err(|e| CliError::Claim(e.to_string()))?;
        if let Some(path) = out {
            export::write_text(path, &transcript.to_json())?;
            out_text.push_str(&format!("transcript={}\n", path.display()));
        }
        check_structure(&transcript, &state).map_err(|e| CliError::Claim(e.to_string()))?;
        out_text.push_str(&format!(
            "mode=explicit algorithm={spec} n={n} N={big_n} eps={} gamma={} x0={} ALG={} OPT={} ratio={} v_alg={} bound={}\n",
            export::sig(eps),
            export::sig(gamma),
            export::sig(x0),
            export::sig(transcript.alg_total),
            export::sig(transcript.opt_size as f64),
            export::sig(transcript.ratio()),
            export::sig(transcript.v_alg),
            export::sig(bound),
        ));
    }
    Ok(out_text)
}

/// `crosscheck`: the exhaustive game against the grid recursion.
pub fn cmd_crosscheck(
    eps: f64,
    gamma: f64,
    grid_step: f64,
    n: usize,
    action_step: f64,
) -> Result<String, CliError> {
    let params = FParams::new(eps, gamma, grid_step)?;
    if n == 0 || n > 4 {
        return Err(CliError::Config("crosscheck supports 1 <= n <= 4".into()));
    }
    let v = minimax_value(params, n, action_step).map_err(|e| CliError::Config(e.to_string()))?;
    let grids = f_grids(params, n);
    let f0 = grids[n - 1].values[0];
    let diff = v - f0;
    let mut report = format!(
        "minimax={} grid_f={} diff={}\n",
        export::sig(v),
        export::sig(f0),
        export::sig(diff)
    );
    let matched_grids = (action_step - grid_step).abs() < 1e-15;
    let ok = if matched_grids && n <= 2 {
        diff.abs() <= 1e-12
    } else {
        v <= f0 + action_step + 2.0 * grid_step
    };
    if !ok {
        return Err(CliError::Claim(format!("crosscheck mismatch: {report}")));
    }
    report.push_str("crosscheck: pass\n");
    Ok(report)
}

/// `frontier-export`: H and (G, g, a) tables as CSV.
pub fn cmd_frontier_export(
    gamma: Option<f64>,
    k: Option<f64>,
    grid_step: f64,
    h_out: &Path,
    tables_out: &Path,
) -> Result<String, CliError> {
    let (k_opt, g_opt) = compute_gamma_star(1e-6);
    let gamma = gamma.unwrap_or(g_opt);
    let k = k.unwrap_or(k_opt);
    let f = build_frontier(gamma, k, grid_step)?;
    export::write_text(h_out, &export::frontier_h_csv(&f))?;
    export::write_text(tables_out, &export::frontier_tables_csv(&f))?;
    let rep = verify_fact_tz(&f);
    Ok(format!(
        "gamma={} k={} certified_gamma={} violation_1={} violation_2={}\nwrote {} and {}\n",
        export::sig(gamma),
        export::sig(k),
        export::sig(rep.certified_gamma),
        export::sig(rep.max_violation_1),
        export::sig(rep.max_violation_2),
        h_out.display(),
        tables_out.display()
    ))
}

/// Claim groups selectable in `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimFilter {
    All,
    Monotone,
    Concavity,
    Lipschitz,
    Fact,
    Bound,
    Structure,
    Toy,
    Crosscheck,
}

impl std::str::FromStr for ClaimFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "all" => Self::All,
            "monotone" => Self::Monotone,
            "concavity" => Self::Concavity,
            "lipschitz" => Self::Lipschitz,
            "fact" => Self::Fact,
            "bound" => Self::Bound,
            "structure" => Self::Structure,
            "toy" => Self::Toy,
            "crosscheck" => Self::Crosscheck,
            other => return Err(format!("unknown claim filter: {other}")),
        })
    }
}

struct DuelJob {
    spec: AlgorithmSpec,
    n: usize,
    eps: f64,
    gamma: f64,
    x0: f64,
}

struct DuelResult {
    label: String,
    v_alg: f64,
    bound: f64,
    ratio: f64,
    structure: Result<(), String>,
    opt_matches: bool,
    is_tz: bool,
    eps: f64,
}

/// `verify`: the aggregated claim report. Runs the value-function claims over
/// the standard parameter sweep, the certification of the frontier tables,
/// the adversary bound over the whole fleet, structural checks backed by the
/// offline matcher, the toy family, and the game crosscheck.
pub fn cmd_verify(filter: ClaimFilter, n_cap: usize) -> Result<String, CliError> {
    let mut report = String::new();
    let mut failures = Vec::new();
    let enabled = |f: ClaimFilter| filter == ClaimFilter::All || filter == f;

    if enabled(ClaimFilter::Monotone)
        || enabled(ClaimFilter::Concavity)
        || enabled(ClaimFilter::Lipschitz)
    {
        for &eps in &[0.5, 0.25] {
            for &gamma in &[0.55, 0.6, 0.9] {
                let params = FParams::new(eps, gamma, 1e-3)?;
                let grids = f_grids(params, n_cap.max(2));
                let rep = certify_claims(&grids);
                let checks: [(ClaimFilter, &str, f64); 3] = [
                    (ClaimFilter::Monotone, "monotone", rep.monotone_violation),
                    (ClaimFilter::Concavity, "concavity", rep.concavity_violation),
                    (ClaimFilter::Lipschitz, "lipschitz", rep.lipschitz_violation),
                ];
                for (kind, name, viol) in checks {
                    if enabled(kind) {
                        let ok = viol <= rep.tolerance;
                        report.push_str(&format!(
                            "claim {name} eps={eps} gamma={gamma} n<={}: violation={} {}\n",
                            n_cap.max(2),
                            export::sig(viol),
                            if ok { "pass" } else { "FAIL" }
                        ));
                        if !ok {
                            failures.push(format!("{name} at eps={eps} gamma={gamma}"));
                        }
                    }
                }
            }
        }
    }

    if enabled(ClaimFilter::Fact) {
        let (k, g) = compute_gamma_star(1e-6);
        let f = build_frontier(g, k, 1e-4)?;
        let rep = verify_fact_tz(&f);
        let ok = rep.certified_gamma >= g - 1e-3 && rep.max_violation_1 <= 1e-3;
        report.push_str(&format!(
            "claim fact at optimum: certified={} violation_1={} {}\n",
            export::sig(rep.certified_gamma),
            export::sig(rep.max_violation_1),
            if ok { "pass" } else { "FAIL" }
        ));
        if !ok {
            failures.push("fact certification at the optimum".into());
        }
        let above = build_frontier(g + 0.01, k, 1e-4)?;
        let rep2 = verify_fact_tz(&above);
        let ok2 = rep2.max_violation_2 > 1e-3;
        report.push_str(&format!(
            "claim fact above optimum: violation_2={} {}\n",
            export::sig(rep2.max_violation_2),
            if ok2 { "pass" } else { "FAIL" }
        ));
        if !ok2 {
            failures.push("no violation appears above the optimum".into());
        }
    }

    if enabled(ClaimFilter::Bound) || enabled(ClaimFilter::Structure) {
        let frontier = frontier_at_optimum(1e-3)?;
        let mut jobs = Vec::new();
        for spec in AlgorithmSpec::fleet() {
            for n in 1..=3usize {
                for &eps in &[0.5, 0.25] {
                    for &gamma in &[0.55, 0.6, 0.9] {
                        for &x0 in &[0.0, 0.5] {
                            jobs.push(DuelJob {
                                spec,
                                n,
                                eps,
                                gamma,
                                x0,
                            });
                        }
                    }
                }
            }
        }
        let results = run_jobs(jobs, |job| -> Result<DuelResult, String> {
            let fp = FParams::new(job.eps, job.gamma, 1e-3).map_err(|e| e.to_string())?;
            let unit = AdversaryParams::minimal_vertices(job.n, fp).map_err(|e| e.to_string())?;
            let params =
                AdversaryParams::new(job.n, unit, job.x0, fp).map_err(|e| e.to_string())?;
            let mut alg: Box<dyn OnlineAlgorithm> = if job.x0 > 0.0 {
                Box::new(SkewInit(job.spec.online(&frontier)))
            } else {
                job.spec.online(&frontier)
            };
            let (t, state) = run_construction(params, alg.as_mut()).map_err(|e| e.to_string())?;
            let grids = f_grids(fp, job.n);
            let bound =
                grids[job.n - 1].eval(job.x0) * unit as f64 + 2.0 * fp.grid_step * unit as f64;
            let structure = check_structure(&t, &state)
                .map(|_| ())
                .map_err(|e| e.to_string());
            let g = OfflineGraph::from_run(&t, &state);
            let opt_matches = max_matching(&g).map_err(|e| e.to_string())? as u64 == t.opt_size;
            Ok(DuelResult {
                label: format!(
                    "{} n={} eps={} gamma={} x0={}",
                    job.spec, job.n, job.eps, job.gamma, job.x0
                ),
                v_alg: t.v_alg,
                bound,
                ratio: t.ratio(),
                structure,
                opt_matches,
                is_tz: job.spec == AlgorithmSpec::Tz,
                eps: job.eps,
            })
        });
        let (mut bound_bad, mut struct_bad, mut tz_bad) = (0usize, 0usize, 0usize);
        let mut total = 0usize;
        for r in &results {
            match r {
                Err(e) => {
                    failures.push(format!("duel failed: {e}"));
                }
                Ok(r) => {
                    total += 1;
                    if enabled(ClaimFilter::Bound) && r.v_alg > r.bound {
                        bound_bad += 1;
                        failures.push(format!("bound exceeded: {}", r.label));
                    }
                    if enabled(ClaimFilter::Structure) && (r.structure.is_err() || !r.opt_matches) {
                        struct_bad += 1;
                        failures.push(format!("structure: {}", r.label));
                    }
                    if enabled(ClaimFilter::Bound) && r.is_tz {
                        let (k_opt, g_opt) = compute_gamma_star(1e-6);
                        let _ = k_opt;
                        if r.ratio < g_opt - 5.0 * r.eps {
                            tz_bad += 1;
                            failures.push(format!("tz ratio too low: {}", r.label));
                        }
                    }
                }
            }
        }
        if enabled(ClaimFilter::Bound) {
            report.push_str(&format!(
                "claim bound: {total} runs, {bound_bad} above F_n(x0)*N + 2*step*N, tz below floor: {tz_bad} {}\n",
                if bound_bad == 0 && tz_bad == 0 { "pass" } else { "FAIL" }
            ));
        }
        if enabled(ClaimFilter::Structure) {
            report.push_str(&format!(
                "claim structure: {total} runs, {struct_bad} violations {}\n",
                if struct_bad == 0 { "pass" } else { "FAIL" }
            ));
        }
    }

    if enabled(ClaimFilter::Toy) {
        let (z, r) = toy_best_fixed_level(1e-3);
        let ok = (z - 2.0 / 3.0).abs() <= 1e-12 && (r - 2.0 / 3.0).abs() <= 1e-12;
        report.push_str(&format!(
            "claim toy: best level={} ratio={} {}\n",
            export::sig(z),
            export::sig(r),
            if ok { "pass" } else { "FAIL" }
        ));
        if !ok {
            failures.push("toy family optimum".into());
        }
    }

    if enabled(ClaimFilter::Crosscheck) {
        for &gamma in &[0.6, 0.9] {
            let params = FParams::new(0.5, gamma, 1e-3)?;
            let v = minimax_value(params, 2, 1e-3).map_err(|e| CliError::Config(e.to_string()))?;
            let f0 = f_grids(params, 2)[1].values[0];
            let ok = (v - f0).abs() <= 1e-12;
            report.push_str(&format!(
                "claim crosscheck gamma={gamma}: game={} grid={} {}\n",
                export::sig(v),
                export::sig(f0),
                if ok { "pass" } else { "FAIL" }
            ));
            if !ok {
                failures.push(format!("crosscheck at gamma={gamma}"));
            }
        }
    }

    if failures.is_empty() {
        report.push_str("verify: all checks passed\n");
        Ok(report)
    } else {
        Err(CliError::Claim(format!(
            "{report}verify: {} failure(s): {}",
            failures.len(),
            failures.join("; ")
        )))
    }
}

/// Convenience wrapper for paths in option position.
pub fn opt_path(p: &Option<PathBuf>) -> Option<&Path> {
    p.as_deref()
}
