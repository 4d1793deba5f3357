//! Thin command-line front end over [`matchbound::cli`].

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use matchbound::cli::{self, ClaimFilter};

#[derive(Parser)]
#[command(
    name = "matchbound",
    about = "Tight bounds for fractional online bipartite matching with two-sided arrivals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct GridArgs {
    /// Reciprocal-integer batch fraction of the construction
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Target competitive ratio under attack
    #[arg(long, default_value_t = 0.6)]
    gamma: f64,
    /// Tabulation step for the value functions (1/step integral)
    #[arg(long, default_value_t = 1e-3)]
    grid_step: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the optimal ratio and its maximizer
    GammaStar {
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write the objective curve as CSV
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Tabulate the value functions F_1..F_n as CSV
    FTable {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the smallest n with F_n(0) < 0
    FindN {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 64)]
        n_max: usize,
        /// Recompute the value at half the grid step
        #[arg(long, default_value_t = false)]
        refine: bool,
    },
    /// Run the construction against one algorithm
    Duel {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Initial population (default: the minimal (1/eps)^n)
        #[arg(long, value_name = "N")]
        big_n: Option<u64>,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        /// tz | greedy | fixed:<c> | evensplit:<a>
        #[arg(long, default_value = "greedy")]
        algorithm: String,
        /// Write the transcript JSON here (explicit runs only)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Force the level-bucket executor
        #[arg(long, default_value_t = false)]
        scaled: bool,
        /// Reserved; the construction and fleet are deterministic
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Aggregated claim report (exit 0 iff all pass)
    Verify {
        /// all | monotone | concavity | lipschitz | fact | bound | structure | toy | crosscheck
        #[arg(long, default_value = "all")]
        claims: String,
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
    /// Exhaustive game value against the grid recursion
    Crosscheck {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1e-3)]
        action_step: f64,
    },
    /// Export the H and (G, g, a) tables as CSV
    FrontierExport {
        /// Ratio (default: the computed optimum)
        #[arg(long)]
        gamma: Option<f64>,
        /// Shape parameter (default: the computed maximizer)
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, default_value_t = 1e-4)]
        grid_step: f64,
        #[arg(long, default_value = "frontier_h.csv")]
        h_out: PathBuf,
        #[arg(long, default_value = "frontier_tables.csv")]
        tables_out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GammaStar { tol, curve } => cli::cmd_gamma_star(tol, curve.as_deref()),
        Command::FTable { grid, n, out } => {
            cli::cmd_f_table(grid.eps, grid.gamma, grid.grid_step, n, out.as_deref())
        }
        Command::FindN {
            grid,
            n_max,
            refine,
        } => cli::cmd_find_n(grid.eps, grid.gamma, grid.grid_step, n_max, refine),
        Command::Duel {
            grid,
            n,
            big_n,
            x0,
            algorithm,
            out,
            scaled,
            seed: _,
        } => cli::cmd_duel(
            grid.eps,
            grid.gamma,
            grid.grid_step,
            n,
            big_n,
            x0,
            &algorithm,
            out.as_deref(),
            scaled,
        ),
        Command::Verify { claims, n } => match claims.parse::<ClaimFilter>() {
            Ok(filter) => cli::cmd_verify(filter, n),
            Err(e) => Err(cli::CliError::Config(e)),
        },
        Command::Crosscheck {
            grid,
            n,
            action_step,
        } => cli::cmd_crosscheck(grid.eps, grid.gamma, grid.grid_step, n, action_step),
        Command::FrontierExport {
            gamma,
            k,
            grid_step,
            h_out,
            tables_out,
        } => cli::cmd_frontier_export(gamma, k, grid_step, &h_out, &tables_out),
    };
    match result {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
