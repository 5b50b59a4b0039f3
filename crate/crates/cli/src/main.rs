mod commands;
mod config;
mod exit;
mod output;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Parser, Subcommand};

use commands::{Context, EstimateArgs, SimulateArgs, SimulateKind};
use config::RunConfig;
use exit::{config_error, CliResult};

#[derive(Parser)]
#[command(
    name = "placekit",
    version,
    about = "Optimal limit-order placement: costs, optimal depths, execution probabilities"
)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random stream; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Root tolerance for the solvers; for `validate`, the pass threshold in standard errors.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expected cost over a depth grid, one file per horizon.
    Cost {
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// Optimal depth per horizon.
    Optimal {
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// Critical horizon and its bounds, optionally over several initial prices.
    CriticalTime {
        #[arg(long, value_delimiter = ',')]
        s0: Option<Vec<f64>>,
    },
    /// Asymptotic approximations of the optimal depth next to the exact solution.
    Approx {
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// Execution probability on a depth by time grid.
    Rho {
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
    /// Slope and tail diagnostics of a queue-backed execution probability.
    RhoReport {
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 40)]
        points: usize,
        #[arg(long)]
        ceiling: Option<f64>,
    },
    /// Closed forms against the Monte Carlo oracles; exit code 4 on failure.
    Validate,
    /// Order-flow rates from an event log, written as a queue model.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        /// Queue model destination; defaults to `queue.toml` in the output directory.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        tick: f64,
        /// Cancellation rates two, three, ... ticks below the best ask.
        #[arg(long, value_delimiter = ',')]
        theta: Option<Vec<f64>>,
        /// Longer gaps between events (seconds) are not counted as active time.
        #[arg(long, default_value_t = 60.0)]
        max_gap: f64,
    },
    /// Monte Carlo estimates, or a synthetic event log.
    Simulate {
        #[arg(long, value_enum, default_value_t = SimulateKind::Cost)]
        kind: SimulateKind,
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
        #[arg(long)]
        paths: Option<usize>,
        /// Events in the synthetic log.
        #[arg(long, default_value_t = 100_000)]
        events: usize,
    },
}

fn init_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("PLACEKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| config_error(anyhow!("PLACEKIT_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(config_error)
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    let config = cli.config.as_deref().map(RunConfig::load).transpose()?;
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(config_error(anyhow!("--tol must be positive, got {tol}")));
        }
    }
    let ctx = Context {
        config,
        seed: cli.seed,
        out: cli.out,
        tol: cli.tol,
    };
    match cli.command {
        Command::Cost { x, t } => commands::cost(&ctx, x, t),
        Command::Optimal { t } => commands::optimal(&ctx, t),
        Command::CriticalTime { s0 } => commands::critical_time(&ctx, s0),
        Command::Approx { t } => commands::approx(&ctx, t),
        Command::Rho { depths, times } => commands::rho_surface(&ctx, depths, times),
        Command::RhoReport { t, points, ceiling } => commands::rho_report(&ctx, t, points, ceiling),
        Command::Validate => validate::run(&ctx),
        Command::Estimate {
            input,
            output,
            tick,
            theta,
            max_gap,
        } => commands::estimate(
            &ctx,
            EstimateArgs {
                input,
                output,
                tick,
                theta,
                max_gap,
            },
        ),
        Command::Simulate {
            kind,
            x,
            t,
            paths,
            events,
        } => commands::simulate(
            &ctx,
            SimulateArgs {
                kind,
                x,
                t,
                paths,
                events,
            },
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
