//! Command-line front end: configuration, run orchestration and artifacts.

mod commands;
pub mod config;
pub mod failure;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::MethodChoice;
use crate::failure::{Failure, EXIT_OK};

#[derive(Debug, Parser)]
#[command(
    name = "cnlab",
    version,
    about = "Mild Navier–Stokes solver, critical-norm monitor and estimate checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default `cnlab-out`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    res: Option<usize>,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    /// taylor_green_2d, taylor_green_3d or random_divfree.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    amplitude: Option<f64>,
    /// Seed of the random profile.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve from a profile and write snapshots, monitor CSV and a report.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long, value_enum)]
        method: Option<MethodChoice>,
        /// ETDRK4 step.
        #[arg(long)]
        dt: Option<f64>,
        /// Picard time intervals.
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Compute the monitor CSV of a directory of snapshots.
    Monitor {
        #[command(flatten)]
        common: Common,
        /// Directory holding `.cnlb` snapshots.
        #[arg(long)]
        snapshots: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
    },
    /// Run verification checks and write reports plus a summary CSV.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Every check.
        #[arg(long, conflicts_with = "check")]
        all: bool,
        /// Selected checks, comma separated.
        #[arg(long, value_delimiter = ',')]
        check: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write an initial-data snapshot.
    Profile {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Time the transform and solver kernels.
    Bench {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
}

/// Run the command line `args` (program name first) and return the exit code.
/// Failures are reported as one JSON object on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let f = Failure::usage(e.to_string().trim().to_string());
            eprintln!("{}", f.to_json());
            return f.code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", f.to_json());
            f.code
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, Failure> {
    use commands::*;
    match cmd {
        Command::Simulate {
            common,
            grid,
            profile,
            horizon,
            nu,
            method,
            dt,
            nodes,
        } => {
            let mut cfg = load(&common)?;
            let mut solver = cfg.solver.take().unwrap_or_else(default_solver);
            if let Some(d) = grid.dim {
                solver.dim = d;
            }
            if let Some(r) = grid.res {
                solver.res = r;
            }
            if let Some(h) = horizon {
                solver.horizon = h;
            }
            if let Some(v) = nu {
                solver.nu = v;
            }
            if let Some(dt) = dt {
                solver.etdrk4.dt = Some(dt);
            }
            if let Some(n) = nodes {
                solver.picard.node_count = n;
            }
            let dim = solver.dim;
            solver.profile = override_profile(solver.profile.take(), &profile, dim)?;
            cfg.solver = Some(solver);
            if let Some(m) = method {
                cfg.method = m;
            }
            simulate(cfg)
        }
        Command::Monitor {
            common,
            snapshots,
            nu,
        } => monitor_dir(load(&common)?, &snapshots, nu),
        Command::Verify {
            common,
            all,
            check,
            seed,
        } => {
            let mut cfg = load(&common)?;
            if let Some(s) = seed {
                cfg.verify.seed = s;
            }
            if !all && check.is_empty() {
                return Err(Failure::usage(
                    "verify needs --all or --check NAME[,NAME...]",
                ));
            }
            verify(cfg, if all { None } else { Some(check) })
        }
        Command::Profile {
            common,
            grid,
            profile,
        } => {
            let mut cfg = load(&common)?;
            let mut solver = cfg.solver.take().unwrap_or_else(default_solver);
            if let Some(d) = grid.dim {
                solver.dim = d;
            }
            if let Some(r) = grid.res {
                solver.res = r;
            }
            let dim = solver.dim;
            solver.profile = override_profile(solver.profile.take(), &profile, dim)?;
            cfg.solver = Some(solver);
            write_profile(cfg)
        }
        Command::Bench {
            common,
            grid,
            repeats,
        } => {
            let mut cfg = load(&common)?;
            let mut solver = cfg.solver.take().unwrap_or_else(default_solver);
            if let Some(d) = grid.dim {
                solver.dim = d;
            }
            if let Some(r) = grid.res {
                solver.res = r;
            }
            cfg.solver = Some(solver);
            bench(cfg, repeats)
        }
    }
}

fn load(common: &Common) -> Result<config::RunConfig, Failure> {
    let mut cfg = config::RunConfig::load_or_default(common.config.as_deref())?;
    if let Some(out) = &common.out {
        cfg.output_dir = Some(out.clone());
    }
    Ok(cfg)
}
