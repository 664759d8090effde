//! Subcommand bodies. Every command validates its whole configuration
//! before touching the output directory.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cnlab::littlewood_paley::{besov_norm, Cutoff, DyadicPartition};
use cnlab::monitor::{monitor, write_csv, MonitorSeries};
use cnlab::paraproduct::bony_split;
use cnlab::semigroup::nonlinearity;
use cnlab::solver::{
    cross_validate, etdrk4_integrate, heat_sup, kato_smallness, make_profile, picard_solve,
    ProfileSpec, SolverConfig, Trajectory,
};
use cnlab::spectral::{
    lp_norm, to_physical, to_spectral, Field, Grid, Snapshot, SpectralVectorField,
};
use cnlab::verify::{summary_csv, verify_selected, CheckKind};
use cnlab::Error;
use serde_json::{json, Value};

use crate::config::{MethodChoice, RunConfig};
use crate::failure::{Failure, EXIT_CHECK_FAILED, EXIT_OK};
use crate::ProfileArgs;

pub const RUN_CONFIG_FILE: &str = "run_config.json";
pub const REPORT_FILE: &str = "report.json";
pub const MONITOR_FILE: &str = "monitor.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const PROFILE_FILE: &str = "profile.cnlb";
pub const BENCH_FILE: &str = "bench.json";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const REPORT_DIR: &str = "reports";

pub fn default_solver() -> SolverConfig {
    SolverConfig::new(Grid::new(2, 32).expect("valid grid"), 1.0)
}

fn default_profile(dim: usize) -> ProfileSpec {
    if dim == 3 {
        ProfileSpec::TaylorGreen3d { amplitude: 1.0 }
    } else {
        ProfileSpec::TaylorGreen2d { amplitude: 1.0 }
    }
}

/// Apply `--profile`, `--amplitude` and `--seed` on top of the configured profile.
pub fn override_profile(
    existing: Option<ProfileSpec>,
    args: &ProfileArgs,
    dim: usize,
) -> Result<Option<ProfileSpec>, Failure> {
    let mut spec = match &args.profile {
        Some(kind) => Some(ProfileSpec::from_kind(kind)?),
        None => existing,
    };
    if args.amplitude.is_some() || args.seed.is_some() {
        let mut s = spec.unwrap_or_else(|| default_profile(dim));
        if let Some(a) = args.amplitude {
            s = s.with_amplitude(a);
        }
        if let Some(new_seed) = args.seed {
            match &mut s {
                ProfileSpec::RandomDivfree { seed, .. } => *seed = new_seed,
                _ => {
                    return Err(Failure::usage(
                        "--seed only applies to random_divfree profiles",
                    ))
                }
            }
        }
        spec = Some(s);
    }
    Ok(spec)
}

/// The output directory, created with the effective configuration inside.
struct Outputs {
    dir: PathBuf,
    config: Value,
    written: Vec<String>,
}

impl Outputs {
    fn create(cfg: &RunConfig) -> Result<Self, Failure> {
        let dir = cfg.output_dir();
        fs::create_dir_all(&dir)
            .map_err(|e| Failure::io(&format!("creating {}", dir.display()), e))?;
        let mut out = Self {
            dir,
            config: cfg.to_json(),
            written: Vec::new(),
        };
        let text = serde_json::to_string_pretty(&out.config).expect("json");
        out.write(RUN_CONFIG_FILE, text.as_bytes())?;
        Ok(out)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)
                .map_err(|e| Failure::io(&format!("creating {}", parent.display()), e))?;
        }
        fs::write(&path, bytes)
            .map_err(|e| Failure::io(&format!("writing {}", path.display()), e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn write_json(&mut self, name: &str, mut body: Value) -> Result<(), Failure> {
        body["run_config"] = self.config.clone();
        let text = serde_json::to_string_pretty(&body).expect("json");
        self.write(name, text.as_bytes())
    }

    fn write_trajectory(&mut self, traj: &Trajectory) -> Result<(), Failure> {
        for (i, snap) in traj.snapshots().iter().enumerate() {
            let mut bytes = Vec::new();
            snap.write_to(&mut bytes)?;
            self.write(&format!("{SNAPSHOT_DIR}/state_{i:05}.cnlb"), &bytes)?;
        }
        Ok(())
    }

    fn write_monitor(&mut self, series: &MonitorSeries) -> Result<(), Failure> {
        let mut bytes = Vec::new();
        write_csv(series, &mut bytes)?;
        self.write(MONITOR_FILE, &bytes)
    }
}

/// Write to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

/// The solver section with its profile filled in.
fn resolved_solver(cfg: &mut RunConfig) -> Result<SolverConfig, Failure> {
    let solver = cfg
        .solver
        .as_mut()
        .ok_or_else(|| Failure::usage("missing solver section"))?;
    if solver.profile.is_none() {
        solver.profile = Some(default_profile(solver.dim));
    }
    Ok(solver.clone())
}

pub fn simulate(mut cfg: RunConfig) -> Result<i32, Failure> {
    let solver = resolved_solver(&mut cfg)?;
    cfg.validate()?;
    let grid = solver.grid()?;
    let spec = solver.profile.clone().expect("resolved");
    let u0 = make_profile(grid, &spec)?;
    let omega = cfg
        .monitor
        .omega
        .as_ref()
        .map(|s| make_profile(grid, s))
        .transpose()?;
    let start = Instant::now();
    let mut out = Outputs::create(&cfg)?;
    let mut report = json!({
        "method": cfg.method,
        "profile": spec,
        "kato_smallness": kato_smallness(&u0, solver.horizon, solver.nu)?,
    });
    let outcome = match cfg.method {
        MethodChoice::Picard => picard_solve(&u0, &solver).map(|run| {
            report["picard"] = serde_json::to_value(&run.report).expect("json");
            run.trajectory
        }),
        MethodChoice::Etdrk4 => etdrk4_integrate(&u0, &solver),
        MethodChoice::Both => cross_validate(&u0, &solver).map(|cv| {
            report["picard"] = serde_json::to_value(&cv.picard.report).expect("json");
            report["cross_validation"] = serde_json::to_value(cv.summary()).expect("json");
            cv.picard.trajectory
        }),
    };
    let (traj, failure) = match outcome {
        Ok(t) => (Some(t), None),
        Err(Error::NonConvergence(run)) => {
            report["picard"] = serde_json::to_value(&run.report).expect("json");
            (None, Some(Failure::from(Error::NonConvergence(run))))
        }
        Err(Error::BlowupSuspected { time, trajectory }) => {
            let t = (*trajectory).clone();
            (
                Some(t),
                Some(Failure::from(Error::BlowupSuspected { time, trajectory })),
            )
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(traj) = &traj {
        out.write_trajectory(traj)?;
        let series = monitor(traj, &cfg.monitor.options(), omega.as_ref())?;
        out.write_monitor(&series)?;
        report["states"] = json!(traj.len());
        report["final_time"] = json!(traj.times().last());
        report["blowup_time"] = json!(traj.meta().blowup_time);
        report["divergence_defect"] = json!(traj.divergence_defect());
    }
    report["elapsed_seconds"] = json!(start.elapsed().as_secs_f64());
    report["outputs"] = json!(out.written.clone());
    out.write_json(REPORT_FILE, report)?;
    match failure {
        Some(f) => Err(f),
        None => Ok(EXIT_OK),
    }
}

fn load_snapshots(dir: &Path) -> Result<Vec<Snapshot>, Failure> {
    let entries =
        fs::read_dir(dir).map_err(|e| Failure::io(&format!("reading {}", dir.display()), e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cnlb"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::usage(format!(
            "no .cnlb snapshots in {}",
            dir.display()
        )));
    }
    paths
        .iter()
        .map(|p| Snapshot::load(p).map_err(Failure::from))
        .collect()
}

pub fn monitor_dir(cfg: RunConfig, snapshots: &Path, nu: f64) -> Result<i32, Failure> {
    cfg.validate()?;
    let traj = Trajectory::from_snapshots(load_snapshots(snapshots)?, nu)?;
    let omega = cfg
        .monitor
        .omega
        .as_ref()
        .map(|s| make_profile(traj.grid(), s))
        .transpose()?;
    let series = monitor(&traj, &cfg.monitor.options(), omega.as_ref())?;
    let mut out = Outputs::create(&cfg)?;
    out.write_monitor(&series)?;
    Ok(EXIT_OK)
}

pub fn verify(cfg: RunConfig, checks: Option<Vec<String>>) -> Result<i32, Failure> {
    cfg.validate()?;
    let kinds = match checks {
        None => CheckKind::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|n| CheckKind::from_name(n.trim()))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let mut out = Outputs::create(&cfg)?;
    let reports = verify_selected(&cfg.verify, &kinds)?;
    for r in &reports {
        let body = json!({ "report": r });
        out.write_json(&format!("{REPORT_DIR}/{}.json", r.check), body)?;
    }
    let summary = summary_csv(&reports);
    out.write(SUMMARY_FILE, summary.as_bytes())?;
    emit(&summary);
    Ok(if reports.iter().all(|r| r.pass) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

pub fn write_profile(mut cfg: RunConfig) -> Result<i32, Failure> {
    let solver = resolved_solver(&mut cfg)?;
    cfg.validate()?;
    let grid = solver.grid()?;
    let spec = solver.profile.clone().expect("resolved");
    let u0 = make_profile(grid, &spec)?;
    let mut out = Outputs::create(&cfg)?;
    let mut bytes = Vec::new();
    Snapshot::from_field(&u0, 0.0).write_to(&mut bytes)?;
    out.write(PROFILE_FILE, &bytes)?;
    let summary = json!({
        "profile": spec,
        "dim": grid.dim(),
        "res": grid.res(),
        "sup": to_physical(&u0).max_magnitude(),
        "l2": lp_norm(&u0, 2.0)?,
        "ln": lp_norm(&u0, grid.dim() as f64)?,
        "kato_smallness": kato_smallness(&u0, solver.horizon, solver.nu)?,
        "divergence_defect": u0.divergence_defect(),
    });
    emit(&format!(
        "{}\n",
        serde_json::to_string_pretty(&summary).expect("json")
    ));
    Ok(EXIT_OK)
}

fn median_ms(repeats: usize, mut f: impl FnMut() -> Result<(), Failure>) -> Result<f64, Failure> {
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t = Instant::now();
        f()?;
        times.push(t.elapsed().as_secs_f64() * 1e3);
    }
    times.sort_by(f64::total_cmp);
    Ok(times[times.len() / 2])
}

pub fn bench(mut cfg: RunConfig, repeats: usize) -> Result<i32, Failure> {
    if repeats == 0 {
        return Err(Failure::usage("--repeats must be >= 1"));
    }
    let mut solver = resolved_solver(&mut cfg)?;
    cfg.validate()?;
    let grid = solver.grid()?;
    let u: SpectralVectorField = make_profile(
        grid,
        &ProfileSpec::RandomDivfree {
            amplitude: 1.0,
            slope: 1.0,
            seed: cfg.verify.seed,
            band: [1.0, grid.dealias_cutoff() as f64],
        },
    )?;
    let part = DyadicPartition::new(grid, Cutoff::Smooth);
    let mut out = Outputs::create(&cfg)?;
    let mut timings = serde_json::Map::new();
    let mut record = |name: &str, ms: f64| {
        timings.insert(name.to_string(), json!(ms));
    };
    record(
        "fft_round_trip",
        median_ms(repeats, || {
            to_spectral(&to_physical(&u))?;
            Ok(())
        })?,
    );
    record(
        "nonlinearity",
        median_ms(repeats, || {
            nonlinearity(&u)?;
            Ok(())
        })?,
    );
    record(
        "besov_norm",
        median_ms(repeats, || {
            besov_norm(&u, -1.0, &part)?;
            Ok(())
        })?,
    );
    record(
        "bony_split",
        median_ms(repeats, || {
            bony_split(&u, &u, &part)?;
            Ok(())
        })?,
    );
    record(
        "heat_sup",
        median_ms(repeats, || {
            heat_sup(&u, 1.0, 1.0)?;
            Ok(())
        })?,
    );
    let small = u.scaled(1e-3);
    solver.horizon = 0.01;
    solver.picard.node_count = 8;
    solver.etdrk4.dt = Some(1e-3);
    record(
        "etdrk4_10_steps",
        median_ms(repeats, || {
            etdrk4_integrate(&small, &solver)?;
            Ok(())
        })?,
    );
    record(
        "picard_8_intervals",
        median_ms(repeats, || {
            picard_solve(&small, &solver)?;
            Ok(())
        })?,
    );
    let body = json!({
        "dim": grid.dim(),
        "res": grid.res(),
        "repeats": repeats,
        "median_ms": timings,
    });
    emit(&format!(
        "{}\n",
        serde_json::to_string_pretty(&body).expect("json")
    ));
    out.write_json(BENCH_FILE, body)?;
    Ok(EXIT_OK)
}
