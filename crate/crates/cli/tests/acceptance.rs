//! Acceptance gate: one pass/fail line per criterion.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use cnlab::littlewood_paley::Cutoff;
use cnlab::monitor::{
    bv_variation, giga_rate_fit, monitor, read_csv, KatoHorizon, MonitorOptions, MonitorRecord,
};
use cnlab::semigroup::heat;
use cnlab::solver::{
    cross_validate, epsilon_n_probe, etdrk4_integrate, kato_smallness, make_profile, picard_solve,
    restart_discrepancy, Method, ProfileSpec, SolverConfig, Trajectory, TrajectoryMeta,
};
use cnlab::spectral::{spectral_energy, to_physical, Field, Grid, SpectralVectorField};
use num_complex::Complex64;
use serde_json::Value;

const BONY_TOL: f64 = 1e-12;
const BONY_TRIALS: usize = 200;
const BONY_SECONDS: f64 = 60.0;
const SMOOTHING_TOL: f64 = 0.15;
const SMOOTHING_SECONDS: f64 = 300.0;
const OSEEN_SLOPE: [f64; 2] = [-0.65, -0.35];
const OSEEN_SECONDS: f64 = 300.0;
const STABILITY_FACTOR: f64 = 2.0;
const HEAT_CLOSED_FORM_TOL: f64 = 0.01;
const PARAPRODUCT_TRIALS: usize = 50;
const PICARD_EXACT_TOL: f64 = 1e-6;
const ETDRK4_EXACT_TOL: f64 = 1e-8;
const CROSS_TOL: f64 = 1e-6;
const TG_SECONDS: f64 = 120.0;
const KATO_SMALL: f64 = 0.05;
const KATO_TARGET: f64 = 0.04;
const CONTRACTION_LIMIT: f64 = 0.5;
const ITERATION_LIMIT: usize = 12;
const RESTART_TOL: f64 = 1e-3;
const GIGA_TOL: f64 = 1e-6;
const BV_TOL: f64 = 1e-12;
const DECAY_TOL: f64 = 1e-6;
const ENERGY_SLACK: f64 = 1e-6;
const COHERENCE_SLACK: f64 = 1e-12;

struct Gate {
    results: Vec<(usize, bool, String)>,
}

impl Gate {
    fn record(&mut self, id: usize, name: &str, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        self.results
            .push((id, pass, format!("[{tag}] {id:02} {name}: {detail}")));
    }
}

fn cli(args: &[&str], out: &Path) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_cnlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .stdout(std::process::Stdio::null())
        .status()
        .expect("cnlab runs");
    status.code().unwrap_or(-1)
}

fn number(v: &Value) -> f64 {
    match v {
        Value::Number(n) => n.as_f64().unwrap_or(f64::NAN),
        Value::String(s) => s.parse().unwrap_or(f64::NAN),
        _ => f64::NAN,
    }
}

struct Report(Value);

impl Report {
    fn load(dir: &Path, check: &str) -> Option<Self> {
        let text = fs::read_to_string(dir.join("reports").join(format!("{check}.json"))).ok()?;
        let body: Value = serde_json::from_str(&text).ok()?;
        Some(Self(body["report"].clone()))
    }

    fn constant(&self, name: &str) -> f64 {
        self.0["constants"]
            .as_array()
            .and_then(|cs| cs.iter().find(|c| c["name"] == name))
            .map_or(f64::NAN, |c| number(&c["value"]))
    }

    fn exponent(&self, name: &str) -> f64 {
        self.0["exponents"]
            .as_array()
            .and_then(|es| es.iter().find(|e| e["name"] == name))
            .map_or(f64::NAN, |e| number(&e["value"]))
    }

    fn trials(&self) -> usize {
        self.0["trials"].as_u64().unwrap_or(0) as usize
    }

    fn seconds(&self) -> f64 {
        number(&self.0["elapsed_seconds"])
    }
}

fn sup_error(traj: &Trajectory, exact: impl Fn(f64) -> SpectralVectorField) -> f64 {
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (&t, u) in traj.times().iter().zip(traj.states()) {
        let e = exact(t);
        worst = worst.max(to_physical(&(u - &e)).max_magnitude());
        scale = scale.max(to_physical(&e).max_magnitude());
    }
    worst / scale
}

fn energy_monotone(traj: &Trajectory) -> (bool, f64) {
    let norms: Vec<f64> = traj
        .states()
        .iter()
        .map(|u| spectral_energy(u).sqrt())
        .collect();
    let mut worst = 0.0f64;
    for w in norms.windows(2) {
        worst = worst.max((w[1] - w[0]) / w[0].max(f64::MIN_POSITIVE));
    }
    (worst <= ENERGY_SLACK, worst)
}

/// Largest `besov_m1 / (K_emb ‖u‖_n)` over the records.
fn coherence(records: &[MonitorRecord], dim: usize, k_emb: f64) -> f64 {
    records
        .iter()
        .map(|r| {
            let ln = r.lp(dim as f64).expect("L^n column");
            if ln > 0.0 {
                r.besov_m1 / (k_emb * ln)
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

fn smooth_options() -> MonitorOptions {
    MonitorOptions {
        p_list: Vec::new(),
        kato_horizon: KatoHorizon::Off,
        cutoff: Cutoff::Smooth,
    }
}

fn random_small_profile(cfg: &SolverConfig) -> (ProfileSpec, f64) {
    let base = ProfileSpec::RandomDivfree {
        amplitude: 1.0,
        slope: 1.0,
        seed: 7,
        band: [1.0, 4.0],
    };
    let grid = cfg.grid().unwrap();
    let kato = |a: f64| {
        let u0 = make_profile(grid, &base.with_amplitude(a)).unwrap();
        kato_smallness(&u0, cfg.horizon, cfg.nu).unwrap().value
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while kato(hi) < KATO_TARGET {
        hi *= 2.0;
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if kato(mid) <= KATO_TARGET {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (base.with_amplitude(lo), kato(lo))
}

fn main() {
    let mut gate = Gate {
        results: Vec::new(),
    };
    let work = tempfile::tempdir().unwrap();
    let run_a = work.path().join("verify_a");
    let run_b = work.path().join("verify_b");
    let t = Instant::now();
    let code_a = cli(&["verify", "--all", "--seed", "7"], &run_a);
    let verify_seconds = t.elapsed().as_secs_f64();
    let code_b = cli(&["verify", "--all", "--seed", "7"], &run_b);
    println!("verify --all: exit codes {code_a} and {code_b}, {verify_seconds:.1} s per run");
    let load = |check: &str| Report::load(&run_a, check);

    // 1
    match load("bony_identity") {
        Some(r) => {
            let err = r.constant("max_error");
            let pass = err <= BONY_TOL && r.trials() >= BONY_TRIALS && r.seconds() < BONY_SECONDS;
            gate.record(
                1,
                "bony_reconstruction",
                pass,
                format!(
                    "max error {err:.3e}, {} pairs, {:.1} s",
                    r.trials(),
                    r.seconds()
                ),
            );
        }
        None => gate.record(1, "bony_reconstruction", false, "report missing".into()),
    }

    // 2
    {
        let mut pass = true;
        let mut parts = Vec::new();
        let mut seconds = 0.0f64;
        for r in [-1, 0] {
            for (alpha, expected) in [(1, 0.5), (2, 0.0)] {
                match load(&format!("smoothing_r{r}_alpha{alpha}")) {
                    Some(rep) => {
                        let e = rep.exponent("T_exponent");
                        pass &= (e - expected).abs() <= SMOOTHING_TOL;
                        seconds = seconds.max(rep.seconds());
                        parts.push(format!("r={r} a={alpha} slope {e:.3}"));
                    }
                    None => {
                        pass = false;
                        parts.push(format!("r={r} a={alpha} missing"));
                    }
                }
            }
        }
        pass &= seconds < SMOOTHING_SECONDS;
        gate.record(
            2,
            "duhamel_smoothing_scaling",
            pass,
            format!("{}, {seconds:.1} s", parts.join("; ")),
        );
    }

    // 3
    match load("oseen_kernel") {
        Some(r) => {
            let slope = r.exponent("small_t_slope");
            let spread = r.constant("C_spread");
            let pass = slope >= OSEEN_SLOPE[0]
                && slope <= OSEEN_SLOPE[1]
                && spread <= STABILITY_FACTOR
                && r.seconds() < OSEEN_SECONDS;
            gate.record(
                3,
                "oseen_kernel",
                pass,
                format!(
                    "slope {slope:.3}, compensated spread {spread:.3}, {:.1} s",
                    r.seconds()
                ),
            );
        }
        None => gate.record(3, "oseen_kernel", false, "report missing".into()),
    }

    // 4
    match load("heat_ln_linf") {
        Some(r) => {
            let mode = r.constant("single_mode_rel_error");
            let spread = r.constant("c_spread");
            let pass = mode <= HEAT_CLOSED_FORM_TOL && spread <= STABILITY_FACTOR;
            gate.record(
                4,
                "heat_ln_linf",
                pass,
                format!("closed-form rel error {mode:.2e}, constant spread {spread:.3}"),
            );
        }
        None => gate.record(4, "heat_ln_linf", false, "report missing".into()),
    }

    // 5
    {
        let mut pass = true;
        let mut parts = Vec::new();
        for s in ["1.5", "2"] {
            match load(&format!("paraproduct_s{s}")) {
                Some(r) => {
                    let g = r.constant("growth_max");
                    pass &= g <= STABILITY_FACTOR && r.trials() >= PARAPRODUCT_TRIALS;
                    parts.push(format!("s={s} growth {g:.3} over {} trials", r.trials()));
                }
                None => {
                    pass = false;
                    parts.push(format!("s={s} missing"));
                }
            }
        }
        gate.record(5, "paraproduct_bounds", pass, parts.join("; "));
    }

    let embedding = load("embedding");
    let k_emb = |dim: usize| {
        embedding
            .as_ref()
            .map_or(f64::NAN, |r| r.constant(&format!("K_emb(n={dim})")))
    };
    let mut coherent: Vec<(String, f64)> = Vec::new();
    let mut etd_runs: Vec<(String, Trajectory)> = Vec::new();

    // 7
    let tg_cfg = SolverConfig::new(Grid::new(2, 32).unwrap(), 1.0);
    let tg0 = make_profile(
        tg_cfg.grid().unwrap(),
        &ProfileSpec::TaylorGreen2d { amplitude: 1.0 },
    )
    .unwrap();
    let exact = |t: f64| heat(&tg0, t, 1.0).unwrap();
    let t = Instant::now();
    let tg_picard = picard_solve(&tg0, &tg_cfg).expect("Taylor-Green Picard converges");
    let picard_err = sup_error(&tg_picard.trajectory, exact);
    let mut etd_cfg = tg_cfg.clone();
    etd_cfg.etdrk4.dt = Some(1e-3);
    let tg_etd = etdrk4_integrate(&tg0, &etd_cfg).expect("Taylor-Green ETDRK4");
    let etd_err = sup_error(&tg_etd, exact);
    let cv = cross_validate(&tg0, &etd_cfg).expect("cross validation");
    let tg_seconds = t.elapsed().as_secs_f64();
    gate.record(
        7,
        "mild_solution_taylor_green",
        picard_err <= PICARD_EXACT_TOL
            && etd_err <= ETDRK4_EXACT_TOL
            && cv.discrepancy <= CROSS_TOL
            && tg_seconds < TG_SECONDS,
        format!(
            "Picard {picard_err:.2e}, ETDRK4 {etd_err:.2e}, cross {:.2e}, {tg_seconds:.1} s",
            cv.discrepancy
        ),
    );

    // 8
    let mut small_cfg = SolverConfig::new(Grid::new(3, 32).unwrap(), 0.5);
    small_cfg.picard.node_count = 32;
    let (small_spec, small_kato) = random_small_profile(&small_cfg);
    let small0 = make_profile(small_cfg.grid().unwrap(), &small_spec).unwrap();
    let small = picard_solve(&small0, &small_cfg);
    let mut probe_cfg = SolverConfig::new(Grid::new(3, 16).unwrap(), 0.5);
    probe_cfg.picard.node_count = 16;
    probe_cfg.picard.max_iters = 40;
    let probe = epsilon_n_probe(&small_spec, &probe_cfg, &[1.0, 4.0, 16.0, 64.0, 256.0], 4);
    let probe_text = match &probe {
        Ok(p) => format!(
            "probe monotone {} boundary {:?} kato {:?}",
            p.monotone, p.boundary, p.kato_at_boundary
        ),
        Err(e) => format!("probe failed: {e}"),
    };
    match &small {
        Ok(run) => {
            let r = &run.report;
            let pass = small_kato <= KATO_SMALL
                && r.converged
                && r.contraction_ratio < CONTRACTION_LIMIT
                && r.iterations <= ITERATION_LIMIT
                && probe.is_ok();
            gate.record(
                8,
                "kato_conditionality",
                pass,
                format!(
                    "kato {small_kato:.4}, ratio {:.3}, {} iterations; {probe_text}",
                    r.contraction_ratio, r.iterations
                ),
            );
        }
        Err(e) => gate.record(
            8,
            "kato_conditionality",
            false,
            format!("Picard failed: {e}; {probe_text}"),
        ),
    }

    // 9
    {
        let tg_mid = tg_picard.trajectory.len() / 2;
        let tg_restart =
            restart_discrepancy(&tg_picard.trajectory, tg_mid, &tg_cfg).unwrap_or(f64::INFINITY);
        let random_restart = match &small {
            Ok(run) => restart_discrepancy(&run.trajectory, run.trajectory.len() / 2, &small_cfg)
                .unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        };
        gate.record(
            9,
            "restart_coherence",
            tg_restart <= RESTART_TOL && random_restart <= RESTART_TOL,
            format!("Taylor-Green {tg_restart:.2e}, random {random_restart:.2e}"),
        );
    }

    // 10
    {
        let grid = Grid::new(2, 16).unwrap();
        let mut v = SpectralVectorField::zeros(grid);
        v.set_mode(0, &[4, 0], Complex64::new(0.5, 0.0));
        let coeffs = [0.0, 1.0, -0.5, 2.0];
        let states: Vec<SpectralVectorField> = coeffs.iter().map(|&c| &v * c).collect();
        let traj = Trajectory::new(
            vec![0.0, 0.1, 0.2, 0.3],
            states,
            TrajectoryMeta::new(Method::Snapshots, 1.0),
        )
        .unwrap();
        // cos 4x sits wholly in block 2 for both cutoffs, so each increment is |Δc|/4.
        let mut bv_err = 0.0f64;
        for cutoff in [Cutoff::Sharp, Cutoff::Smooth] {
            let bv = bv_variation(&traj, -1.0, cutoff, None).unwrap();
            bv_err = bv_err
                .max((bv.total - 1.25).abs())
                .max((bv.max_increment - 0.625).abs());
            if bv.argmax != 2 {
                bv_err = f64::INFINITY;
            }
        }
        let two = Trajectory::new(
            vec![0.0, 1.0],
            vec![&v * 0.0, v.clone()],
            TrajectoryMeta::new(Method::Snapshots, 1.0),
        )
        .unwrap();
        let two_state = bv_variation(&two, -1.0, Cutoff::Sharp, None).unwrap().total;
        bv_err = bv_err.max((two_state - 0.25).abs());

        let t_star = 1.0;
        let records: Vec<MonitorRecord> = (0..40)
            .map(|i| {
                let t = t_star * (1.0 - 0.8f64.powi(i + 1));
                MonitorRecord {
                    t,
                    lp_norms: vec![(f64::INFINITY, 3.0 * (t_star - t).powf(-0.5))],
                    besov_m1: 0.0,
                    besov_dist_omega: None,
                    kato_i: None,
                    energy: 0.0,
                }
            })
            .collect();
        let giga = giga_rate_fit(&records, f64::INFINITY, t_star).map_or(f64::NAN, |f| f.exponent);

        let tg_dir = work.path().join("tg");
        let code = cli(&["simulate", "--method", "etdrk4", "--dt", "1e-3"], &tg_dir);
        let decay_err = fs::File::open(tg_dir.join("monitor.csv"))
            .ok()
            .and_then(|f| read_csv(f, 2).ok())
            .map_or(f64::INFINITY, |rs| {
                let b0 = rs[0].besov_m1;
                let worst = rs
                    .iter()
                    .map(|r| (r.besov_m1 - b0 * (-2.0 * r.t).exp()).abs())
                    .fold(0.0, f64::max);
                worst / b0
            });
        gate.record(
            10,
            "monitor_mechanics",
            bv_err <= BV_TOL
                && (giga + 0.5).abs() <= GIGA_TOL
                && decay_err <= DECAY_TOL
                && code == 0,
            format!("bv error {bv_err:.2e}, rate {giga:.9}, besov_m1 decay error {decay_err:.2e}"),
        );
    }

    // 11
    {
        let a = fs::read(run_a.join("summary.csv")).unwrap_or_default();
        let b = fs::read(run_b.join("summary.csv")).unwrap_or_default();
        gate.record(
            11,
            "determinism",
            !a.is_empty() && a == b,
            format!("{} and {} bytes, identical {}", a.len(), b.len(), a == b),
        );
    }

    // 12
    etd_runs.push(("taylor_green_2d".into(), tg_etd));
    if let Ok(etd) = etdrk4_integrate(&small0, &small_cfg) {
        etd_runs.push(("random_3d".into(), etd));
    }
    {
        let mut pass = etd_runs.len() == 2;
        let mut parts = Vec::new();
        for (name, traj) in &etd_runs {
            let (ok, worst) = energy_monotone(traj);
            pass &= ok;
            parts.push(format!("{name} max relative rise {worst:.2e}"));
        }
        gate.record(12, "energy_monotonicity", pass, parts.join("; "));
    }

    // 6
    {
        let mut trajectories: Vec<(String, &Trajectory)> = vec![
            ("taylor_green_picard".into(), &tg_picard.trajectory),
            ("taylor_green_cross_etdrk4".into(), &cv.etdrk4),
        ];
        if let Ok(run) = &small {
            trajectories.push(("random_picard".into(), &run.trajectory));
        }
        for (name, traj) in &etd_runs {
            trajectories.push((format!("{name}_etdrk4"), traj));
        }
        for (name, traj) in trajectories {
            let dim = traj.grid().dim();
            let series = monitor(traj, &smooth_options(), None).unwrap();
            coherent.push((name, coherence(&series.records, dim, k_emb(dim))));
        }
        let spreads = [2, 3].map(|d| {
            embedding
                .as_ref()
                .map_or(f64::NAN, |r| r.constant(&format!("K_emb_spread(n={d})")))
        });
        let worst = coherent.iter().map(|c| c.1).fold(0.0, f64::max);
        let pass = spreads.iter().all(|&s| s <= STABILITY_FACTOR) && worst <= 1.0 + COHERENCE_SLACK;
        gate.record(
            6,
            "embedding",
            pass,
            format!(
                "K_emb {:.4} (n=2) {:.4} (n=3), spreads {:.3} {:.3}, worst coherence ratio {worst:.3} over {} trajectories",
                k_emb(2),
                k_emb(3),
                spreads[0],
                spreads[1],
                coherent.len()
            ),
        );
    }

    gate.results.sort_by_key(|r| r.0);
    for r in &gate.results {
        println!("{}", r.2);
    }
    let failed: Vec<usize> = gate.results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria pass",
        gate.results.len() - failed.len(),
        gate.results.len()
    );
    assert_eq!(gate.results.len(), 12);
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
