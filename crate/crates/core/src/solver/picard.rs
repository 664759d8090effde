use std::time::Instant;

use serde::Serialize;

use super::kato::{kato_smallness, KatoValue};
use super::{Method, SolverConfig, Trajectory, TrajectoryMeta};
use crate::error::{Error, Result};
use crate::semigroup::{duhamel_L, heat, quadratic_term, TimeGrid, DIVERGENCE_TOL};
use crate::spectral::{lp_norm_physical, to_physical, Field, SpectralVectorField};

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub iteration_seconds: Vec<f64>,
}

/// Iteration history of a Picard solve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub iterations: usize,
    /// Kato-norm distance between consecutive iterates.
    pub increments: Vec<f64>,
    /// `increments[m + 1] / increments[m]`.
    pub ratios: Vec<f64>,
    /// Largest observed ratio (0 when fewer than two increments exist).
    pub contraction_ratio: f64,
    pub kato_smallness: KatoValue,
    pub nodes: usize,
    pub timings: Timings,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug)]
pub struct PicardRun {
    pub trajectory: Trajectory,
    pub report: ConvergenceReport,
}

/// Picard iteration for `u = e^{νtΔ}u0 + 𝕃(ℙ∇·(u⊗u))` on the configured nodes.
pub fn picard_solve(u0: &SpectralVectorField, cfg: &SolverConfig) -> Result<PicardRun> {
    cfg.validate()?;
    picard_solve_on(u0, &cfg.time_grid()?, cfg)
}

/// [`picard_solve`] on explicit nodes; `cfg.picard.node_count` and
/// `cfg.horizon` are ignored.
pub fn picard_solve_on(
    u0: &SpectralVectorField,
    times: &TimeGrid,
    cfg: &SolverConfig,
) -> Result<PicardRun> {
    Error::check_grid(cfg.grid()?, u0.grid())?;
    let defect = u0.divergence_defect();
    if !(defect <= DIVERGENCE_TOL) {
        return Err(Error::NotDivergenceFree(defect));
    }
    let start = Instant::now();
    let nu = cfg.nu;
    let nodes = times.nodes();
    let kato = kato_smallness(u0, times.end(), nu)?;
    let free: Vec<SpectralVectorField> = nodes
        .iter()
        .map(|&t| heat(u0, t, nu))
        .collect::<Result<_>>()?;
    let mut current = free.clone();
    let mut report = ConvergenceReport {
        converged: false,
        iterations: 0,
        increments: Vec::new(),
        ratios: Vec::new(),
        contraction_ratio: 0.0,
        kato_smallness: kato,
        nodes: nodes.len(),
        timings: Timings::default(),
    };
    for it in 1..=cfg.picard.max_iters {
        let iter_start = Instant::now();
        let forcing: Vec<SpectralVectorField> = current
            .iter()
            .map(|u| quadratic_term(u, cfg.dealias))
            .collect();
        let mut next = duhamel_L(&forcing, times, nu)?;
        drop(forcing);
        let mut sup_inf = 0.0f64;
        let mut sup_n = 0.0f64;
        for (m, l) in next.iter_mut().enumerate() {
            *l = &free[m] + &*l;
            let p = to_physical(&(&*l - &current[m]));
            sup_inf = sup_inf.max(nodes[m].sqrt() * p.max_magnitude());
            sup_n = sup_n.max(lp_norm_physical(&p, u0.grid().dim() as f64)?);
        }
        let inc = sup_inf + sup_n;
        current = next;
        report.iterations = it;
        if let Some(&prev) = report.increments.last() {
            let ratio = if prev > 0.0 { inc / prev } else { 0.0 };
            report.ratios.push(ratio);
            report.contraction_ratio = report.contraction_ratio.max(ratio);
        }
        report.increments.push(inc);
        report
            .timings
            .iteration_seconds
            .push(iter_start.elapsed().as_secs_f64());
        if inc < cfg.picard.contraction_tol {
            report.converged = true;
            break;
        }
        let diverging = !inc.is_finite() || report.ratios.last().is_some_and(|&r| r >= 1.0);
        if diverging {
            break;
        }
    }
    report.timings.total_seconds = start.elapsed().as_secs_f64();
    let mut meta = TrajectoryMeta::new(Method::Picard, nu);
    meta.history = report.increments.clone();
    let trajectory = Trajectory::new(nodes.to_vec(), current, meta)?;
    let run = PicardRun { trajectory, report };
    if run.report.converged {
        Ok(run)
    } else {
        Err(Error::NonConvergence(Box::new(run)))
    }
}
