use serde::Serialize;

use super::kato::kato_smallness;
use super::{
    etdrk4_integrate, make_profile, picard_solve, picard_solve_on, PicardRun, ProfileSpec,
    SolverConfig, Trajectory,
};
use crate::error::{Error, Result};
use crate::semigroup::TimeGrid;
use crate::spectral::{to_physical, SpectralVectorField};

#[derive(Clone, Debug)]
pub struct CrossValidation {
    /// `sup_t ‖u_picard - u_etdrk4‖_∞ / max(1, ‖u_etdrk4‖_∞)` over shared nodes.
    pub discrepancy: f64,
    pub shared_nodes: usize,
    pub tolerance: f64,
    pub pass: bool,
    pub picard: PicardRun,
    pub etdrk4: Trajectory,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossValidationSummary {
    pub discrepancy: f64,
    pub shared_nodes: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl CrossValidation {
    pub fn summary(&self) -> CrossValidationSummary {
        CrossValidationSummary {
            discrepancy: self.discrepancy,
            shared_nodes: self.shared_nodes,
            tolerance: self.tolerance,
            pass: self.pass,
        }
    }
}

/// Largest `‖a(t) - b(t)‖_∞ / max(1, ‖b(t)‖_∞)` over times present in both,
/// with the number of such times.
pub fn trajectory_discrepancy(a: &Trajectory, b: &Trajectory) -> Result<(f64, usize)> {
    Error::check_grid(a.grid(), b.grid())?;
    let mut worst = 0.0f64;
    let mut shared = 0;
    for (i, &t) in a.times().iter().enumerate() {
        if let Some(j) = b.find(t) {
            let reference = to_physical(&b.states()[j]).max_magnitude();
            let diff = to_physical(&(&a.states()[i] - &b.states()[j])).max_magnitude();
            worst = worst.max(diff / reference.max(1.0));
            shared += 1;
        }
    }
    Ok((worst, shared))
}

/// Solve with both methods and compare on their shared nodes.
pub fn cross_validate(u0: &SpectralVectorField, cfg: &SolverConfig) -> Result<CrossValidation> {
    let picard = picard_solve(u0, cfg)?;
    let etdrk4 = etdrk4_integrate(u0, cfg)?;
    let (discrepancy, shared_nodes) = trajectory_discrepancy(&picard.trajectory, &etdrk4)?;
    Ok(CrossValidation {
        discrepancy,
        shared_nodes,
        tolerance: cfg.cross_validate_tol,
        pass: discrepancy <= cfg.cross_validate_tol,
        picard,
        etdrk4,
    })
}

/// Restart Picard from state `node` of `run` on the remaining nodes and
/// return the relative sup-error `sup_m ‖r(t_m) - u(t₀ + t_m)‖_∞ / sup_m ‖u(t₀ + t_m)‖_∞`.
pub fn restart_discrepancy(run: &Trajectory, node: usize, cfg: &SolverConfig) -> Result<f64> {
    if node + 1 >= run.len() {
        return Err(Error::OutOfRange {
            what: "restart node",
            index: node as i64,
            lo: 0,
            hi: run.len() as i64 - 2,
        });
    }
    let t0 = run.times()[node];
    let shifted = TimeGrid::from_nodes(run.times()[node..].iter().map(|t| t - t0).collect())?;
    let restarted = picard_solve_on(&run.states()[node], &shifted, cfg)?;
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (r, u) in restarted
        .trajectory
        .states()
        .iter()
        .zip(&run.states()[node..])
    {
        num = num.max(to_physical(&(r - u)).max_magnitude());
        den = den.max(to_physical(u).max_magnitude());
    }
    Ok(if den > 0.0 { num / den } else { num })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeSample {
    pub amplitude: f64,
    pub kato_smallness: f64,
    pub converged: bool,
    pub iterations: usize,
    pub contraction_ratio: f64,
    /// `kato_smallness ≤ epsilon_n_probe` when a candidate is configured.
    pub predicted_convergent: Option<bool>,
}

/// Amplitude sweep locating where Picard contraction is lost.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonProbe {
    pub profile: ProfileSpec,
    /// Sorted by amplitude.
    pub samples: Vec<ProbeSample>,
    /// Converged samples all lie below non-converged ones.
    pub monotone: bool,
    /// Largest converged and smallest non-converged amplitude.
    pub boundary: Option<[f64; 2]>,
    /// Smallness functional at those two amplitudes.
    pub kato_at_boundary: Option<[f64; 2]>,
    pub candidate: Option<f64>,
    /// Samples where the candidate threshold mispredicted convergence.
    pub prediction_errors: usize,
}

fn probe_sample(profile: &ProfileSpec, amplitude: f64, cfg: &SolverConfig) -> Result<ProbeSample> {
    let u0 = make_profile(cfg.grid()?, &profile.with_amplitude(amplitude))?;
    let kato = kato_smallness(&u0, cfg.horizon, cfg.nu)?.value;
    let report = match picard_solve(&u0, cfg) {
        Ok(run) => run.report,
        Err(Error::NonConvergence(run)) => run.report,
        Err(e) => return Err(e),
    };
    Ok(ProbeSample {
        amplitude,
        kato_smallness: kato,
        converged: report.converged,
        iterations: report.iterations,
        contraction_ratio: report.contraction_ratio,
        predicted_convergent: cfg.epsilon_n_probe.map(|eps| kato <= eps),
    })
}

fn bracket(samples: &[ProbeSample]) -> Option<(usize, usize)> {
    let lo = samples.iter().rposition(|s| s.converged)?;
    let hi = samples.iter().position(|s| !s.converged)?;
    Some((lo, hi))
}

/// Evaluate `amplitudes`, then bisect the bracket between the largest
/// converging and smallest diverging amplitude `bisections` times.
pub fn epsilon_n_probe(
    profile: &ProfileSpec,
    cfg: &SolverConfig,
    amplitudes: &[f64],
    bisections: usize,
) -> Result<EpsilonProbe> {
    cfg.validate()?;
    if amplitudes.is_empty() || amplitudes.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
        return Err(Error::InvalidArgument(
            "amplitudes must be finite and >= 0".into(),
        ));
    }
    let mut samples = amplitudes
        .iter()
        .map(|&a| probe_sample(profile, a, cfg))
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by(|a, b| a.amplitude.total_cmp(&b.amplitude));
    for _ in 0..bisections {
        let Some((lo, hi)) = bracket(&samples) else {
            break;
        };
        if lo > hi {
            break;
        }
        let mid = 0.5 * (samples[lo].amplitude + samples[hi].amplitude);
        let s = probe_sample(profile, mid, cfg)?;
        samples.insert(hi, s);
    }
    let monotone = samples
        .windows(2)
        .all(|w| w[0].converged || !w[1].converged);
    let br = bracket(&samples).filter(|(lo, hi)| lo < hi);
    Ok(EpsilonProbe {
        profile: profile.clone(),
        boundary: br.map(|(lo, hi)| [samples[lo].amplitude, samples[hi].amplitude]),
        kato_at_boundary: br
            .map(|(lo, hi)| [samples[lo].kato_smallness, samples[hi].kato_smallness]),
        candidate: cfg.epsilon_n_probe,
        prediction_errors: samples
            .iter()
            .filter(|s| s.predicted_convergent.is_some_and(|p| p != s.converged))
            .count(),
        monotone,
        samples,
    })
}
