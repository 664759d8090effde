//! The short-time bound behind the regularity argument: splitting
//! `w ⊗ w = (w - ω) ⊗ w + ω ⊗ w` with the Bony paraproducts and bounding the
//! Duhamel image in `B^{s+1,∞}_∞` by `C(ε + ‖ω‖_∞√δ) sup‖w‖`.

use serde::Serialize;
use serde_json::json;

use super::{spread, ReportBuilder, Step3Params, VerificationReport};
use crate::error::Result;
use crate::littlewood_paley::{besov_distance, besov_norm, Cutoff, DyadicPartition};
use crate::paraproduct::bony_split;
use crate::semigroup::{duhamel_L, heat, projected_divergence};
use crate::solver::{make_profile, picard_solve, ProfileSpec, SolverConfig, Trajectory};
use crate::spectral::{to_physical, Field, Grid, SpectralVectorField};

/// Reconstruction residual above which the decomposition is reported broken.
const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Step3Profile {
    /// Taylor–Green data with `ω = 0`.
    TaylorGreen,
    /// Random small divergence-free data with `ω = w(0)`.
    RandomSmall,
}

impl Step3Profile {
    pub const ALL: [Step3Profile; 2] = [Step3Profile::TaylorGreen, Step3Profile::RandomSmall];

    fn name(self) -> &'static str {
        match self {
            Step3Profile::TaylorGreen => "taylor_green",
            Step3Profile::RandomSmall => "random_small",
        }
    }
}

/// Ingredients of both sides of the bound along one trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Step3Terms {
    /// `sup_t ‖w(t) - ω‖_{B^{-1}}`.
    pub epsilon: f64,
    pub omega_sup: f64,
    pub delta: f64,
    pub w0_norm: f64,
    pub sup_w: f64,
    /// `sup_t ‖D(t)‖_{B^{s+1}}` of the whole Duhamel term and of its two parts.
    pub sup_d: f64,
    pub sup_d_epsilon: f64,
    pub sup_d_omega: f64,
    /// `sup_t ‖D(t) - (w(t) - e^{tΔ}w₀)‖_∞`.
    pub residual: f64,
    /// Smallest `C` with `sup‖D‖ ≤ C(ε + ‖ω‖_∞√δ) sup‖w‖`.
    pub constant: f64,
    pub constant_epsilon: f64,
    pub constant_omega: f64,
    /// `‖w₀‖ + sup‖D‖ - sup‖w‖`, nonnegative when the bound closes.
    pub slack: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Split the nonlinearity of a mild trajectory `w` around the profile `ω`.
pub fn step3_terms(w: &Trajectory, omega: &SpectralVectorField, s: f64) -> Result<Step3Terms> {
    let grid = w.grid();
    let part = DyadicPartition::new(grid, Cutoff::Smooth);
    let times = w.time_grid()?;
    let nu = w.meta().nu;
    let mut f_eps = Vec::with_capacity(w.len());
    let mut f_om = Vec::with_capacity(w.len());
    let mut epsilon = 0.0f64;
    let mut sup_w = 0.0f64;
    for u in w.states() {
        let h = u - omega;
        epsilon = epsilon.max(besov_distance(u, omega, -1.0, &part)?);
        sup_w = sup_w.max(besov_norm(u, s + 1.0, &part)?);
        let (a1, b1) = bony_split(&h, u, &part)?;
        let (a2, b2) = bony_split(omega, u, &part)?;
        f_eps.push(projected_divergence(&(&a1 + &b1), 0.0));
        f_om.push(projected_divergence(&(&a2 + &b2), 0.0));
    }
    let d_eps = duhamel_L(&f_eps, &times, nu)?;
    let d_om = duhamel_L(&f_om, &times, nu)?;
    let w0 = &w.states()[0];
    let mut sup_d = 0.0f64;
    let mut sup_d_eps = 0.0f64;
    let mut sup_d_om = 0.0f64;
    let mut residual = 0.0f64;
    for (m, (&t, u)) in w.times().iter().zip(w.states()).enumerate() {
        let d = &d_eps[m] + &d_om[m];
        sup_d = sup_d.max(besov_norm(&d, s + 1.0, &part)?);
        sup_d_eps = sup_d_eps.max(besov_norm(&d_eps[m], s + 1.0, &part)?);
        sup_d_om = sup_d_om.max(besov_norm(&d_om[m], s + 1.0, &part)?);
        let free = heat(w0, t - w.times()[0], nu)?;
        let gap = &(u - &free) - &d;
        residual = residual.max(to_physical(&gap).max_magnitude());
    }
    let omega_sup = to_physical(omega).max_magnitude();
    let delta = times.end() - times.nodes()[0];
    let w0_norm = besov_norm(w0, s + 1.0, &part)?;
    let scale = omega_sup * delta.sqrt();
    Ok(Step3Terms {
        epsilon,
        omega_sup,
        delta,
        w0_norm,
        sup_w,
        sup_d,
        sup_d_epsilon: sup_d_eps,
        sup_d_omega: sup_d_om,
        residual,
        constant: ratio(sup_d, (epsilon + scale) * sup_w),
        constant_epsilon: ratio(sup_d_eps, epsilon * sup_w),
        constant_omega: ratio(sup_d_om, scale * sup_w),
        slack: w0_norm + sup_d - sup_w,
    })
}

fn profile_run(
    profile: Step3Profile,
    res: usize,
    params: &Step3Params,
    seed: u64,
) -> Result<Step3Terms> {
    let grid = Grid::new(2, res)?;
    let spec = match profile {
        Step3Profile::TaylorGreen => ProfileSpec::TaylorGreen2d { amplitude: 1.0 },
        Step3Profile::RandomSmall => ProfileSpec::RandomDivfree {
            amplitude: params.amplitude,
            slope: 1.0,
            seed,
            band: [1.0, 3.0],
        },
    };
    let u0 = make_profile(grid, &spec)?;
    let mut cfg = SolverConfig::new(grid, params.delta);
    cfg.picard.node_count = params.node_count;
    let run = picard_solve(&u0, &cfg)?;
    let omega = match profile {
        Step3Profile::TaylorGreen => SpectralVectorField::zeros(grid),
        Step3Profile::RandomSmall => u0,
    };
    step3_terms(&run.trajectory, &omega, params.s)
}

pub fn verify_step3_bound(params: &Step3Params, seed: u64) -> Result<VerificationReport> {
    params.validate()?;
    let mut b = ReportBuilder::new(
        "step3_bound",
        json!({
            "s": params.s,
            "delta": params.delta,
            "res_list": params.res_list,
            "dim": 2,
            "node_count": params.node_count,
            "amplitude": params.amplitude,
            "profiles": Step3Profile::ALL,
            "cutoff": "smooth",
            "seed": seed,
        }),
    );
    b.trials(Step3Profile::ALL.len() * params.res_list.len());
    let mut rows = Vec::new();
    let mut pass = true;
    let mut c_max = 0.0f64;
    for profile in Step3Profile::ALL {
        let mut cs = Vec::new();
        for &res in &params.res_list {
            let t = profile_run(profile, res, params, seed)?;
            let tag = format!("{},N={res}", profile.name());
            rows.push((format!("C({tag})"), t.constant));
            rows.push((format!("C_epsilon({tag})"), t.constant_epsilon));
            rows.push((format!("C_omega({tag})"), t.constant_omega));
            rows.push((format!("epsilon({tag})"), t.epsilon));
            rows.push((format!("slack({tag})"), t.slack));
            rows.push((format!("residual({tag})"), t.residual));
            pass &= t.residual <= RESIDUAL_TOL;
            cs.push(t.constant);
        }
        let vanishing = cs.iter().all(|&c| c < params.zero_floor);
        pass &= vanishing || spread(&cs) <= params.growth_limit;
        c_max = c_max.max(cs.iter().copied().fold(0.0, f64::max));
    }
    b.constant("C_max", c_max);
    for (name, v) in rows {
        b.constant(name, v);
    }
    Ok(b.finish(pass))
}
