//! The heat semigroup from `Lⁿ` into the Kato space.

use num_complex::Complex64;
use serde_json::json;

use super::random::{besov_shaped, bump, bump_width, stream};
use super::{spread, HeatParams, ReportBuilder, VerificationReport};
use crate::error::{Error, Result};
use crate::semigroup::heat;
use crate::solver::heat_sup;
use crate::spectral::{lp_norm, to_physical, Field, Grid, ScalarField, SpectralVectorField};

const CHECK_ID: u64 = 4;

/// Lattice vector with `|k|² = lambda`, if any fits inside the 2/3 rule.
fn mode_with_norm(grid: Grid, lambda: u32) -> Option<[i64; 2]> {
    let cut = grid.dealias_cutoff();
    (0..=cut)
        .flat_map(|a| (0..=a).map(move |b| [a, b]))
        .find(|k| (k[0] * k[0] + k[1] * k[1]) as u32 == lambda)
}

/// Measured `sup_{0<t≤1} √t ‖e^{tΔ} cos(k·x)‖_∞` with `|k|² = lambda`,
/// and its closed form `1/√(2eλ)` (valid for `λ >= 1/2`).
pub fn single_mode_heat_sup(grid: Grid, lambda: u32) -> Result<(f64, f64)> {
    if grid.dim() != 2 {
        return Err(Error::InvalidArgument(
            "single-mode check runs in two dimensions".into(),
        ));
    }
    let k = mode_with_norm(grid, lambda)
        .ok_or_else(|| Error::InvalidArgument(format!("no resolved mode with |k|² = {lambda}")))?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    coeffs[grid.index_of(&k)] = Complex64::new(0.5, 0.0);
    coeffs[grid.index_of(&[-k[0], -k[1]])] = Complex64::new(0.5, 0.0);
    let f = ScalarField::from_coeffs(grid, coeffs)?;
    let measured = heat_sup(&f, 1.0, 1.0)?.value;
    let closed = 1.0 / (2.0 * std::f64::consts::E * lambda as f64).sqrt();
    Ok((measured, closed))
}

struct FieldStats {
    kato_ratio: f64,
    /// `‖e^{sΔ}f‖_∞ / ‖f‖_∞` at the small time.
    contraction: f64,
    /// `√(s/2)‖e^{(s/2)Δ}f‖_∞ / √s‖e^{sΔ}f‖_∞`.
    halving: f64,
}

fn field_stats(f: &SpectralVectorField, s: f64) -> Result<FieldStats> {
    let n = f.grid().dim() as f64;
    let ln = lp_norm(f, n)?;
    if !(ln >= 1e-6) {
        return Err(Error::InvalidArgument(
            "heat check: vanishing random field".into(),
        ));
    }
    let sup = heat_sup(f, 1.0, 1.0)?.value;
    let f_inf = to_physical(f).max_magnitude();
    let at =
        |t: f64| -> Result<f64> { Ok(t.sqrt() * to_physical(&heat(f, t, 1.0)?).max_magnitude()) };
    let v = at(s)?;
    Ok(FieldStats {
        kato_ratio: sup / ln,
        contraction: v / (s.sqrt() * f_inf),
        halving: at(0.5 * s)? / v,
    })
}

pub fn verify_heat_ln_linf(params: &HeatParams, seed: u64) -> Result<VerificationReport> {
    params.validate()?;
    let mut b = ReportBuilder::new(
        "heat_ln_linf",
        json!({
            "trials": params.trials,
            "res_list": params.res_list,
            "dim": 2,
            "modes": params.modes,
            "closed_form_tol": params.closed_form_tol,
            "s_small": params.s_small,
            "seed": seed,
        }),
    );
    let mut per_res = Vec::new();
    let mut contraction = 0.0f64;
    let mut halving = 0.0f64;
    let mut trials = 0;
    for (ni, &res) in params.res_list.iter().enumerate() {
        let grid = Grid::new(2, res)?;
        let kmax = grid.dealias_cutoff() as f64;
        let mut best = 0.0f64;
        for trial in 0..params.trials {
            let mut rng = stream(seed, CHECK_ID, (ni * params.trials + trial) as u64);
            let shaped: SpectralVectorField = besov_shaped(grid, &mut rng, -1.0, kmax, true);
            let w = bump_width(grid, &mut rng);
            let bumped: SpectralVectorField = bump(grid, &mut rng, w);
            for f in [shaped, bumped] {
                let st = field_stats(&f, params.s_small)?;
                best = best.max(st.kato_ratio);
                contraction = contraction.max(st.contraction);
                halving = halving.max(st.halving);
                trials += 1;
            }
        }
        per_res.push(best);
    }
    let mut mode_err = 0.0f64;
    let grid = Grid::new(2, *params.res_list.iter().max().expect("validated"))?;
    let mut mode_rows = Vec::new();
    for &lambda in &params.modes {
        let (m, c) = single_mode_heat_sup(grid, lambda)?;
        mode_err = mode_err.max((m - c).abs() / c);
        mode_rows.push((format!("single_mode(lambda={lambda})"), m));
    }
    let growth = spread(&per_res);
    b.trials(trials);
    b.constant("c_max", per_res.iter().copied().fold(0.0, f64::max));
    for (res, c) in params.res_list.iter().zip(&per_res) {
        b.constant(format!("c(N={res})"), *c);
    }
    b.constant("c_spread", growth);
    b.constant("single_mode_rel_error", mode_err);
    for (name, v) in mode_rows {
        b.constant(name, v);
    }
    b.constant("small_time_contraction", contraction);
    b.constant("halving_ratio_max", halving);
    let pass = growth <= params.growth_limit
        && mode_err <= params.closed_form_tol
        && contraction <= 1.0 + SUP_SLACK
        && halving < 1.0;
    Ok(b.finish(pass))
}

/// Relative slack on `‖e^{sΔ}f‖_∞ ≤ ‖f‖_∞` for grid-sampled maxima.
const SUP_SLACK: f64 = 1e-3;
