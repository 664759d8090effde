//! The `C/√t` bound on `e^{tΔ}ℙ∇·` acting on bounded tensors.

use num_complex::Complex64;
use serde_json::json;

use super::random::{besov_shaped, stream};
use super::{fit_exponent, spread, OseenParams, ReportBuilder, VerificationReport};
use crate::error::Result;
use crate::semigroup::oseen_apply;
use crate::spectral::{to_physical, Field, Grid, PhysicalField, TensorField};

const CHECK_ID: u64 = 5;

/// For each output component `a`, the unit tensor maximizing
/// `(e^{tΔ}ℙ∇·F)_a(0)`: `F(y) = K_a(-y) / |K_a(-y)|` with the Frobenius length.
fn extremal_tensors(grid: Grid, t: f64) -> Result<Vec<TensorField>> {
    let n = grid.dim();
    let tables = grid.tables();
    let unit = Complex64::new(1.0 / grid.len() as f64, 0.0);
    let zero = vec![Complex64::new(0.0, 0.0); grid.len()];
    // kernels[bc][a] sampled on the grid
    let mut kernels = Vec::with_capacity(n * n);
    for bc in 0..n * n {
        let mut comps = vec![zero.clone(); n * n];
        comps[bc] = vec![unit; grid.len()];
        let delta = TensorField::from_components(grid, comps)?;
        kernels.push(to_physical(&oseen_apply(&delta, t, 1.0)?).into_components());
    }
    (0..n)
        .map(|a| {
            let mut comps = vec![vec![0.0; grid.len()]; n * n];
            for idx in 0..grid.len() {
                let src = tables.neg[idx] as usize;
                let len = (0..n * n)
                    .map(|bc| kernels[bc][a][src].powi(2))
                    .sum::<f64>()
                    .sqrt();
                if len > 0.0 {
                    for (bc, c) in comps.iter_mut().enumerate() {
                        c[idx] = kernels[bc][a][src] / len;
                    }
                }
            }
            PhysicalField::new(grid, comps)?.to_field()
        })
        .collect()
}

/// Smooth random tensor with unit pointwise Frobenius sup.
fn random_unit_tensor(grid: Grid, seed: u64, family: u64) -> TensorField {
    let mut rng = stream(seed, CHECK_ID, family);
    let f: TensorField = besov_shaped(grid, &mut rng, 0.0, 4.0, false);
    let sup = to_physical(&f).max_magnitude();
    f.scaled(1.0 / sup)
}

/// `max_F ‖e^{tΔ}ℙ∇·F‖_∞` over the extremal and random tensors, per time.
fn sweep(grid: Grid, times: &[f64], randoms: &[TensorField]) -> Result<Vec<f64>> {
    times
        .iter()
        .map(|&t| {
            let mut best = 0.0f64;
            for f in extremal_tensors(grid, t)?.iter().chain(randoms) {
                best = best.max(to_physical(&oseen_apply(f, t, 1.0)?).max_magnitude());
            }
            Ok(best)
        })
        .collect()
}

pub fn verify_oseen_kernel(params: &OseenParams, seed: u64) -> Result<VerificationReport> {
    params.validate()?;
    let times = params.times();
    let mut b = ReportBuilder::new(
        "oseen_kernel",
        json!({
            "trials": params.trials,
            "res_list": params.res_list,
            "dim": 2,
            "t_range": [params.t_min, params.t_max],
            "per_decade": params.per_decade,
            "fit_t_max": params.fit_t_max,
            "resolution": params.resolution,
            "seed": seed,
        }),
    );
    b.trials(params.trials + 2);
    let mut compensated = Vec::new();
    let mut finest = Vec::new();
    for (ni, &res) in params.res_list.iter().enumerate() {
        let grid = Grid::new(2, res)?;
        let randoms: Vec<TensorField> = (0..params.trials)
            .map(|i| random_unit_tensor(grid, seed, (ni * params.trials + i) as u64))
            .collect();
        let values = sweep(grid, &times, &randoms)?;
        compensated.push(
            times
                .iter()
                .zip(&values)
                .map(|(t, v)| t.sqrt() * v)
                .fold(0.0, f64::max),
        );
        finest = values;
    }
    let top = *params.res_list.last().expect("validated") as f64;
    let (fit_t, fit_v): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(&finest)
        .filter(|(&t, _)| {
            t <= params.fit_t_max * (1.0 + 1e-9) && t * (top / 2.0).powi(2) >= params.resolution
        })
        .map(|(&t, &v)| (t, v))
        .unzip();
    let [lo, hi] = params.slope_range;
    let fit = fit_exponent(
        "small_t_slope",
        &fit_t,
        &fit_v,
        0.5 * (lo + hi),
        0.5 * (hi - lo),
    )?;
    let growth = spread(&compensated);
    b.constant("C_max", compensated.iter().copied().fold(0.0, f64::max));
    for (res, c) in params.res_list.iter().zip(&compensated) {
        b.constant(format!("C(N={res})"), *c);
    }
    b.constant("C_spread", growth);
    b.constant("fit_points", fit_t.len() as f64);
    let pass = fit.within_tolerance() && growth <= params.growth_limit;
    b.exponent(fit);
    Ok(b.finish(pass))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_tensor_gives_zero() {
        let g = Grid::new(2, 16).unwrap();
        for t in [1e-4, 1e-2, 1.0] {
            let out = oseen_apply(&TensorField::zeros(g), t, 1.0).unwrap();
            assert_eq!(out.max_coeff(), 0.0);
        }
    }

    #[test]
    fn extremal_tensor_beats_random_ones() {
        let g = Grid::new(2, 32).unwrap();
        let t = 0.01;
        let ext = extremal_tensors(g, t).unwrap();
        let best = ext
            .iter()
            .map(|f| to_physical(&oseen_apply(f, t, 1.0).unwrap()).max_magnitude())
            .fold(0.0, f64::max);
        for i in 0..4 {
            let r = random_unit_tensor(g, 3, i);
            assert!((to_physical(&r).max_magnitude() - 1.0).abs() < 1e-12);
            let v = to_physical(&oseen_apply(&r, t, 1.0).unwrap()).max_magnitude();
            assert!(v <= best, "{v} > {best}");
        }
    }
}
