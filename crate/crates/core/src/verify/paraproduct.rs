//! Boundedness of the paraproducts on Besov and sup-norm inputs.

use serde_json::json;

use super::random::{besov_shaped, stream};
use super::{ParaproductParams, ReportBuilder, VerificationReport};
use crate::error::{Error, Result};
use crate::littlewood_paley::{
    besov_from_blocks, besov_norm, block_sup_norms, Cutoff, DyadicPartition,
};
use crate::paraproduct::tensor_paraproduct;
use crate::spectral::{to_physical, Grid, SpectralVectorField};

const CHECK_ID: u64 = 2;

/// Ratios of one paraproduct `π_i(f ⊗ g)` against both bound instances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParaproductRatios {
    /// `‖π_i‖_{B^s} / (‖f‖_{B^{-1}} ‖g‖_{B^{1+s}})`.
    pub besov: f64,
    /// `‖π_i‖_{B^{1+s}} / (‖f‖_∞ ‖g‖_{B^{1+s}})`.
    pub bounded: f64,
}

pub fn paraproduct_ratios(
    i: usize,
    f: &SpectralVectorField,
    g: &SpectralVectorField,
    s: f64,
    part: &DyadicPartition,
) -> Result<ParaproductRatios> {
    let f_m1 = besov_norm(f, -1.0, part)?;
    let f_inf = to_physical(f).max_magnitude();
    let g_norm = besov_norm(g, 1.0 + s, part)?;
    if !(f_m1 >= 1e-6 && f_inf >= 1e-6 && g_norm >= 1e-6) {
        return Err(Error::InvalidArgument(
            "paraproduct ratio of a vanishing input".into(),
        ));
    }
    let blocks = block_sup_norms(&tensor_paraproduct(i, f, g, part)?, part)?;
    Ok(ParaproductRatios {
        besov: besov_from_blocks(&blocks, s) / (f_m1 * g_norm),
        bounded: besov_from_blocks(&blocks, 1.0 + s) / (f_inf * g_norm),
    })
}

/// Both instances for `π₀` and `π₁`, maximized over random shaped inputs at
/// every resolution.
pub fn verify_paraproduct(
    s: f64,
    params: &ParaproductParams,
    seed: u64,
) -> Result<VerificationReport> {
    let mut checked = params.clone();
    checked.s_list = vec![s];
    checked.validate()?;
    let mut b = ReportBuilder::new(
        format!("paraproduct_s{s}"),
        json!({
            "s": s,
            "trials": params.trials,
            "res_list": params.res_list,
            "dim": 2,
            "cutoff": "smooth",
            "seed": seed,
        }),
    );
    b.trials(params.trials);
    // [instance][shift][resolution]
    let mut maxima = [
        [
            vec![0.0f64; params.res_list.len()],
            vec![0.0; params.res_list.len()],
        ],
        [
            vec![0.0; params.res_list.len()],
            vec![0.0; params.res_list.len()],
        ],
    ];
    for (ni, &res) in params.res_list.iter().enumerate() {
        let grid = Grid::new(2, res)?;
        let part = DyadicPartition::new(grid, Cutoff::Smooth);
        let kmax = grid.dealias_cutoff() as f64;
        for trial in 0..params.trials {
            let family = (ni * params.trials + trial) as u64;
            let mut rng = stream(seed ^ s.to_bits(), CHECK_ID, family);
            let f_a: SpectralVectorField = besov_shaped(grid, &mut rng, -1.0, kmax, false);
            let f_b: SpectralVectorField = besov_shaped(grid, &mut rng, 0.0, kmax, false);
            let g: SpectralVectorField = besov_shaped(grid, &mut rng, 1.0 + s, kmax, false);
            for i in 0..2 {
                let a = paraproduct_ratios(i, &f_a, &g, s, &part)?.besov;
                let c = paraproduct_ratios(i, &f_b, &g, s, &part)?.bounded;
                maxima[0][i][ni] = maxima[0][i][ni].max(a);
                maxima[1][i][ni] = maxima[1][i][ni].max(c);
            }
        }
    }
    let last = params.res_list.len() - 1;
    let mut worst = 0.0f64;
    let mut pass = true;
    let mut details = Vec::new();
    for (inst, name) in ["besov", "bounded"].iter().enumerate() {
        for i in 0..2 {
            let m = &maxima[inst][i];
            let growth = m[last] / m[0];
            worst = worst.max(growth);
            pass &= growth <= params.growth_limit;
            details.push((format!("growth_{name}_pi{i}"), growth));
            for (ni, &res) in params.res_list.iter().enumerate() {
                details.push((format!("ratio_{name}_pi{i}(N={res})"), m[ni]));
            }
        }
    }
    b.constant("growth_max", worst);
    for (name, v) in details {
        b.constant(name, v);
    }
    Ok(b.finish(pass))
}
