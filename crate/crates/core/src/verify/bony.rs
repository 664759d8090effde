//! Exactness of the Bony split `f ⊗ g = π₀(f ⊗ g) + π₁(g ⊗ f)`.

use serde_json::json;

use super::random::{besov_shaped, stream};
use super::{BonyParams, ReportBuilder, VerificationReport};
use crate::error::Result;
use crate::littlewood_paley::{Cutoff, DyadicPartition};
use crate::paraproduct::bony_split;
use crate::spectral::{pointwise_tensor, to_physical, Field, Grid, SpectralVectorField};

const CHECK_ID: u64 = 3;

/// `‖A + B - f⊗g‖_∞ / ‖f⊗g‖_∞` with sharp cutoffs (`0` for a zero product).
pub(crate) fn reconstruction_error(
    f: &SpectralVectorField,
    g: &SpectralVectorField,
) -> Result<f64> {
    let part = DyadicPartition::new(f.grid(), Cutoff::Sharp);
    let (a, b) = bony_split(f, g, &part)?;
    let exact = pointwise_tensor(f, g)?;
    let scale = to_physical(&exact).max_magnitude();
    let diff = (&a + &b).axpy(-1.0, &exact)?;
    let err = to_physical(&diff).max_magnitude();
    Ok(if scale == 0.0 { err } else { err / scale })
}

/// Random mean-zero pairs spread evenly over every `(dim, res)` combination.
pub fn verify_bony_identity(params: &BonyParams, seed: u64) -> Result<VerificationReport> {
    params.validate()?;
    let mut b = ReportBuilder::new(
        "bony_identity",
        json!({
            "trials": params.trials,
            "dims": params.dims,
            "res_list": params.res_list,
            "cutoff": "sharp",
            "tolerance": params.tolerance,
            "seed": seed,
        }),
    );
    b.trials(params.trials);
    let configs: Vec<(usize, usize)> = params
        .dims
        .iter()
        .flat_map(|&d| params.res_list.iter().map(move |&n| (d, n)))
        .collect();
    let base = params.trials / configs.len();
    let extra = params.trials % configs.len();
    let mut worst = 0.0f64;
    let mut per_config = Vec::new();
    for (ci, &(dim, res)) in configs.iter().enumerate() {
        let grid = Grid::new(dim, res)?;
        let count = base + usize::from(ci < extra);
        let mut local = 0.0f64;
        for trial in 0..count {
            let mut rng = stream(seed, CHECK_ID, (ci * params.trials + trial) as u64);
            let kmax = grid.dealias_cutoff() as f64;
            let f: SpectralVectorField = besov_shaped(grid, &mut rng, 0.0, kmax, false);
            let g: SpectralVectorField = besov_shaped(grid, &mut rng, 0.0, kmax, false);
            local = local.max(reconstruction_error(&f, &g)?);
        }
        worst = worst.max(local);
        per_config.push((format!("max_error(n={dim},N={res})"), local));
    }
    b.constant("max_error", worst);
    for (name, v) in per_config {
        b.constant(name, v);
    }
    Ok(b.finish(worst <= params.tolerance))
}
