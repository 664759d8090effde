//! The embedding `Lⁿ ↪ B^{-1,∞}_∞`.

use rand::Rng;
use serde_json::json;

use super::random::{besov_shaped, block_kernel, bump, bump_width, stream};
use super::{spread, EmbeddingParams, ReportBuilder, VerificationReport};
use crate::error::{Error, Result};
use crate::littlewood_paley::{besov_norm, Cutoff, DyadicPartition};
use crate::spectral::{lp_norm, Field, Grid, SpectralVectorField};

const CHECK_ID: u64 = 6;

/// `‖f‖_{B^{-1,∞}_∞} / ‖f‖_{Lⁿ}` with `n` the grid dimension.
pub fn embedding_ratio(f: &SpectralVectorField, part: &DyadicPartition) -> Result<f64> {
    let ln = lp_norm(f, f.grid().dim() as f64)?;
    if !(ln >= 1e-6) {
        return Err(Error::InvalidArgument(
            "embedding ratio of a vanishing field".into(),
        ));
    }
    Ok(besov_norm(f, -1.0, part)? / ln)
}

fn measure(grid: Grid, trials: usize, seed: u64, offset: usize) -> Result<f64> {
    let part = DyadicPartition::new(grid, Cutoff::Smooth);
    let kmax = grid.dealias_cutoff() as f64;
    let top = (kmax.log2().floor() as i64).max(1) - 1;
    let mut best = 0.0f64;
    for trial in 0..trials {
        let mut rng = stream(seed, CHECK_ID, (offset + trial) as u64);
        let shaped: SpectralVectorField = besov_shaped(grid, &mut rng, -1.0, kmax, false);
        let w = bump_width(grid, &mut rng);
        let bumped: SpectralVectorField = bump(grid, &mut rng, w);
        let j = rng.gen_range(0..=top);
        let kernel: SpectralVectorField = block_kernel(grid, &mut rng, j, Cutoff::Smooth);
        for f in [shaped, bumped, kernel] {
            best = best.max(embedding_ratio(&f, &part)?);
        }
    }
    Ok(best)
}

pub fn verify_embedding(params: &EmbeddingParams, seed: u64) -> Result<VerificationReport> {
    params.validate()?;
    let mut b = ReportBuilder::new(
        "embedding",
        json!({
            "trials": params.trials,
            "res_2d": params.res_2d,
            "res_3d": params.res_3d,
            "cutoff": "smooth",
            "seed": seed,
        }),
    );
    b.trials(3 * params.trials * (params.res_2d.len() + params.res_3d.len()));
    let mut rows = Vec::new();
    let mut k_dim = Vec::new();
    let mut pass = true;
    let mut offset = 0;
    for (dim, list) in [(2, &params.res_2d), (3, &params.res_3d)] {
        let mut per_res = Vec::new();
        for &res in list.iter() {
            let k = measure(Grid::new(dim, res)?, params.trials, seed, offset)?;
            offset += params.trials;
            rows.push((format!("K_emb(n={dim},N={res})"), k));
            per_res.push(k);
        }
        let growth = spread(&per_res);
        pass &= growth <= params.growth_limit;
        rows.push((format!("K_emb_spread(n={dim})"), growth));
        k_dim.push((dim, per_res.iter().copied().fold(0.0, f64::max)));
    }
    b.constant("K_emb", k_dim.iter().map(|p| p.1).fold(0.0, f64::max));
    for (dim, k) in k_dim {
        b.constant(format!("K_emb(n={dim})"), k);
    }
    for (name, v) in rows {
        b.constant(name, v);
    }
    Ok(b.finish(pass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn single_mode_closed_form() {
        let g = Grid::new(2, 32).unwrap();
        let mut f = SpectralVectorField::zeros(g);
        f.set_mode(0, &[4, 0], Complex64::new(0.5, 0.0));
        for cutoff in [Cutoff::Sharp, Cutoff::Smooth] {
            let part = DyadicPartition::new(g, cutoff);
            assert!((besov_norm(&f, -1.0, &part).unwrap() - 0.25).abs() < 1e-14);
            let r = embedding_ratio(&f, &part).unwrap();
            let want = 1.0 / (4.0 * std::f64::consts::PI * 2f64.sqrt());
            assert!((r - want).abs() < 1e-13, "{r} vs {want}");
        }
        let part = DyadicPartition::new(g, Cutoff::Smooth);
        assert!(embedding_ratio(&SpectralVectorField::zeros(g), &part).is_err());
    }
}
