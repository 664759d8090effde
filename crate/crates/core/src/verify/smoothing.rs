//! Heat smoothing of the Duhamel operator between Besov spaces.

use rand::Rng;
use serde_json::json;

use super::random::{besov_shaped, stream};
use super::{fit_exponent, spread, ReportBuilder, SmoothingParams, VerificationReport};
use crate::error::{Error, Result};
use crate::littlewood_paley::{besov_from_blocks, block_sup_norms, Cutoff, DyadicPartition};
use crate::semigroup::{duhamel_L, TimeGrid};
use crate::spectral::{Field, Grid, ScalarField};

const CHECK_ID: u64 = 1;

/// Shape exponents cycled through by the random paths.
const SHAPES: [f64; 2] = [-1.0, 0.0];

/// Block sup-norms of every path and of its Duhamel image, per horizon.
#[derive(Clone, Debug)]
pub struct SmoothingData {
    params: SmoothingParams,
    seed: u64,
    /// `[horizon][path][node]` block norms of `f`.
    forcing: Vec<Vec<Vec<Vec<f64>>>>,
    /// Same layout for `𝕃f`.
    response: Vec<Vec<Vec<Vec<f64>>>>,
    measure_seconds: f64,
}

/// `f(t) = G₁ + cos(2πqt/T + φ) G₂`.
struct Path {
    g1: ScalarField,
    g2: ScalarField,
    q: u32,
    phase: f64,
}

impl Path {
    fn draw(grid: Grid, seed: u64, trial: usize) -> Self {
        let mut rng = stream(seed, CHECK_ID, trial as u64);
        let shape = SHAPES[trial % SHAPES.len()];
        let kmax = rng.gen_range(2.0..=grid.dealias_cutoff() as f64);
        let g1 = besov_shaped(grid, &mut rng, shape, kmax, false);
        let g2 = besov_shaped(grid, &mut rng, shape, kmax, false);
        Path {
            g1,
            g2,
            q: rng.gen_range(0..=2),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        }
    }

    fn sample(&self, t: f64, horizon: f64) -> ScalarField {
        let c = (std::f64::consts::TAU * self.q as f64 * t / horizon + self.phase).cos();
        self.g1.axpy(c, &self.g2).expect("same grid")
    }
}

impl SmoothingData {
    pub fn measure(params: &SmoothingParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let start = std::time::Instant::now();
        let grid = Grid::new(2, params.res)?;
        let part = DyadicPartition::new(grid, Cutoff::Smooth);
        let paths: Vec<Path> = (0..params.trials)
            .map(|i| Path::draw(grid, seed, i))
            .collect();
        let mut forcing = Vec::new();
        let mut response = Vec::new();
        for &horizon in &params.t_list {
            let times = TimeGrid::uniform(horizon, params.node_count)?;
            let mut f_h = Vec::with_capacity(paths.len());
            let mut r_h = Vec::with_capacity(paths.len());
            for path in &paths {
                let states: Vec<ScalarField> = times
                    .nodes()
                    .iter()
                    .map(|&t| path.sample(t, horizon))
                    .collect();
                let image = duhamel_L(&states, &times, 1.0)?;
                f_h.push(
                    states
                        .iter()
                        .map(|f| block_sup_norms(f, &part))
                        .collect::<Result<Vec<_>>>()?,
                );
                r_h.push(
                    image
                        .iter()
                        .map(|f| block_sup_norms(f, &part))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            forcing.push(f_h);
            response.push(r_h);
        }
        Ok(Self {
            params: params.clone(),
            seed,
            forcing,
            response,
            measure_seconds: start.elapsed().as_secs_f64(),
        })
    }

    /// Largest sampled ratio for each horizon.
    pub fn norms(&self, r: f64, alpha: u32) -> Result<Vec<f64>> {
        let sup = |nodes: &[Vec<f64>], s: f64| {
            nodes
                .iter()
                .map(|b| besov_from_blocks(b, s))
                .fold(0.0, f64::max)
        };
        let mut out = Vec::with_capacity(self.forcing.len());
        for (f_h, r_h) in self.forcing.iter().zip(&self.response) {
            let mut best = 0.0f64;
            for (f, l) in f_h.iter().zip(r_h) {
                let den = sup(f, r);
                if !(den >= 1e-6) {
                    return Err(Error::InvalidArgument(
                        "smoothing: degenerate random path".into(),
                    ));
                }
                best = best.max(sup(l, r + alpha as f64) / den);
            }
            out.push(best);
        }
        Ok(out)
    }

    pub fn report(&self, r: f64, alpha: u32) -> Result<VerificationReport> {
        let p = &self.params;
        let mut b = ReportBuilder::new(
            format!("smoothing_r{r}_alpha{alpha}"),
            json!({
                "r": r,
                "alpha": alpha,
                "t_list": p.t_list,
                "res": p.res,
                "dim": 2,
                "node_count": p.node_count,
                "cutoff": "smooth",
                "seed": self.seed,
            }),
        );
        b.trials(p.trials).add_elapsed(self.measure_seconds);
        let norms = self.norms(r, alpha)?;
        let expected = (2.0 - alpha as f64) / 2.0;
        let fit = fit_exponent("T_exponent", &p.t_list, &norms, expected, p.tolerance)?;
        b.constant("K_max", norms.iter().copied().fold(0.0, f64::max));
        for (t, k) in p.t_list.iter().zip(&norms) {
            b.constant(format!("K(T={t})"), *k);
        }
        let ratio = spread(&norms);
        b.constant("K_spread", ratio);
        let mut pass = fit.within_tolerance();
        if alpha == 2 {
            pass &= ratio <= p.bound_spread;
        }
        b.exponent(fit);
        Ok(b.finish(pass))
    }
}

/// One smoothing check; the random paths are shared across horizons.
pub fn verify_smoothing(
    r: f64,
    alpha: u32,
    params: &SmoothingParams,
    seed: u64,
) -> Result<VerificationReport> {
    if !matches!(alpha, 1 | 2) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be 1 or 2, got {alpha}"
        )));
    }
    SmoothingData::measure(params, seed)?.report(r, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_recovers_exponents() {
        let params = SmoothingParams {
            trials: 10,
            res: 64,
            node_count: 16,
            ..Default::default()
        };
        let data = SmoothingData::measure(&params, 1).unwrap();
        for alpha in [1, 2] {
            let rep = data.report(-1.0, alpha).unwrap();
            let e = &rep.exponents[0];
            assert!(e.within_tolerance(), "alpha {alpha}: {e:?}");
        }
        assert!(verify_smoothing(0.0, 3, &params, 1).is_err());
    }
}
