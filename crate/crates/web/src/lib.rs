//! Browser bindings: a 2D periodic flow with vorticity rendering, its dyadic
//! block spectrum and the heat-flow curve behind the Kato smallness test.

use cnlab::littlewood_paley::{besov_from_blocks, block_sup_norms, Cutoff, DyadicPartition};
use cnlab::semigroup::heat;
use cnlab::solver::{
    etdrk4_integrate, kato_smallness, kato_time_grid, make_profile, ProfileSpec, SolverConfig,
};
use cnlab::spectral::{derivative, to_physical, Field, Grid, SpectralVectorField};
use wasm_bindgen::prelude::*;

fn profile(kind: &str, amplitude: f64, seed: u32) -> Result<ProfileSpec, String> {
    let spec = ProfileSpec::from_kind(kind).map_err(|e| e.to_string())?;
    Ok(match spec {
        ProfileSpec::RandomDivfree { slope, band, .. } => ProfileSpec::RandomDivfree {
            amplitude,
            slope,
            seed: seed as u64,
            band,
        },
        other => other.with_amplitude(amplitude),
    })
}

/// Diverging blue-white-red map of `v ∈ [-1, 1]`.
fn colour(v: f64) -> [u8; 4] {
    let v = v.clamp(-1.0, 1.0);
    let fade = |x: f64| (255.0 * (1.0 - x.abs())).round() as u8;
    if v >= 0.0 {
        [255, fade(v), fade(v), 255]
    } else {
        [fade(v), fade(v), 255, 255]
    }
}

#[wasm_bindgen]
pub struct Simulation {
    cfg: SolverConfig,
    state: SpectralVectorField,
    time: f64,
}

#[wasm_bindgen]
impl Simulation {
    /// `kind` is `taylor_green_2d` or `random_divfree`.
    #[wasm_bindgen(constructor)]
    pub fn new(
        res: usize,
        kind: &str,
        amplitude: f64,
        seed: u32,
        nu: f64,
    ) -> Result<Simulation, String> {
        let grid = Grid::new(2, res).map_err(|e| e.to_string())?;
        let mut cfg = SolverConfig::new(grid, 1.0);
        cfg.nu = nu;
        cfg.validate().map_err(|e| e.to_string())?;
        let state =
            make_profile(grid, &profile(kind, amplitude, seed)?).map_err(|e| e.to_string())?;
        Ok(Self {
            cfg,
            state,
            time: 0.0,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn res(&self) -> usize {
        self.cfg.res
    }

    /// Integrate over `span` with `steps` ETDRK4 steps.
    pub fn advance(&mut self, span: f64, steps: usize) -> Result<(), String> {
        if !(span > 0.0) || steps == 0 {
            return Err("span and steps must be positive".into());
        }
        let mut cfg = self.cfg.clone();
        cfg.horizon = span;
        cfg.etdrk4.dt = Some(span / steps as f64);
        cfg.picard.node_count = 1;
        let traj = etdrk4_integrate(&self.state, &cfg).map_err(|e| e.to_string())?;
        self.state = traj.states().last().expect("nonempty").clone();
        self.time += span;
        Ok(())
    }

    /// `∂₁u₂ - ∂₂u₁` on the grid, row-major with `x₂` fastest.
    pub fn vorticity(&self) -> Vec<f64> {
        let u = &self.state;
        let w = derivative(&u.component(1), 0)
            .and_then(|a| Ok(a.axpy(-1.0, &derivative(&u.component(0), 1)?)?))
            .expect("2D field");
        to_physical(&w).into_components().remove(0)
    }

    /// RGBA bytes of the vorticity, symmetric colour scale.
    pub fn vorticity_rgba(&self) -> Vec<u8> {
        let w = self.vorticity();
        let scale = w
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        w.iter().flat_map(|v| colour(v / scale)).collect()
    }

    /// `‖S₀u‖_∞` followed by `‖Δ_j u‖_∞` for every block.
    pub fn block_norms(&self, smooth: bool) -> Vec<f64> {
        let cutoff = if smooth {
            Cutoff::Smooth
        } else {
            Cutoff::Sharp
        };
        let part = DyadicPartition::new(self.state.grid(), cutoff);
        block_sup_norms(&self.state, &part).expect("matching grid")
    }

    /// Besov norm of index `s` from the block norms.
    pub fn besov(&self, s: f64, smooth: bool) -> f64 {
        besov_from_blocks(&self.block_norms(smooth), s)
    }

    /// Interleaved `t, √t ‖e^{νtΔ}u‖_∞` on the Kato time grid up to `horizon`.
    pub fn heat_curve(&self, horizon: f64) -> Result<Vec<f64>, String> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err("horizon must be positive".into());
        }
        let mut out = Vec::new();
        for t in kato_time_grid(horizon) {
            let v = heat(&self.state, t, self.cfg.nu).map_err(|e| e.to_string())?;
            out.push(t);
            out.push(t.sqrt() * to_physical(&v).max_magnitude());
        }
        Ok(out)
    }

    /// The Kato smallness functional of the current state.
    pub fn kato(&self, horizon: f64) -> Result<f64, String> {
        kato_smallness(&self.state, horizon, self.cfg.nu)
            .map(|k| k.value)
            .map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colour_map_ends() {
        assert_eq!(colour(1.0), [255, 0, 0, 255]);
        assert_eq!(colour(-1.0), [0, 0, 255, 255]);
        assert_eq!(colour(0.0), [255, 255, 255, 255]);
        assert_eq!(colour(7.0), colour(1.0));
    }

    #[test]
    fn profile_selection() {
        assert!(profile("taylor_green_2d", 2.0, 0).is_ok());
        assert!(profile("vortex", 1.0, 0).is_err());
        let ProfileSpec::RandomDivfree {
            seed, amplitude, ..
        } = profile("random_divfree", 0.3, 9).unwrap()
        else {
            panic!("random profile expected");
        };
        assert_eq!((seed, amplitude), (9, 0.3));
    }
}
