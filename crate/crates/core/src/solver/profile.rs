use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semigroup::leray_project;
use crate::spectral::{to_physical, Field, Grid, PhysicalField, SpectralVectorField};

fn one() -> f64 {
    1.0
}

fn default_slope() -> f64 {
    1.0
}

fn default_band() -> [f64; 2] {
    [1.0, 4.0]
}

/// Initial-data family and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// `A·(sin x₁ cos x₂, -cos x₁ sin x₂)`.
    #[serde(rename = "taylor_green_2d")]
    TaylorGreen2d {
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `A·(sin x₁ cos x₂ cos x₃, -cos x₁ sin x₂ cos x₃, 0)`.
    #[serde(rename = "taylor_green_3d")]
    TaylorGreen3d {
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Leray-projected random coefficients with `|c(k)| ∝ |k|^{-slope}` for
    /// `band[0] ≤ |k| ≤ band[1]`, scaled so that `max_x |u(x)| = amplitude`.
    RandomDivfree {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "default_slope")]
        slope: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_band")]
        band: [f64; 2],
    },
}

impl ProfileSpec {
    /// The named family with default parameters.
    pub fn from_kind(kind: &str) -> Result<Self> {
        match kind {
            "taylor_green_2d" => Ok(Self::TaylorGreen2d { amplitude: 1.0 }),
            "taylor_green_3d" => Ok(Self::TaylorGreen3d { amplitude: 1.0 }),
            "random_divfree" => Ok(Self::RandomDivfree {
                amplitude: 1.0,
                slope: default_slope(),
                seed: 0,
                band: default_band(),
            }),
            other => Err(Error::Config(format!("unknown profile kind `{other}`"))),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::TaylorGreen2d { .. } => "taylor_green_2d",
            Self::TaylorGreen3d { .. } => "taylor_green_3d",
            Self::RandomDivfree { .. } => "random_divfree",
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            Self::TaylorGreen2d { amplitude }
            | Self::TaylorGreen3d { amplitude }
            | Self::RandomDivfree { amplitude, .. } => amplitude,
        }
    }

    pub fn with_amplitude(&self, a: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            Self::TaylorGreen2d { amplitude }
            | Self::TaylorGreen3d { amplitude }
            | Self::RandomDivfree { amplitude, .. } => *amplitude = a,
        }
        out
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let a = self.amplitude();
        if !a.is_finite() {
            return Err(Error::Config(format!("amplitude must be finite, got {a}")));
        }
        match *self {
            Self::TaylorGreen2d { .. } if dim != 2 => {
                Err(Error::Config("taylor_green_2d needs dim = 2".into()))
            }
            Self::TaylorGreen3d { .. } if dim != 3 => {
                Err(Error::Config("taylor_green_3d needs dim = 3".into()))
            }
            Self::RandomDivfree { slope, band, .. } => {
                if !slope.is_finite() {
                    return Err(Error::Config("slope must be finite".into()));
                }
                if !(band[0] > 0.0 && band[1] >= band[0] && band[1].is_finite()) {
                    return Err(Error::Config(format!("invalid band {band:?}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Divergence-free, mean-zero, real initial data on `grid`.
pub fn make_profile(grid: Grid, spec: &ProfileSpec) -> Result<SpectralVectorField> {
    spec.validate(grid.dim())?;
    match *spec {
        ProfileSpec::TaylorGreen2d { amplitude } => {
            let mut u = SpectralVectorField::zeros(grid);
            // sin x cos y = (sin(x+y) + sin(x-y))/2
            let q = Complex64::new(0.0, -0.25 * amplitude);
            for k in [[1, 1], [1, -1]] {
                u.set_mode(0, &k, q);
            }
            // -cos x sin y = -(sin(x+y) - sin(x-y))/2
            u.set_mode(1, &[1, 1], -q);
            u.set_mode(1, &[1, -1], q);
            Ok(u)
        }
        ProfileSpec::TaylorGreen3d { amplitude } => {
            let u: SpectralVectorField = PhysicalField::sample(grid, 3, |x, v| {
                v[0] = amplitude * x[0].sin() * x[1].cos() * x[2].cos();
                v[1] = -amplitude * x[0].cos() * x[1].sin() * x[2].cos();
                v[2] = 0.0;
            })
            .to_field()?;
            // drop round-off outside the eight exact modes
            let t = grid.tables();
            Ok(u.map_multiplier(|idx| {
                let k = t.kvec[idx];
                if k.iter().all(|c| c.abs() == 1) {
                    1.0
                } else {
                    0.0
                }
            }))
        }
        ProfileSpec::RandomDivfree {
            amplitude,
            slope,
            seed,
            band,
        } => random_divfree(grid, amplitude, slope, seed, band),
    }
}

fn random_divfree(
    grid: Grid,
    amplitude: f64,
    slope: f64,
    seed: u64,
    band: [f64; 2],
) -> Result<SpectralVectorField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = grid.tables();
    let dim = grid.dim();
    let mut u = SpectralVectorField::zeros(grid);
    let mut any = false;
    for idx in 0..grid.len() {
        let nidx = t.neg[idx] as usize;
        let r = t.ksq[idx].sqrt();
        if nidx <= idx || !t.keep[idx] || r < band[0] || r > band[1] {
            continue;
        }
        any = true;
        let scale = r.powf(-slope);
        let comps = u.components_mut();
        for comp in comps.iter_mut().take(dim) {
            let mag = scale * rng.gen_range(0.5..1.0);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let c = Complex64::from_polar(mag, phase);
            comp[idx] = c;
            comp[nidx] = c.conj();
        }
    }
    if !any {
        return Err(Error::Config(format!(
            "band {band:?} contains no resolved modes"
        )));
    }
    let u = leray_project(&u);
    let peak = to_physical(&u).max_magnitude();
    if peak == 0.0 {
        return Err(Error::Config(
            "random profile vanished after projection".into(),
        ));
    }
    Ok(u.scaled(amplitude / peak))
}
