use serde::{Deserialize, Serialize};

use super::ProfileSpec;
use crate::error::{Error, Result};
use crate::semigroup::{Spacing, TimeGrid};
use crate::spectral::Grid;

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardConfig {
    #[serde(default = "PicardConfig::default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "PicardConfig::default_tol")]
    pub contraction_tol: f64,
    /// Number of time intervals; the grid has `node_count + 1` nodes.
    #[serde(default = "PicardConfig::default_nodes")]
    pub node_count: usize,
    #[serde(default)]
    pub grading: Spacing,
}

impl PicardConfig {
    fn default_max_iters() -> usize {
        30
    }

    fn default_tol() -> f64 {
        1e-10
    }

    fn default_nodes() -> usize {
        64
    }
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            max_iters: Self::default_max_iters(),
            contraction_tol: Self::default_tol(),
            node_count: Self::default_nodes(),
            grading: Spacing::Uniform,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtdConfig {
    /// Step size; `T/1000` when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Also keep every `save_every`-th step.
    #[serde(default)]
    pub save_every: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub dim: usize,
    pub res: usize,
    #[serde(default = "one")]
    pub nu: f64,
    /// Time horizon `T`.
    pub horizon: f64,
    #[serde(default)]
    pub picard: PicardConfig,
    #[serde(default)]
    pub etdrk4: EtdConfig,
    #[serde(default = "yes")]
    pub dealias: bool,
    #[serde(default)]
    pub profile: Option<ProfileSpec>,
    /// Candidate smallness threshold compared against measured contraction.
    #[serde(default)]
    pub epsilon_n_probe: Option<f64>,
    #[serde(default = "SolverConfig::default_cross_tol")]
    pub cross_validate_tol: f64,
}

impl SolverConfig {
    fn default_cross_tol() -> f64 {
        1e-4
    }

    /// Defaults for `grid` on `[0, horizon]` with unit viscosity.
    pub fn new(grid: Grid, horizon: f64) -> Self {
        Self {
            dim: grid.dim(),
            res: grid.res(),
            nu: 1.0,
            horizon,
            picard: PicardConfig::default(),
            etdrk4: EtdConfig::default(),
            dealias: true,
            profile: None,
            epsilon_n_probe: None,
            cross_validate_tol: Self::default_cross_tol(),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.res)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {x}")))
            }
        };
        positive("nu", self.nu)?;
        positive("horizon", self.horizon)?;
        positive("picard.contraction_tol", self.picard.contraction_tol)?;
        positive("cross_validate_tol", self.cross_validate_tol)?;
        if self.picard.max_iters == 0 || self.picard.node_count == 0 {
            return Err(Error::Config(
                "picard.max_iters and picard.node_count must be >= 1".into(),
            ));
        }
        if let Spacing::Graded { ratio } = self.picard.grading {
            if !(ratio.is_finite() && ratio >= 1.0) {
                return Err(Error::Config(format!(
                    "grading ratio must be >= 1, got {ratio}"
                )));
            }
        }
        if matches!(self.picard.grading, Spacing::Custom) {
            return Err(Error::Config(
                "picard.grading must be uniform or graded".into(),
            ));
        }
        if let Some(dt) = self.etdrk4.dt {
            positive("etdrk4.dt", dt)?;
            if dt > self.horizon {
                return Err(Error::Config("etdrk4.dt exceeds the horizon".into()));
            }
        }
        if self.etdrk4.save_every == Some(0) {
            return Err(Error::Config("etdrk4.save_every must be >= 1".into()));
        }
        if let Some(eps) = self.epsilon_n_probe {
            positive("epsilon_n_probe", eps)?;
        }
        if let Some(p) = &self.profile {
            p.validate(self.dim)?;
        }
        Ok(())
    }

    /// Picard nodes on `[0, horizon]`.
    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::with_spacing(self.horizon, self.picard.node_count, self.picard.grading)
    }

    /// ETDRK4 step count and step size; the step is shrunk so the steps
    /// tile the horizon exactly.
    pub fn etd_steps(&self) -> (usize, f64) {
        let dt = self.etdrk4.dt.unwrap_or(self.horizon / 1000.0);
        let steps = ((self.horizon / dt) - 1e-9).ceil().max(1.0) as usize;
        (steps, self.horizon / steps as f64)
    }
}
