use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn config(msg: String) -> Error {
    Error::Config(msg)
}

fn check_res_list(what: &str, list: &[usize], dim: usize) -> Result<()> {
    if list.len() < 2 {
        return Err(config(format!("{what}: need at least two resolutions")));
    }
    for &n in list {
        crate::spectral::Grid::new(dim, n).map_err(|e| config(format!("{what}: {e}")))?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothingParams {
    pub r_list: Vec<f64>,
    pub alphas: Vec<u32>,
    pub t_list: Vec<f64>,
    /// Random paths per horizon.
    pub trials: usize,
    pub res: usize,
    /// Time intervals per horizon.
    pub node_count: usize,
    pub tolerance: f64,
    /// Largest allowed `max K / min K` across horizons for `α = 2`.
    pub bound_spread: f64,
}

impl Default for SmoothingParams {
    fn default() -> Self {
        Self {
            r_list: vec![-1.0, 0.0],
            alphas: vec![1, 2],
            t_list: (1..=6).map(|m| 0.5f64.powi(m)).collect(),
            trials: 50,
            res: 64,
            node_count: 32,
            tolerance: 0.15,
            bound_spread: 2.0,
        }
    }
}

impl SmoothingParams {
    pub fn validate(&self) -> Result<()> {
        let dyadic = |t: f64| t > 0.0 && t <= 1.0 && t.log2().fract() == 0.0;
        let mut ts = self.t_list.clone();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        if ts.len() < 4 || !ts.iter().all(|&t| dyadic(t)) {
            return Err(config(
                "smoothing: t_list needs at least four distinct dyadic values in (0, 1]".into(),
            ));
        }
        if self.alphas.iter().any(|a| !matches!(a, 1 | 2)) {
            return Err(config("smoothing: alphas must be 1 or 2".into()));
        }
        if self.trials == 0 || self.node_count == 0 {
            return Err(config(
                "smoothing: trials and node_count must be positive".into(),
            ));
        }
        crate::spectral::Grid::new(2, self.res).map(|_| ())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParaproductParams {
    pub s_list: Vec<f64>,
    pub trials: usize,
    pub res_list: Vec<usize>,
    /// Largest allowed ratio of the finest to the coarsest maximum.
    pub growth_limit: f64,
}

impl Default for ParaproductParams {
    fn default() -> Self {
        Self {
            s_list: vec![1.5, 2.0],
            trials: 50,
            res_list: vec![32, 64, 128],
            growth_limit: 2.0,
        }
    }
}

impl ParaproductParams {
    pub fn validate(&self) -> Result<()> {
        if self.s_list.iter().any(|&s| !(s > 1.0)) {
            return Err(config("paraproduct: every s must exceed 1".into()));
        }
        if self.trials < 50 {
            return Err(config(
                "paraproduct: at least 50 trials are required".into(),
            ));
        }
        check_res_list("paraproduct", &self.res_list, 2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BonyParams {
    /// Total random pairs, spread evenly over every (dim, res) combination.
    pub trials: usize,
    pub dims: Vec<usize>,
    pub res_list: Vec<usize>,
    pub tolerance: f64,
}

impl Default for BonyParams {
    fn default() -> Self {
        Self {
            trials: 200,
            dims: vec![2, 3],
            res_list: vec![16, 32, 64],
            tolerance: 1e-12,
        }
    }
}

impl BonyParams {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.res_list.is_empty() {
            return Err(config("bony: dims and res_list must be non-empty".into()));
        }
        if self.trials < self.dims.len() * self.res_list.len() {
            return Err(config(
                "bony: need at least one pair per configuration".into(),
            ));
        }
        for &d in &self.dims {
            for &n in &self.res_list {
                crate::spectral::Grid::new(d, n).map_err(|e| config(format!("bony: {e}")))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatParams {
    /// Random fields per resolution and family.
    pub trials: usize,
    pub res_list: Vec<usize>,
    /// `|k|²` values of the single-mode closed-form check.
    pub modes: Vec<u32>,
    pub closed_form_tol: f64,
    pub growth_limit: f64,
    pub s_small: f64,
}

impl Default for HeatParams {
    fn default() -> Self {
        Self {
            trials: 12,
            res_list: vec![32, 64, 128],
            modes: vec![1, 2, 4, 5, 8, 16, 25],
            closed_form_tol: 0.01,
            growth_limit: 2.0,
            s_small: 1e-4,
        }
    }
}

impl HeatParams {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.modes.is_empty() {
            return Err(config("heat: trials and modes must be non-empty".into()));
        }
        if self.modes.iter().any(|&m| m == 0) {
            return Err(config("heat: modes must have |k|² >= 1".into()));
        }
        if !(self.s_small > 0.0 && self.s_small < 1.0) {
            return Err(config("heat: s_small must lie in (0, 1)".into()));
        }
        check_res_list("heat", &self.res_list, 2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OseenParams {
    /// Random smooth tensors per resolution, besides the extremal one.
    pub trials: usize,
    pub res_list: Vec<usize>,
    pub t_min: f64,
    pub t_max: f64,
    pub per_decade: usize,
    /// Upper end of the small-time fit window.
    pub fit_t_max: f64,
    /// Times count as resolved when `t·(N/2)² >= resolution`.
    pub resolution: f64,
    pub slope_range: [f64; 2],
    pub growth_limit: f64,
}

impl Default for OseenParams {
    fn default() -> Self {
        Self {
            trials: 8,
            res_list: vec![32, 64, 128],
            t_min: 1e-4,
            t_max: 1.0,
            per_decade: 4,
            fit_t_max: 1e-2,
            resolution: 4.0,
            slope_range: [-0.65, -0.35],
            growth_limit: 2.0,
        }
    }
}

impl OseenParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_min < self.fit_t_max && self.fit_t_max <= self.t_max) {
            return Err(config("oseen: need 0 < t_min < fit_t_max <= t_max".into()));
        }
        if self.per_decade == 0 || !(self.slope_range[0] < self.slope_range[1]) {
            return Err(config("oseen: bad per_decade or slope_range".into()));
        }
        check_res_list("oseen", &self.res_list, 2)
    }

    /// Geometric times from `t_min` to `t_max`.
    pub fn times(&self) -> Vec<f64> {
        let decades = (self.t_max / self.t_min).log10();
        let count = (decades * self.per_decade as f64).round() as usize;
        (0..=count)
            .map(|i| self.t_min * 10f64.powf(i as f64 / self.per_decade as f64))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingParams {
    /// Random fields per resolution and family.
    pub trials: usize,
    pub res_2d: Vec<usize>,
    pub res_3d: Vec<usize>,
    pub growth_limit: f64,
}

impl Default for EmbeddingParams {
    fn default() -> Self {
        Self {
            trials: 8,
            res_2d: vec![32, 64, 128],
            res_3d: vec![16, 32, 64],
            growth_limit: 2.0,
        }
    }
}

impl EmbeddingParams {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(config("embedding: trials must be positive".into()));
        }
        check_res_list("embedding", &self.res_2d, 2)?;
        check_res_list("embedding", &self.res_3d, 3)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Step3Params {
    pub s: f64,
    pub delta: f64,
    pub res_list: Vec<usize>,
    pub node_count: usize,
    /// Sup-norm of the random small-data profile.
    pub amplitude: f64,
    pub growth_limit: f64,
    /// Constants below this count as vanishing.
    pub zero_floor: f64,
}

impl Default for Step3Params {
    fn default() -> Self {
        Self {
            s: 1.5,
            delta: 0.05,
            res_list: vec![32, 64, 128],
            node_count: 16,
            amplitude: 0.5,
            growth_limit: 2.0,
            zero_floor: 1e-9,
        }
    }
}

impl Step3Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.s > 1.0) {
            return Err(config("step3: s must exceed 1".into()));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) || self.node_count == 0 {
            return Err(config(
                "step3: need 0 < delta <= 1 and node_count > 0".into(),
            ));
        }
        if !(self.amplitude > 0.0) {
            return Err(config("step3: amplitude must be positive".into()));
        }
        check_res_list("step3", &self.res_list, 2)
    }
}

/// Parameters of every check; missing sections take their defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyParams {
    pub seed: u64,
    pub smoothing: SmoothingParams,
    pub paraproduct: ParaproductParams,
    pub bony: BonyParams,
    pub heat: HeatParams,
    pub oseen: OseenParams,
    pub embedding: EmbeddingParams,
    pub step3: Step3Params,
}

impl VerifyParams {
    pub fn validate(&self) -> Result<()> {
        self.smoothing.validate()?;
        self.paraproduct.validate()?;
        self.bony.validate()?;
        self.heat.validate()?;
        self.oseen.validate()?;
        self.embedding.validate()?;
        self.step3.validate()
    }
}
