//! The JSON run configuration shared by every subcommand.

use std::path::{Path, PathBuf};

use cnlab::littlewood_paley::Cutoff;
use cnlab::monitor::{KatoHorizon, MonitorOptions};
use cnlab::solver::{ProfileSpec, SolverConfig};
use cnlab::verify::VerifyParams;
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

pub const DEFAULT_OUTPUT_DIR: &str = "cnlab-out";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Picard,
    #[default]
    Etdrk4,
    /// Both solvers, cross-validated; artifacts come from the Picard run.
    Both,
}

fn smooth() -> Cutoff {
    Cutoff::Smooth
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorSection {
    #[serde(default)]
    pub p_list: Vec<f64>,
    #[serde(default)]
    pub kato_horizon: KatoHorizon,
    #[serde(default = "smooth")]
    pub cutoff: Cutoff,
    /// Profile `ω` for the Besov distance column.
    #[serde(default)]
    pub omega: Option<ProfileSpec>,
}

impl Default for MonitorSection {
    fn default() -> Self {
        Self {
            p_list: Vec::new(),
            kato_horizon: KatoHorizon::Auto,
            cutoff: Cutoff::Smooth,
            omega: None,
        }
    }
}

impl MonitorSection {
    pub fn options(&self) -> MonitorOptions {
        MonitorOptions {
            p_list: self.p_list.clone(),
            kato_horizon: self.kato_horizon,
            cutoff: self.cutoff,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub method: MethodChoice,
    #[serde(default)]
    pub monitor: MonitorSection,
    #[serde(default)]
    pub verify: VerifyParams,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::usage(format!("invalid config: {e}")))
    }

    /// Config file if given, defaults otherwise.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self, Failure> {
        path.map(Self::load).unwrap_or_else(|| Ok(Self::default()))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if let Some(s) = &self.solver {
            s.validate()?;
        }
        self.monitor.options().validate()?;
        if let (Some(omega), Some(s)) = (&self.monitor.omega, &self.solver) {
            omega.validate(s.dim)?;
        }
        self.verify.validate()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
