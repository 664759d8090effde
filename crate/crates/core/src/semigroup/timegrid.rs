use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Node placement policy on `[0, T]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Spacing {
    #[default]
    Uniform,
    /// Geometric refinement towards `t = 0`: consecutive steps grow by `ratio`.
    Graded { ratio: f64 },
    /// Nodes supplied explicitly.
    Custom,
}

/// Ascending nodes `0 = t₀ < t₁ < … < t_M = T`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    spacing: Spacing,
}

impl TimeGrid {
    pub fn uniform(end: f64, intervals: usize) -> Result<Self> {
        Self::check_end(end, intervals)?;
        let nodes = (0..=intervals)
            .map(|m| end * m as f64 / intervals as f64)
            .collect();
        Ok(Self {
            nodes,
            spacing: Spacing::Uniform,
        })
    }

    pub fn graded(end: f64, intervals: usize, ratio: f64) -> Result<Self> {
        Self::check_end(end, intervals)?;
        if !(ratio.is_finite() && ratio >= 1.0) {
            return Err(Error::Config(format!(
                "grading ratio must be >= 1, got {ratio}"
            )));
        }
        let weights: Vec<f64> = (0..intervals).map(|q| ratio.powi(q as i32)).collect();
        let total: f64 = weights.iter().sum();
        let mut nodes = Vec::with_capacity(intervals + 1);
        let mut acc = 0.0;
        nodes.push(0.0);
        for w in &weights[..intervals - 1] {
            acc += w;
            nodes.push(end * acc / total);
        }
        nodes.push(end);
        Ok(Self {
            nodes,
            spacing: Spacing::Graded { ratio },
        })
    }

    pub fn with_spacing(end: f64, intervals: usize, spacing: Spacing) -> Result<Self> {
        match spacing {
            Spacing::Uniform => Self::uniform(end, intervals),
            Spacing::Graded { ratio } => Self::graded(end, intervals, ratio),
            Spacing::Custom => Err(Error::Config("custom spacing needs explicit nodes".into())),
        }
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.first() != Some(&0.0) {
            return Err(Error::InvalidArgument("time grid must start at 0".into()));
        }
        if nodes
            .windows(2)
            .any(|w| !(w[1] > w[0]) || !w[1].is_finite())
        {
            return Err(Error::InvalidArgument(
                "time grid must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            nodes,
            spacing: Spacing::Custom,
        })
    }

    fn check_end(end: f64, intervals: usize) -> Result<()> {
        if !(end.is_finite() && end > 0.0) {
            return Err(Error::Config(format!(
                "horizon must be positive, got {end}"
            )));
        }
        if intervals == 0 {
            return Err(Error::Config("need at least one interval".into()));
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn end(&self) -> f64 {
        *self.nodes.last().expect("nonempty")
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Index of the node equal to `t` up to `tol`.
    pub fn find(&self, t: f64, tol: f64) -> Option<usize> {
        self.nodes.iter().position(|&s| (s - t).abs() <= tol)
    }
}
