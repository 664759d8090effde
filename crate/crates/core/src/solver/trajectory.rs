use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semigroup::TimeGrid;
use crate::spectral::{Field, Grid, Snapshot, SpectralVectorField};

/// Which discretization produced a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Picard,
    Etdrk4,
    /// Assembled from stored snapshots.
    Snapshots,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryMeta {
    pub method: Method,
    pub nu: f64,
    /// Picard increments per iteration; empty for time-steppers.
    pub history: Vec<f64>,
    /// Set when a time-stepper stopped on a non-finite state.
    pub blowup_time: Option<f64>,
}

impl TrajectoryMeta {
    pub fn new(method: Method, nu: f64) -> Self {
        Self {
            method,
            nu,
            history: Vec::new(),
            blowup_time: None,
        }
    }
}

/// Velocity states at strictly increasing times.
#[derive(Clone, Debug)]
pub struct Trajectory {
    grid: Grid,
    times: Vec<f64>,
    states: Vec<SpectralVectorField>,
    meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        states: Vec<SpectralVectorField>,
        meta: TrajectoryMeta,
    ) -> Result<Self> {
        if times.len() != states.len() || times.is_empty() {
            return Err(Error::Shape(format!(
                "{} times for {} states",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || !times[0].is_finite() {
            return Err(Error::InvalidArgument(
                "trajectory times must increase".into(),
            ));
        }
        let grid = states[0].grid();
        for s in &states {
            Error::check_grid(grid, s.grid())?;
        }
        Ok(Self {
            grid,
            times,
            states,
            meta,
        })
    }

    /// A trajectory from snapshots, ordered by their time stamps.
    pub fn from_snapshots(mut snaps: Vec<Snapshot>, nu: f64) -> Result<Self> {
        snaps.sort_by(|a, b| a.time.total_cmp(&b.time));
        let times = snaps.iter().map(|s| s.time).collect();
        let states = snaps
            .into_iter()
            .map(|s| s.into_field())
            .collect::<Result<Vec<_>>>()?;
        Self::new(times, states, TrajectoryMeta::new(Method::Snapshots, nu))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[SpectralVectorField] {
        &self.states
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::from_nodes(self.times.clone())
    }

    /// Index of the state at time `t`, matched up to `1e-9·(1 + |t|)`.
    pub fn find(&self, t: f64) -> Option<usize> {
        let tol = 1e-9 * (1.0 + t.abs());
        self.times.iter().position(|&s| (s - t).abs() <= tol)
    }

    /// Largest relative divergence defect over all states.
    pub fn divergence_defect(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s.divergence_defect())
            .fold(0.0, f64::max)
    }

    pub fn snapshots(&self) -> Vec<Snapshot> {
        self.times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| Snapshot::from_field(s, t))
            .collect()
    }
}
