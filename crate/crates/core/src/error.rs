use thiserror::Error;

use crate::solver::{PicardRun, Trajectory};
use crate::spectral::Grid;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: Grid, right: Grid },

    #[error("axis {axis} out of range for dimension {dim}")]
    Axis { axis: usize, dim: usize },

    #[error("{what} {index} out of range [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        index: i64,
        lo: i64,
        hi: i64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("field is not divergence-free (relative defect {0:e})")]
    NotDivergenceFree(f64),

    #[error("Picard iteration did not converge after {} iterations", .0.report.iterations)]
    NonConvergence(Box<PicardRun>),

    #[error("blow-up suspected: non-finite state after t = {time}")]
    BlowupSuspected {
        /// Time of the last finite state.
        time: f64,
        /// Every finite state computed so far; the last one is at `time`.
        trajectory: Box<Trajectory>,
    },

    #[error("fit undefined: {0}")]
    FitUndefined(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn check_grid(left: Grid, right: Grid) -> Result<()> {
        if left == right {
            Ok(())
        } else {
            Err(Error::GridMismatch { left, right })
        }
    }
}
