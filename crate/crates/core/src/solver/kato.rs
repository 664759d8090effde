use serde::Serialize;

use crate::error::{Error, Result};
use crate::semigroup::heat;
use crate::spectral::{lp_norm, to_physical, Field, SpectralVectorField};

/// Number of points in the geometric time grid of the Kato supremum.
pub const KATO_GRID_POINTS: usize = 64;
/// Left end of that grid relative to the horizon.
pub const KATO_GRID_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KatoValue {
    pub value: f64,
    /// Time attaining the supremum.
    pub t_star: f64,
}

/// `64` geometric points from `horizon·1e-6` to `horizon`.
pub fn kato_time_grid(horizon: f64) -> Vec<f64> {
    let lo = (horizon * KATO_GRID_FLOOR).ln();
    let hi = horizon.ln();
    (0..KATO_GRID_POINTS)
        .map(|i| {
            if i + 1 == KATO_GRID_POINTS {
                horizon
            } else {
                (lo + (hi - lo) * i as f64 / (KATO_GRID_POINTS - 1) as f64).exp()
            }
        })
        .collect()
}

/// Golden-section iterations refining the grid maximum.
const REFINE_STEPS: usize = 40;

/// `(1 + ‖u0‖_n) · sup_{0<t≤T} √t ‖e^{νtΔ} u0‖_∞`.
pub fn kato_smallness(u0: &SpectralVectorField, horizon: f64, nu: f64) -> Result<KatoValue> {
    let mut out = heat_sup(u0, horizon, nu)?;
    out.value *= 1.0 + lp_norm(u0, u0.grid().dim() as f64)?;
    Ok(out)
}

/// `sup_{0<t≤T} √t ‖e^{νtΔ} u0‖_∞`.
///
/// The supremum is located on [`kato_time_grid`] and then refined by a
/// golden-section search in `log t` between the neighbours of the best node.
pub fn heat_sup<F: Field>(u0: &F, horizon: f64, nu: f64) -> Result<KatoValue> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if u0.max_coeff() == 0.0 {
        return Ok(KatoValue {
            value: 0.0,
            t_star: horizon,
        });
    }
    let f =
        |t: f64| -> Result<f64> { Ok(t.sqrt() * to_physical(&heat(u0, t, nu)?).max_magnitude()) };
    let grid = kato_time_grid(horizon);
    let values = grid.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    let best = (0..grid.len()).fold(0, |b, i| if values[i] > values[b] { i } else { b });
    let mut out = KatoValue {
        value: values[best],
        t_star: grid[best],
    };
    let lo = grid[best.saturating_sub(1)].ln();
    let hi = grid[(best + 1).min(grid.len() - 1)].ln();
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (f(x1.exp())?, f(x2.exp())?);
    for _ in 0..REFINE_STEPS {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1.exp())?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2.exp())?;
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > out.value {
            out = KatoValue {
                value: v,
                t_star: x.exp().min(horizon),
            };
        }
    }
    Ok(out)
}
