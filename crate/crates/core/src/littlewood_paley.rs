//! Dyadic frequency decomposition and the Besov norms `B^{s,∞}_∞`.
//!
//! Block `Δ_j` (`j >= 0`) localizes to `|k| ≈ 2^j`; index `-1` denotes the
//! low-frequency piece `S₀`, which on the integer lattice only sees `k = 0`.
//! `S_j = S₀ + Σ_{m<j} Δ_m`.
//!
//! Two cutoff families are provided:
//!
//! * `Sharp`: `Δ_j` is the indicator of `2^j <= |k| < 2^{j+1}`.
//! * `Smooth`: `S_j` has multiplier `χ(|k| / 2^j)` where `χ = 1` on
//!   `[0, 1/2]`, `χ = 0` on `[1, ∞)` and in between
//!   `χ(r) = ramp(2 - 2r)` with the C^∞ step
//!   `ramp(x) = e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)})`.
//!   Hence `Δ_j = χ(|k|/2^{j+1}) - χ(|k|/2^j)` is supported in
//!   `2^{j-1} < |k| < 2^{j+1}` and every nonzero `k` is shared by exactly
//!   the two blocks around it with weights summing to one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{synthesize, Field, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Cutoff {
    #[default]
    Sharp,
    Smooth,
}

/// The C^∞ step from 0 (at `x <= 0`) to 1 (at `x >= 1`).
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

/// Radial profile of the smooth low-pass `S₀`, evaluated at `r = |k|`.
pub fn smooth_low_pass(r: f64) -> f64 {
    if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        smooth_step(2.0 - 2.0 * r)
    }
}

/// Integer `j` with `4^j <= ksq < 4^{j+1}` (requires `ksq >= 1`).
fn dyadic_index(ksq: u64) -> usize {
    ((63 - ksq.leading_zeros()) / 2) as usize
}

#[derive(Clone, Debug)]
pub struct DyadicPartition {
    grid: Grid,
    mode: Cutoff,
    jmax: usize,
    /// Per mode: the `j` with `2^j <= |k| < 2^{j+1}` (unused for `k = 0`).
    base: Vec<u8>,
    /// Per mode: multiplier of block `base`; block `base + 1` gets `1 - w`.
    weight: Vec<f64>,
}

impl DyadicPartition {
    pub fn new(grid: Grid, mode: Cutoff) -> Self {
        let t = grid.tables();
        let top = grid.nyquist() as f64 * (grid.dim() as f64).sqrt();
        let jmax = top.log2().ceil() as usize;
        let mut base = vec![0u8; grid.len()];
        let mut weight = vec![1.0; grid.len()];
        for idx in 1..grid.len() {
            let ksq = t.ksq[idx] as u64;
            let j = dyadic_index(ksq);
            base[idx] = j as u8;
            if mode == Cutoff::Smooth {
                weight[idx] = smooth_low_pass((ksq as f64).sqrt() / 2f64.powi(j as i32 + 1));
            }
        }
        Self {
            grid,
            mode,
            jmax,
            base,
            weight,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn mode(&self) -> Cutoff {
        self.mode
    }

    /// Largest block index; every resolved frequency satisfies `|k| < 2^jmax`.
    pub fn jmax(&self) -> usize {
        self.jmax
    }

    /// Multiplier of block `j` (`-1` for `S₀`) at storage index `idx`.
    pub fn multiplier(&self, j: i64, idx: usize) -> f64 {
        if idx == 0 {
            return if j == -1 { 1.0 } else { 0.0 };
        }
        if j < 0 {
            return 0.0;
        }
        let b = self.base[idx] as i64;
        if j == b {
            self.weight[idx]
        } else if j == b + 1 {
            1.0 - self.weight[idx]
        } else {
            0.0
        }
    }

    /// Multiplier of `S_j` at storage index `idx`.
    pub fn low_pass_multiplier(&self, j: usize, idx: usize) -> f64 {
        if idx == 0 {
            return 1.0;
        }
        let b = self.base[idx] as usize;
        let w = self.weight[idx];
        let mut m = 0.0;
        if b < j {
            m += w;
        }
        if b + 1 < j {
            m += 1.0 - w;
        }
        m
    }

    fn check<F: Field>(&self, f: &F) -> Result<()> {
        Error::check_grid(self.grid, f.grid())
    }

    fn check_block(&self, j: i64) -> Result<()> {
        if j < -1 || j > self.jmax as i64 {
            return Err(Error::OutOfRange {
                what: "block index",
                index: j,
                lo: -1,
                hi: self.jmax as i64,
            });
        }
        Ok(())
    }
}

/// `Δ_j f`, with `j = -1` giving `S₀ f`.
pub fn block<F: Field>(f: &F, j: i64, p: &DyadicPartition) -> Result<F> {
    p.check(f)?;
    p.check_block(j)?;
    Ok(f.map_multiplier(|idx| p.multiplier(j, idx)))
}

/// `S_j f = S₀ f + Σ_{m<j} Δ_m f` for `0 <= j <= jmax + 1`.
pub fn low_pass<F: Field>(f: &F, j: usize, p: &DyadicPartition) -> Result<F> {
    p.check(f)?;
    if j > p.jmax + 1 {
        return Err(Error::OutOfRange {
            what: "low-pass index",
            index: j as i64,
            lo: 0,
            hi: p.jmax as i64 + 1,
        });
    }
    Ok(f.map_multiplier(|idx| p.low_pass_multiplier(j, idx)))
}

/// `‖S₀ f‖_∞` followed by `‖Δ_j f‖_∞` for `j = 0..=jmax`, with `|·|` the
/// pointwise Euclidean length over components.
pub fn block_sup_norms<F: Field>(f: &F, p: &DyadicPartition) -> Result<Vec<f64>> {
    p.check(f)?;
    let grid = f.grid();
    let mut norms = vec![0.0; p.jmax + 2];
    // two blocks per batch keeps the transforms paired without holding every block
    let slots: Vec<usize> = (0..=p.jmax + 1).collect();
    for batch in slots.chunks(2) {
        let mut arrays: Vec<Vec<Complex64>> = Vec::new();
        let mut owner: Vec<usize> = Vec::new();
        for &slot in batch {
            let j = slot as i64 - 1;
            let mut block_arrays = Vec::new();
            let mut any = false;
            for comp in f.components() {
                let arr: Vec<Complex64> = comp
                    .iter()
                    .enumerate()
                    .map(|(idx, c)| c * p.multiplier(j, idx))
                    .collect();
                any |= arr.iter().any(|c| c.re != 0.0 || c.im != 0.0);
                block_arrays.push(arr);
            }
            if any {
                owner.extend(std::iter::repeat(slot).take(block_arrays.len()));
                arrays.extend(block_arrays);
            }
        }
        if arrays.is_empty() {
            continue;
        }
        let refs: Vec<&[Complex64]> = arrays.iter().map(|a| a.as_slice()).collect();
        let samples = synthesize(grid, &refs);
        drop(arrays);
        for &slot in batch {
            let mut sq = vec![0.0; grid.len()];
            let mut seen = false;
            for (s, _) in samples.iter().zip(&owner).filter(|(_, &o)| o == slot) {
                seen = true;
                for (acc, v) in sq.iter_mut().zip(s) {
                    *acc += v * v;
                }
            }
            if seen {
                norms[slot] = sq.into_iter().fold(0.0, f64::max).sqrt();
            }
        }
    }
    Ok(norms)
}

/// Besov norm from precomputed block sup-norms.
pub fn besov_from_blocks(norms: &[f64], s: f64) -> f64 {
    norms
        .iter()
        .enumerate()
        .map(|(slot, &n)| {
            if slot == 0 {
                n
            } else {
                2f64.powf((slot - 1) as f64 * s) * n
            }
        })
        .fold(0.0, f64::max)
}

/// `max(‖S₀f‖_∞, max_j 2^{js} ‖Δ_j f‖_∞)`.
pub fn besov_norm<F: Field>(f: &F, s: f64, p: &DyadicPartition) -> Result<f64> {
    Ok(besov_from_blocks(&block_sup_norms(f, p)?, s))
}

pub fn besov_distance<F: Field>(f: &F, g: &F, s: f64, p: &DyadicPartition) -> Result<f64> {
    let diff = f.zip_with(g, |a, b| a - b)?;
    besov_norm(&diff, s, p)
}
