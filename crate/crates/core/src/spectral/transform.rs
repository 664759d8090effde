//! Discrete Fourier transform pair between samples and coefficients.
//!
//! Real fields are transformed two at a time by packing them into the real
//! and imaginary parts of one complex array.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::{Field, Grid, SpectralVectorField};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let plans = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = plans.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((len, direction == FftDirection::Forward))
        .or_insert_with(|| FftPlanner::new().plan_fft(len, direction))
        .clone()
}

/// Columns gathered per batch when transforming a strided axis.
const BATCH: usize = 16;

/// Unnormalized in-place n-dimensional transform of a row-major array.
pub(crate) fn fft_nd(grid: Grid, buf: &mut [Complex64], direction: FftDirection) {
    let n = grid.res();
    let fft = plan(n, direction);
    let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
    fft.process_with_scratch(buf, &mut scratch);
    let mut tmp = vec![ZERO; n * BATCH];
    for axis in 0..grid.dim() - 1 {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        for chunk in buf.chunks_mut(n * stride) {
            for j0 in (0..stride).step_by(BATCH) {
                let width = BATCH.min(stride - j0);
                let t = &mut tmp[..n * width];
                for i in 0..n {
                    let row = &chunk[i * stride + j0..i * stride + j0 + width];
                    for (j, &v) in row.iter().enumerate() {
                        t[j * n + i] = v;
                    }
                }
                fft.process_with_scratch(t, &mut scratch);
                for i in 0..n {
                    let row = &mut chunk[i * stride + j0..i * stride + j0 + width];
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = t[j * n + i];
                    }
                }
            }
        }
    }
}

/// Synthesize real samples from Hermitian coefficient arrays.
pub(crate) fn inverse_real(grid: Grid, comps: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(comps.len());
    let mut buf = vec![ZERO; grid.len()];
    for pair in comps.chunks(2) {
        match pair {
            [a, b] => {
                for ((z, &x), &y) in buf.iter_mut().zip(a.iter()).zip(b.iter()) {
                    *z = Complex64::new(x.re - y.im, x.im + y.re);
                }
            }
            [a] => buf.copy_from_slice(a),
            _ => unreachable!(),
        }
        fft_nd(grid, &mut buf, FftDirection::Inverse);
        out.push(buf.iter().map(|z| z.re).collect());
        if pair.len() == 2 {
            out.push(buf.iter().map(|z| z.im).collect());
        }
    }
    out
}

/// Analyse real samples into coefficient arrays (normalized by the grid size).
pub(crate) fn forward_real(grid: Grid, comps: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let tables = grid.tables();
    let scale = 1.0 / grid.len() as f64;
    let mut out = Vec::with_capacity(comps.len());
    let mut buf = vec![ZERO; grid.len()];
    for pair in comps.chunks(2) {
        match pair {
            [a, b] => {
                for ((z, &x), &y) in buf.iter_mut().zip(a.iter()).zip(b.iter()) {
                    *z = Complex64::new(x, y);
                }
            }
            [a] => {
                for (z, &x) in buf.iter_mut().zip(a.iter()) {
                    *z = Complex64::new(x, 0.0);
                }
            }
            _ => unreachable!(),
        }
        fft_nd(grid, &mut buf, FftDirection::Forward);
        if pair.len() == 1 {
            out.push(buf.iter().map(|z| z * scale).collect());
            continue;
        }
        let mut a = vec![ZERO; grid.len()];
        let mut b = vec![ZERO; grid.len()];
        for idx in 0..grid.len() {
            let z = buf[idx];
            let zn = buf[tables.neg[idx] as usize].conj();
            a[idx] = (z + zn) * (0.5 * scale);
            let d = (z - zn) * (0.5 * scale);
            // (z - conj z(-k)) / 2i
            b[idx] = Complex64::new(d.im, -d.re);
        }
        out.push(a);
        out.push(b);
    }
    out
}

/// Real samples of a multi-component field on the grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    comps: Vec<Vec<f64>>,
}

impl PhysicalField {
    pub fn new(grid: Grid, comps: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(bad) = comps.iter().find(|c| c.len() != grid.len()) {
            return Err(Error::Shape(format!(
                "sample array has {} entries, grid {} needs {}",
                bad.len(),
                grid,
                grid.len()
            )));
        }
        Ok(Self { grid, comps })
    }

    /// Sample `f(x, out)` at every grid point into `count` components.
    pub fn sample(grid: Grid, count: usize, f: impl Fn([f64; 3], &mut [f64])) -> Self {
        let mut comps = vec![vec![0.0; grid.len()]; count];
        let mut val = vec![0.0; count];
        for idx in 0..grid.len() {
            val.iter_mut().for_each(|v| *v = 0.0);
            f(grid.point(idx), &mut val);
            for (c, &v) in comps.iter_mut().zip(&val) {
                c[idx] = v;
            }
        }
        Self { grid, comps }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.comps
    }

    /// Euclidean length of the component vector at every grid point.
    pub fn magnitudes(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for c in &self.comps {
            for (o, v) in out.iter_mut().zip(c) {
                *o += v * v;
            }
        }
        out.iter_mut().for_each(|o| *o = o.sqrt());
        out
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitudes().into_iter().fold(0.0, f64::max)
    }

    /// Transform into a spectral field of kind `F`.
    pub fn to_field<F: Field>(&self) -> Result<F> {
        let refs: Vec<&[f64]> = self.comps.iter().map(|c| c.as_slice()).collect();
        F::from_components(self.grid, forward_real(self.grid, &refs))
    }
}

/// Samples of `f` on the grid points.
pub fn to_physical<F: Field>(f: &F) -> PhysicalField {
    let refs: Vec<&[Complex64]> = f.components().iter().map(|c| c.as_slice()).collect();
    PhysicalField {
        grid: f.grid(),
        comps: inverse_real(f.grid(), &refs),
    }
}

/// Fourier coefficients of an `n`-component sample array.
pub fn to_spectral(samples: &PhysicalField) -> Result<SpectralVectorField> {
    samples.to_field()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(grid: Grid, samples: &[f64]) -> Vec<Complex64> {
        let t = grid.tables();
        (0..grid.len())
            .map(|kidx| {
                let k = t.kvec[kidx];
                let mut acc = ZERO;
                for (x, &v) in samples.iter().enumerate() {
                    let p = grid.point(x);
                    let phase = -(k[0] as f64 * p[0] + k[1] as f64 * p[1] + k[2] as f64 * p[2]);
                    acc += Complex64::from_polar(v, phase);
                }
                acc / grid.len() as f64
            })
            .collect()
    }

    #[test]
    fn forward_matches_naive_dft() {
        let g = Grid::new(2, 8).unwrap();
        let a: Vec<f64> = (0..64)
            .map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0)
            .collect();
        let b: Vec<f64> = (0..64).map(|i| ((i * 13 % 7) as f64).sin()).collect();
        let out = forward_real(g, &[&a, &b]);
        for (got, samples) in out.iter().zip([&a, &b]) {
            let want = naive_dft(g, samples);
            for (x, y) in got.iter().zip(&want) {
                assert!((x - y).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn single_mode_is_cosine() {
        let g = Grid::new(2, 16).unwrap();
        let mut f = SpectralVectorField::zeros(g);
        f.set_mode(0, &[1, 0], Complex64::new(0.5, 0.0));
        let p = to_physical(&f);
        for idx in 0..g.len() {
            let x = g.point(idx);
            assert!((p.components()[0][idx] - x[0].cos()).abs() < 1e-14);
            assert!(p.components()[1][idx].abs() < 1e-15);
        }
    }

    #[test]
    fn zero_field_gives_zero_samples() {
        let g = Grid::new(3, 8).unwrap();
        let p = to_physical(&SpectralVectorField::zeros(g));
        assert!(p.components().iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn sample_shape_mismatch() {
        let g = Grid::new(2, 8).unwrap();
        assert!(PhysicalField::new(g, vec![vec![0.0; 10]]).is_err());
        let p = PhysicalField::new(g, vec![vec![0.0; 64]; 3]).unwrap();
        assert!(to_spectral(&p).is_err());
    }
}
