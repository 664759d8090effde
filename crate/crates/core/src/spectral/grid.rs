use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2π-periodic grid with `res` points per axis in `dim` dimensions.
///
/// Spectral coefficients are stored densely in row-major order (axis 0
/// slowest). Storage index `m` along an axis maps to the wavenumber
/// `m` for `m < res/2` and `m - res` otherwise, so the Nyquist plane sits
/// at `-res/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    dim: usize,
    res: usize,
}

#[derive(Serialize, Deserialize)]
struct GridSpec {
    dim: usize,
    res: usize,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;
    fn try_from(g: GridSpec) -> Result<Self> {
        Grid::new(g.dim, g.res)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            dim: g.dim,
            res: g.res,
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.res, self.dim)
    }
}

impl Grid {
    pub fn new(dim: usize, res: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Config(format!(
                "dimension must be 2 or 3, got {dim}"
            )));
        }
        if res < 8 || !res.is_power_of_two() {
            return Err(Error::Config(format!(
                "resolution must be a power of two >= 8, got {res}"
            )));
        }
        Ok(Grid { dim, res })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn res(&self) -> usize {
        self.res
    }

    pub fn nyquist(&self) -> usize {
        self.res / 2
    }

    pub fn period(&self) -> f64 {
        2.0 * PI
    }

    /// Number of grid points (and of spectral coefficients per component).
    pub fn len(&self) -> usize {
        self.res.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.res as f64
    }

    /// Quadrature weight of one grid cell, `(2π/N)^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Largest retained wavenumber per axis under the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.res / 3) as i64
    }

    pub fn wavenumber(&self, m: usize) -> i64 {
        if m < self.res / 2 {
            m as i64
        } else {
            m as i64 - self.res as i64
        }
    }

    /// Storage index of the integer wavevector `k` (unused axes ignored).
    pub fn index_of(&self, k: &[i64]) -> usize {
        let n = self.res as i64;
        k[..self.dim].iter().fold(0usize, |acc, &ki| {
            acc * self.res + ki.rem_euclid(n) as usize
        })
    }

    /// Coordinates of physical sample `idx` along each axis.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            out[axis] = (rem % self.res) as f64 * self.spacing();
            rem /= self.res;
        }
        out
    }

    pub(crate) fn tables(&self) -> Arc<GridTables> {
        static CACHE: OnceLock<Mutex<HashMap<Grid, Arc<GridTables>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(*self)
            .or_insert_with(|| Arc::new(GridTables::build(*self)))
            .clone()
    }
}

/// Per-grid lookup tables shared by every field on that grid.
#[derive(Debug)]
pub(crate) struct GridTables {
    /// Integer wavevector per storage index; unused axes are zero.
    pub kvec: Vec<[i32; 3]>,
    /// |k|² per storage index.
    pub ksq: Vec<f64>,
    /// Storage index of -k.
    pub neg: Vec<u32>,
    /// Whether the mode survives the 2/3 rule.
    pub keep: Vec<bool>,
}

impl GridTables {
    fn build(grid: Grid) -> Self {
        let len = grid.len();
        let cut = grid.dealias_cutoff();
        let mut kvec = Vec::with_capacity(len);
        let mut ksq = Vec::with_capacity(len);
        let mut neg = Vec::with_capacity(len);
        let mut keep = Vec::with_capacity(len);
        let mut k = [0i64; 3];
        for idx in 0..len {
            let mut rem = idx;
            for axis in (0..grid.dim).rev() {
                k[axis] = grid.wavenumber(rem % grid.res);
                rem /= grid.res;
            }
            kvec.push([k[0] as i32, k[1] as i32, k[2] as i32]);
            ksq.push(k.iter().map(|&x| (x * x) as f64).sum());
            let negk = [-k[0], -k[1], -k[2]];
            neg.push(grid.index_of(&negk) as u32);
            keep.push(k[..grid.dim].iter().all(|&x| x.abs() <= cut));
        }
        GridTables {
            kvec,
            ksq,
            neg,
            keep,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        let g = Grid::new(2, 32).unwrap();
        assert_eq!((g.dim(), g.res(), g.nyquist()), (2, 32, 16));
        let g = Grid::new(3, 16).unwrap();
        assert_eq!((g.dim(), g.res(), g.nyquist()), (3, 16, 8));
    }

    #[test]
    fn rejects_bad_configuration() {
        assert!(Grid::new(4, 32).is_err());
        assert!(Grid::new(1, 32).is_err());
        assert!(Grid::new(2, 24).is_err());
        assert!(Grid::new(2, 4).is_err());
    }

    #[test]
    fn wavenumbers_and_negation() {
        let g = Grid::new(2, 8).unwrap();
        let ks: Vec<i64> = (0..8).map(|m| g.wavenumber(m)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        let t = g.tables();
        for idx in 0..g.len() {
            let k = t.kvec[idx];
            let back = g.index_of(&[k[0] as i64, k[1] as i64]);
            assert_eq!(back, idx);
            assert_eq!(t.neg[t.neg[idx] as usize] as usize, idx);
        }
    }

    #[test]
    fn serde_validates() {
        let ok: Grid = serde_json::from_str(r#"{"dim":3,"res":16}"#).unwrap();
        assert_eq!(ok, Grid::new(3, 16).unwrap());
        assert!(serde_json::from_str::<Grid>(r#"{"dim":4,"res":16}"#).is_err());
    }
}
