use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::Grid;
use crate::error::{Error, Result};

/// Common access to multi-component spectral fields.
///
/// Every component is a dense array of `grid.len()` Fourier coefficients
/// `c(k)` with `f(x) = Σ_k c(k) e^{i k·x}`.
pub trait Field: Sized + Clone {
    /// Number of components a field of this kind carries on `grid`.
    fn component_count(grid: Grid) -> usize;

    fn grid(&self) -> Grid;
    fn components(&self) -> &[Vec<Complex64>];
    fn components_mut(&mut self) -> &mut [Vec<Complex64>];
    fn into_components(self) -> Vec<Vec<Complex64>>;

    /// Assemble a field from raw components, checking the shape.
    fn from_components(grid: Grid, comps: Vec<Vec<Complex64>>) -> Result<Self>;

    fn zeros(grid: Grid) -> Self {
        let comps = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; Self::component_count(grid)];
        Self::from_components(grid, comps).expect("shape is correct by construction")
    }

    /// Apply a real multiplier `m(idx)` to every component.
    fn map_multiplier(&self, m: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for comp in out.components_mut() {
            for (idx, c) in comp.iter_mut().enumerate() {
                *c *= m(idx);
            }
        }
        out
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        Error::check_grid(self.grid(), other.grid())?;
        let mut out = self.clone();
        for (oc, bc) in out.components_mut().iter_mut().zip(other.components()) {
            for (o, &b) in oc.iter_mut().zip(bc) {
                *o = f(*o, b);
            }
        }
        Ok(out)
    }

    fn scaled(&self, factor: f64) -> Self {
        self.map_multiplier(|_| factor)
    }

    /// `self + a·other`.
    fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y * a)
    }

    /// Largest coefficient modulus over all components.
    fn max_coeff(&self) -> f64 {
        self.components()
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest coefficient-wise modulus of `self - other`.
    fn max_coeff_diff(&self, other: &Self) -> Result<f64> {
        Error::check_grid(self.grid(), other.grid())?;
        Ok(self
            .components()
            .iter()
            .zip(other.components())
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max))
    }

    fn is_finite(&self) -> bool {
        self.components()
            .iter()
            .flat_map(|c| c.iter())
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest violation of `c(-k) = conj(c(k))`.
    fn hermitian_defect(&self) -> f64 {
        let t = self.grid().tables();
        self.components()
            .iter()
            .flat_map(|c| {
                let t = &t;
                c.iter()
                    .enumerate()
                    .map(move |(idx, v)| (v - c[t.neg[idx] as usize].conj()).norm())
            })
            .fold(0.0, f64::max)
    }

    /// Set the k = 0 coefficient of every component to zero.
    fn mean_zero(mut self) -> Self {
        for c in self.components_mut() {
            c[0] = Complex64::new(0.0, 0.0);
        }
        self
    }
}

macro_rules! field_type {
    ($(#[$meta:meta])* $name:ident, $count:expr) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name {
            grid: Grid,
            comps: Vec<Vec<Complex64>>,
        }

        impl Field for $name {
            fn component_count(grid: Grid) -> usize {
                let count: fn(Grid) -> usize = $count;
                count(grid)
            }

            fn grid(&self) -> Grid {
                self.grid
            }

            fn components(&self) -> &[Vec<Complex64>] {
                &self.comps
            }

            fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
                &mut self.comps
            }

            fn into_components(self) -> Vec<Vec<Complex64>> {
                self.comps
            }

            fn from_components(grid: Grid, comps: Vec<Vec<Complex64>>) -> Result<Self> {
                let want = Self::component_count(grid);
                if comps.len() != want {
                    return Err(Error::Shape(format!(
                        "{} expects {want} components, got {}",
                        stringify!($name),
                        comps.len()
                    )));
                }
                if let Some(bad) = comps.iter().find(|c| c.len() != grid.len()) {
                    return Err(Error::Shape(format!(
                        "component has {} coefficients, grid {} needs {}",
                        bad.len(),
                        grid,
                        grid.len()
                    )));
                }
                Ok(Self { grid, comps })
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, rhs: &$name) -> $name {
                self.zip_with(rhs, |a, b| a + b).expect("grid mismatch in addition")
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: &$name) -> $name {
                self.zip_with(rhs, |a, b| a - b).expect("grid mismatch in subtraction")
            }
        }

        impl Mul<f64> for &$name {
            type Output = $name;
            fn mul(self, rhs: f64) -> $name {
                self.scaled(rhs)
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                self.scaled(-1.0)
            }
        }
    };
}

field_type!(
    /// An `n`-component velocity-like field in Fourier space.
    SpectralVectorField,
    |g| g.dim()
);

field_type!(
    /// An `n×n`-component field; entry `(a, b)` is component `a·n + b`.
    TensorField,
    |g| g.dim() * g.dim()
);

field_type!(
    /// A single-component field.
    ScalarField,
    |_| 1
);

impl SpectralVectorField {
    pub fn component(&self, a: usize) -> ScalarField {
        ScalarField {
            grid: self.grid,
            comps: vec![self.comps[a].clone()],
        }
    }

    pub fn from_scalars(parts: Vec<ScalarField>) -> Result<Self> {
        let grid = parts
            .first()
            .map(|p| p.grid)
            .ok_or_else(|| Error::Shape("no components".into()))?;
        let mut comps = Vec::with_capacity(parts.len());
        for p in parts {
            Error::check_grid(grid, p.grid)?;
            comps.extend(p.comps);
        }
        Self::from_components(grid, comps)
    }

    /// Set a single coefficient of component `a` at wavevector `k`, together
    /// with its conjugate partner so the field stays real.
    pub fn set_mode(&mut self, a: usize, k: &[i64], value: Complex64) {
        let idx = self.grid.index_of(k);
        let neg: Vec<i64> = k.iter().map(|x| -x).collect();
        let nidx = self.grid.index_of(&neg);
        self.comps[a][idx] = value;
        self.comps[a][nidx] = value.conj();
        if idx == nidx {
            self.comps[a][idx] = Complex64::new(value.re, 0.0);
        }
    }

    /// Relative divergence defect: `max_k |k·c(k)| / max_k |k||c(k)|`
    /// (zero for the zero field).
    pub fn divergence_defect(&self) -> f64 {
        let t = self.grid.tables();
        let dim = self.grid.dim();
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for idx in 0..self.grid.len() {
            let k = t.kvec[idx];
            let mut dot = Complex64::new(0.0, 0.0);
            let mut mag = 0.0;
            for a in 0..dim {
                dot += self.comps[a][idx] * k[a] as f64;
                mag += self.comps[a][idx].norm_sqr();
            }
            num = num.max(dot.norm());
            den = den.max(mag.sqrt() * t.ksq[idx].sqrt());
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

impl TensorField {
    pub fn entry(&self, a: usize, b: usize) -> &[Complex64] {
        &self.comps[a * self.grid.dim() + b]
    }

    pub fn entry_field(&self, a: usize, b: usize) -> ScalarField {
        ScalarField {
            grid: self.grid,
            comps: vec![self.entry(a, b).to_vec()],
        }
    }

    pub fn from_entries(grid: Grid, entries: Vec<ScalarField>) -> Result<Self> {
        let mut comps = Vec::with_capacity(entries.len());
        for e in entries {
            Error::check_grid(grid, e.grid)?;
            comps.extend(e.comps);
        }
        Self::from_components(grid, comps)
    }

    pub fn transpose(&self) -> Self {
        let n = self.grid.dim();
        let comps = (0..n * n)
            .map(|ab| self.comps[(ab % n) * n + ab / n].clone())
            .collect();
        Self {
            grid: self.grid,
            comps,
        }
    }
}

impl ScalarField {
    pub fn coeffs(&self) -> &[Complex64] {
        &self.comps[0]
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::from_components(grid, vec![coeffs])
    }
}
