//! Two-term (weakened) Bony paraproducts
//! `π_i(f ⊗ g) = Σ_{k=0}^{jmax} S_{k+i}(f) ⊗ Δ_k(g)`, `i ∈ {0, 1}`.
//!
//! Products are dealiased exactly like [`pointwise_tensor`]: factors are
//! truncated by the 2/3 rule and the accumulated product is truncated
//! again after the forward transform.
//!
//! [`pointwise_tensor`]: crate::spectral::pointwise_tensor

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::littlewood_paley::DyadicPartition;
use crate::spectral::{
    dealias, products_to_spectral, synthesize, Field, Grid, ScalarField, SpectralVectorField,
    TensorField,
};

/// Which paraproduct: `π₀` pairs `S_k` with `Δ_k`, `π₁` pairs `S_{k+1}` with `Δ_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    Zero,
    One,
}

impl Shift {
    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            0 => Ok(Shift::Zero),
            1 => Ok(Shift::One),
            _ => Err(Error::InvalidArgument(format!(
                "paraproduct index must be 0 or 1, got {i}"
            ))),
        }
    }
}

/// Physical samples of `Δ_k` of every array for one block index.
fn block_samples(
    grid: Grid,
    p: &DyadicPartition,
    arrays: &[Vec<Complex64>],
    j: i64,
) -> Option<Vec<Vec<f64>>> {
    let blocks: Vec<Vec<Complex64>> = arrays
        .iter()
        .map(|a| {
            a.iter()
                .enumerate()
                .map(|(idx, c)| c * p.multiplier(j, idx))
                .collect()
        })
        .collect();
    let nonzero = blocks
        .iter()
        .any(|b| b.iter().any(|c| c.re != 0.0 || c.im != 0.0));
    if !nonzero {
        return None;
    }
    let refs: Vec<&[Complex64]> = blocks.iter().map(|b| b.as_slice()).collect();
    Some(synthesize(grid, &refs))
}

fn fma_into(acc: &mut [f64], x: &[f64], y: &[f64]) {
    for ((a, &u), &v) in acc.iter_mut().zip(x).zip(y) {
        *a += u * v;
    }
}

fn add_into(acc: &mut [f64], x: &[f64]) {
    for (a, &u) in acc.iter_mut().zip(x) {
        *a += u;
    }
}

fn dealiased_arrays<F: Field>(f: &F) -> Vec<Vec<Complex64>> {
    dealias(f).into_components()
}

/// Samples of `Σ_k S_{k+i}(f_a) Δ_k(g_b)` for every pair `(a, b)`, row-major in `a`.
fn paraproduct_samples(
    shift: Shift,
    grid: Grid,
    f: &[Vec<Complex64>],
    g: &[Vec<Complex64>],
    p: &DyadicPartition,
) -> Vec<Vec<f64>> {
    let len = grid.len();
    let mut acc = vec![vec![0.0; len]; f.len() * g.len()];
    // running S_k(f_a), starting from S₀
    let mut low = block_samples(grid, p, f, -1).unwrap_or_else(|| vec![vec![0.0; len]; f.len()]);
    for k in 0..=p.jmax() as i64 {
        let df = block_samples(grid, p, f, k);
        if shift == Shift::One {
            if let Some(df) = &df {
                low.iter_mut().zip(df).for_each(|(l, d)| add_into(l, d));
            }
        }
        if let Some(dg) = block_samples(grid, p, g, k) {
            for (a, la) in low.iter().enumerate() {
                for (b, gb) in dg.iter().enumerate() {
                    fma_into(&mut acc[a * g.len() + b], la, gb);
                }
            }
        }
        if shift == Shift::Zero {
            if let Some(df) = &df {
                low.iter_mut().zip(df).for_each(|(l, d)| add_into(l, d));
            }
        }
    }
    acc
}

fn to_coeffs(grid: Grid, samples: Vec<Vec<f64>>) -> Vec<Vec<Complex64>> {
    let refs: Vec<&[f64]> = samples.iter().map(|s| s.as_slice()).collect();
    products_to_spectral(grid, &refs)
}

/// `π_i(φ, ψ) = Σ_{k=0}^{jmax} S_{k+i}(φ) Δ_k(ψ)` for scalar fields.
pub fn scalar_paraproduct(
    i: usize,
    phi: &ScalarField,
    psi: &ScalarField,
    p: &DyadicPartition,
) -> Result<ScalarField> {
    let shift = Shift::from_index(i)?;
    Error::check_grid(phi.grid(), psi.grid())?;
    Error::check_grid(p.grid(), phi.grid())?;
    let grid = phi.grid();
    let s = paraproduct_samples(
        shift,
        grid,
        &dealiased_arrays(phi),
        &dealiased_arrays(psi),
        p,
    );
    ScalarField::from_components(grid, to_coeffs(grid, s))
}

/// Entry `(a, b)` is `π_i(f_a, g_b)`.
pub fn tensor_paraproduct(
    i: usize,
    f: &SpectralVectorField,
    g: &SpectralVectorField,
    p: &DyadicPartition,
) -> Result<TensorField> {
    let shift = Shift::from_index(i)?;
    Error::check_grid(f.grid(), g.grid())?;
    Error::check_grid(p.grid(), f.grid())?;
    let grid = f.grid();
    let s = paraproduct_samples(shift, grid, &dealiased_arrays(f), &dealiased_arrays(g), p);
    TensorField::from_components(grid, to_coeffs(grid, s))
}

/// The split `h ⊗ g = A + B` with `A = π₀(h ⊗ g)` and
/// `B_{ab} = π₁(g_b, h_a)`.
///
/// For mean-zero inputs the identity is exact in sharp mode, because every
/// block pair `(Δ_m h_a, Δ_k g_b)` lands in `A` when `m < k` and in `B`
/// otherwise. `B` is assembled entrywise rather than as the transpose of
/// `π₁(g ⊗ h)`, which is the arrangement under which the identity holds.
pub fn bony_split(
    h: &SpectralVectorField,
    g: &SpectralVectorField,
    p: &DyadicPartition,
) -> Result<(TensorField, TensorField)> {
    Error::check_grid(h.grid(), g.grid())?;
    Error::check_grid(p.grid(), h.grid())?;
    let grid = h.grid();
    let n = grid.dim();
    let len = grid.len();
    let hc = dealiased_arrays(h);
    let gc = dealiased_arrays(g);
    let mut acc_a = vec![vec![0.0; len]; n * n];
    let mut acc_b = vec![vec![0.0; len]; n * n];
    let zero = || vec![vec![0.0; len]; n];
    let mut low_h = block_samples(grid, p, &hc, -1).unwrap_or_else(zero);
    let mut low_g = block_samples(grid, p, &gc, -1).unwrap_or_else(zero);
    for k in 0..=p.jmax() as i64 {
        let dh = block_samples(grid, p, &hc, k);
        let dg = block_samples(grid, p, &gc, k);
        if let Some(dg) = &dg {
            // A_ab += S_k(h_a) Δ_k(g_b)
            for a in 0..n {
                for b in 0..n {
                    fma_into(&mut acc_a[a * n + b], &low_h[a], &dg[b]);
                }
            }
            low_g.iter_mut().zip(dg).for_each(|(l, d)| add_into(l, d));
        }
        if let Some(dh) = &dh {
            // B_ab += S_{k+1}(g_b) Δ_k(h_a)
            for a in 0..n {
                for b in 0..n {
                    fma_into(&mut acc_b[a * n + b], &low_g[b], &dh[a]);
                }
            }
            low_h.iter_mut().zip(dh).for_each(|(l, d)| add_into(l, d));
        }
    }
    Ok((
        TensorField::from_components(grid, to_coeffs(grid, acc_a))?,
        TensorField::from_components(grid, to_coeffs(grid, acc_b))?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::{block, Cutoff};
    use crate::spectral::pointwise_tensor;

    fn mode(g: Grid, a: usize, k: &[i64], re: f64, im: f64) -> SpectralVectorField {
        let mut f = SpectralVectorField::zeros(g);
        f.set_mode(a, k, Complex64::new(re, im));
        f
    }

    #[test]
    fn sharp_single_modes() {
        let g = Grid::new(2, 32).unwrap();
        let p = DyadicPartition::new(g, Cutoff::Sharp);
        let phi = mode(g, 0, &[2, 0], 0.5, 0.0).component(0); // block 1
        let psi = mode(g, 0, &[8, 0], 0.0, -0.5).component(0); // block 3
        let prod = pointwise_tensor(
            &SpectralVectorField::from_scalars(vec![phi.clone(), phi.clone()]).unwrap(),
            &SpectralVectorField::from_scalars(vec![psi.clone(), psi.clone()]).unwrap(),
        )
        .unwrap()
        .entry_field(0, 0);
        let pi0 = scalar_paraproduct(0, &phi, &psi, &p).unwrap();
        assert!(pi0.max_coeff_diff(&prod).unwrap() < 1e-15);
        assert!(prod.max_coeff() > 0.1);
        let swapped = scalar_paraproduct(0, &psi, &phi, &p).unwrap();
        assert_eq!(swapped.max_coeff(), 0.0);
    }

    #[test]
    fn zero_inputs() {
        let g = Grid::new(2, 16).unwrap();
        let p = DyadicPartition::new(g, Cutoff::Smooth);
        let z = ScalarField::zeros(g);
        let phi = mode(g, 0, &[1, 2], 0.3, 0.2).component(0);
        for i in 0..2 {
            assert_eq!(
                scalar_paraproduct(i, &z, &phi, &p).unwrap().max_coeff(),
                0.0
            );
            assert_eq!(
                scalar_paraproduct(i, &phi, &z, &p).unwrap().max_coeff(),
                0.0
            );
        }
        assert!(scalar_paraproduct(2, &phi, &z, &p).is_err());
        let zv = SpectralVectorField::zeros(g);
        let (a, b) = bony_split(&zv, &zv, &p).unwrap();
        assert_eq!(a.max_coeff() + b.max_coeff(), 0.0);
    }

    #[test]
    fn bilinear() {
        let g = Grid::new(2, 16).unwrap();
        let p = DyadicPartition::new(g, Cutoff::Smooth);
        let f1 = (&mode(g, 0, &[1, 1], 0.3, 0.1) + &mode(g, 0, &[3, -1], 0.0, 0.2)).component(0);
        let f2 = (&mode(g, 0, &[2, 0], -0.4, 0.0) + &mode(g, 0, &[0, 4], 0.1, 0.5)).component(0);
        let psi = (&mode(g, 0, &[4, 1], 0.3, -0.3) + &mode(g, 0, &[1, 0], 0.2, 0.0)).component(0);
        for i in 0..2 {
            let lhs = scalar_paraproduct(i, &f1.axpy(-2.5, &f2).unwrap(), &psi, &p).unwrap();
            let rhs = scalar_paraproduct(i, &f1, &psi, &p)
                .unwrap()
                .axpy(-2.5, &scalar_paraproduct(i, &f2, &psi, &p).unwrap())
                .unwrap();
            assert!(lhs.max_coeff_diff(&rhs).unwrap() < 1e-12);
        }
    }

    /// Brute force: `π_i = Σ_k Σ_{m < k+i} Δ_m f ⊗ Δ_k g` from blockwise products.
    #[test]
    fn tensor_matches_double_block_sum() {
        let g = Grid::new(2, 16).unwrap();
        for cutoff in [Cutoff::Sharp, Cutoff::Smooth] {
            let p = DyadicPartition::new(g, cutoff);
            let f = &(&mode(g, 0, &[1, 2], 0.3, 0.1) + &mode(g, 1, &[3, -1], 0.0, 0.2))
                + &mode(g, 0, &[5, 0], 0.1, 0.1);
            let h = &(&mode(g, 1, &[0, 1], -0.2, 0.4) + &mode(g, 0, &[2, 2], 0.5, 0.0))
                + &mode(g, 1, &[-4, 3], 0.0, -0.3);
            for i in 0..2i64 {
                let fast = tensor_paraproduct(i as usize, &f, &h, &p).unwrap();
                let mut brute = TensorField::zeros(g);
                for k in 0..=p.jmax() as i64 {
                    let dk = block(&h, k, &p).unwrap();
                    for m in -1..(k + i).min(p.jmax() as i64 + 1) {
                        let dm = block(&f, m, &p).unwrap();
                        brute = &brute + &pointwise_tensor(&dm, &dk).unwrap();
                    }
                }
                assert!(
                    fast.max_coeff_diff(&brute).unwrap() < 1e-14,
                    "{cutoff:?} i={i}"
                );
            }
        }
    }

    #[test]
    fn split_reconstructs_product() {
        let g = Grid::new(3, 16).unwrap();
        let p = DyadicPartition::new(g, Cutoff::Sharp);
        let h = &(&mode(g, 0, &[1, 2, 0], 0.3, 0.1) + &mode(g, 1, &[3, -1, 2], 0.0, 0.2))
            + &mode(g, 2, &[0, 0, 5], 0.1, 0.1);
        let gg = &mode(g, 1, &[0, 1, 1], -0.2, 0.4) + &mode(g, 2, &[4, 0, -3], 0.5, 0.0);
        let (a, b) = bony_split(&h, &gg, &p).unwrap();
        let full = pointwise_tensor(&h, &gg).unwrap();
        let err = (&a + &b).max_coeff_diff(&full).unwrap() / full.max_coeff();
        assert!(err < 1e-13);
    }

    #[test]
    fn split_of_separated_modes_is_one_sided() {
        let g = Grid::new(2, 32).unwrap();
        let p = DyadicPartition::new(g, Cutoff::Sharp);
        let low = mode(g, 0, &[1, 0], 0.5, 0.0);
        let high = mode(g, 1, &[0, 9], 0.0, 0.5);
        let (a, b) = bony_split(&low, &high, &p).unwrap();
        assert!(a.max_coeff() > 0.0);
        assert_eq!(b.max_coeff(), 0.0);
        let (a, b) = bony_split(&high, &low, &p).unwrap();
        assert_eq!(a.max_coeff(), 0.0);
        assert!(b.max_coeff() > 0.0);
    }
}
