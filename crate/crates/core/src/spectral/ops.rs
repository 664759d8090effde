use num_complex::Complex64;

use super::transform::{forward_real, inverse_real};
use super::{
    to_physical, Field, Grid, PhysicalField, ScalarField, SpectralVectorField, TensorField,
};
use crate::error::{Error, Result};

/// `∂f/∂x_axis`: multiply every coefficient by `i k_axis`.
///
/// The Nyquist plane of the differentiated axis is zeroed so the result
/// stays real.
pub fn derivative<F: Field>(f: &F, axis: usize) -> Result<F> {
    let grid = f.grid();
    if axis >= grid.dim() {
        return Err(Error::Axis {
            axis,
            dim: grid.dim(),
        });
    }
    let t = grid.tables();
    let nyq = grid.nyquist() as i32;
    let mut out = f.clone();
    for comp in out.components_mut() {
        for (idx, c) in comp.iter_mut().enumerate() {
            let k = t.kvec[idx][axis];
            *c = if k.abs() == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(-c.im, c.re) * k as f64
            };
        }
    }
    Ok(out)
}

/// `Σ_a ∂_a f_a`.
pub fn divergence(f: &SpectralVectorField) -> ScalarField {
    let grid = f.grid();
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for a in 0..grid.dim() {
        let d = derivative(&f.component(a), a).expect("axis < dim");
        for (x, y) in acc.iter_mut().zip(d.coeffs()) {
            *x += y;
        }
    }
    ScalarField::from_coeffs(grid, acc).expect("shape is correct")
}

/// Zero every mode with some `|k_i| > N/3`.
pub fn dealias<F: Field>(f: &F) -> F {
    let t = f.grid().tables();
    f.map_multiplier(|idx| if t.keep[idx] { 1.0 } else { 0.0 })
}

pub(crate) fn truncate_in_place(grid: Grid, comps: &mut [Vec<Complex64>]) {
    let t = grid.tables();
    for c in comps {
        for (v, &keep) in c.iter_mut().zip(&t.keep) {
            if !keep {
                *v = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// Dealiased tensor product `u ⊗ v`.
///
/// Both factors are truncated by the 2/3 rule, multiplied on the grid and
/// the product is truncated again, which makes the result the exact
/// Fourier projection of the product of the truncated factors.
pub fn pointwise_tensor(u: &SpectralVectorField, v: &SpectralVectorField) -> Result<TensorField> {
    Error::check_grid(u.grid(), v.grid())?;
    let grid = u.grid();
    let n = grid.dim();
    let up = to_physical(&dealias(u));
    let symmetric = std::ptr::eq(u, v) || u == v;
    let vp = if symmetric {
        up.clone()
    } else {
        to_physical(&dealias(v))
    };
    let mut entries: Vec<Option<Vec<Complex64>>> = vec![None; n * n];
    for a in 0..n {
        for b in 0..n {
            if symmetric && b < a {
                continue;
            }
            let prod: Vec<f64> = up.components()[a]
                .iter()
                .zip(&vp.components()[b])
                .map(|(x, y)| x * y)
                .collect();
            let mut coeffs = forward_real(grid, &[&prod]);
            truncate_in_place(grid, &mut coeffs);
            entries[a * n + b] = coeffs.pop();
        }
    }
    if symmetric {
        for a in 0..n {
            for b in 0..a {
                entries[a * n + b] = entries[b * n + a].clone();
            }
        }
    }
    TensorField::from_components(
        grid,
        entries.into_iter().map(|e| e.expect("filled")).collect(),
    )
}

/// Symmetric `u ⊗ u` with paired transforms; used on the solver hot path.
/// With `truncate = false` the product is formed without the 2/3 rule.
pub(crate) fn self_tensor(u: &SpectralVectorField, truncate: bool) -> TensorField {
    let grid = u.grid();
    let n = grid.dim();
    let up = if truncate {
        to_physical(&dealias(u))
    } else {
        to_physical(u)
    };
    let mut pairs = Vec::new();
    let mut prods = Vec::new();
    for a in 0..n {
        for b in a..n {
            pairs.push((a, b));
            prods.push(
                up.components()[a]
                    .iter()
                    .zip(&up.components()[b])
                    .map(|(x, y)| x * y)
                    .collect::<Vec<f64>>(),
            );
        }
    }
    let refs: Vec<&[f64]> = prods.iter().map(|p| p.as_slice()).collect();
    let mut coeffs = forward_real(grid, &refs);
    if truncate {
        truncate_in_place(grid, &mut coeffs);
    }
    let mut entries = vec![Vec::new(); n * n];
    for ((a, b), c) in pairs.into_iter().zip(coeffs) {
        if a != b {
            entries[b * n + a] = c.clone();
        }
        entries[a * n + b] = c;
    }
    TensorField::from_components(grid, entries).expect("shape is correct")
}

/// Truncated spectra of pointwise products given by their samples.
pub(crate) fn products_to_spectral(grid: Grid, samples: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let mut c = forward_real(grid, samples);
    truncate_in_place(grid, &mut c);
    c
}

/// Samples of many coefficient arrays at once.
pub(crate) fn synthesize(grid: Grid, comps: &[&[Complex64]]) -> Vec<Vec<f64>> {
    inverse_real(grid, comps)
}

/// Discrete Lᵖ norm `((2π/N)^n Σ_x |f(x)|^p)^{1/p}` with `|f(x)|` the
/// Euclidean length over components; `p = ∞` gives the grid maximum.
pub fn lp_norm<F: Field>(f: &F, p: f64) -> Result<f64> {
    lp_norm_physical(&to_physical(f), p)
}

pub fn lp_norm_physical(f: &PhysicalField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "Lp exponent must be >= 1, got {p}"
        )));
    }
    let mags = f.magnitudes();
    if p.is_infinite() {
        return Ok(mags.into_iter().fold(0.0, f64::max));
    }
    let vol = f.grid().cell_volume();
    let sum: f64 = if p == 2.0 {
        mags.iter().map(|m| m * m).sum()
    } else {
        mags.iter().map(|m| m.powf(p)).sum()
    };
    Ok((vol * sum).powf(1.0 / p))
}

/// `(2π)^n Σ_k |c(k)|²`, equal to the squared L² norm by Parseval.
pub fn spectral_energy<F: Field>(f: &F) -> f64 {
    let vol = f.grid().period().powi(f.grid().dim() as i32);
    vol * f
        .components()
        .iter()
        .flat_map(|c| c.iter())
        .map(|c| c.norm_sqr())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::to_spectral;
    use std::collections::HashMap;
    use std::f64::consts::PI;

    fn grid(dim: usize, res: usize) -> Grid {
        Grid::new(dim, res).unwrap()
    }

    fn sampled(g: Grid, f: impl Fn([f64; 3], &mut [f64])) -> SpectralVectorField {
        to_spectral(&PhysicalField::sample(g, g.dim(), f)).unwrap()
    }

    #[test]
    fn derivative_of_sine() {
        let g = grid(2, 16);
        let f = sampled(g, |x, o| o[0] = (3.0 * x[0]).sin());
        let d = derivative(&f, 0).unwrap();
        let p = to_physical(&d);
        for idx in 0..g.len() {
            let x = g.point(idx);
            assert!((p.components()[0][idx] - 3.0 * (3.0 * x[0]).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_along_independent_axis_vanishes() {
        let g = grid(2, 16);
        let f = sampled(g, |x, o| {
            o[0] = x[0].sin() + (2.0 * x[0]).cos();
            o[1] = (5.0 * x[0]).sin();
        });
        assert!(derivative(&f, 1).unwrap().max_coeff() < 1e-15);
        assert!(matches!(derivative(&f, 2), Err(Error::Axis { .. })));
    }

    #[test]
    fn curl_form_field_is_divergence_free() {
        // ψ = sin x₁ sin x₂, u = (∂₂ψ, -∂₁ψ) = (sin x₁ cos x₂, -cos x₁ sin x₂).
        let g = grid(2, 32);
        let u = sampled(g, |x, o| {
            o[0] = x[0].sin() * x[1].cos();
            o[1] = -x[0].cos() * x[1].sin();
        });
        let div = to_physical(&divergence(&u));
        assert!(div.max_magnitude() < 1e-12);
        assert!(u.divergence_defect() < 1e-15);
    }

    #[test]
    fn tensor_of_cosine() {
        let g = grid(2, 32);
        let u = sampled(g, |x, o| o[0] = x[0].cos());
        let t = pointwise_tensor(&u, &u).unwrap();
        let p = to_physical(&t);
        for idx in 0..g.len() {
            let x = g.point(idx);
            let want = 0.5 + 0.5 * (2.0 * x[0]).cos();
            assert!((p.components()[0][idx] - want).abs() < 1e-14);
            for e in 1..4 {
                assert!(p.components()[e][idx].abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tensor_commutes_exactly() {
        let g = grid(3, 8);
        let u = sampled(g, |x, o| {
            o[0] = x[1].sin();
            o[1] = (x[2] + x[0]).cos();
            o[2] = (2.0 * x[0]).sin() * x[1].cos();
        });
        let v = sampled(g, |x, o| {
            o[0] = x[2].cos();
            o[1] = (x[1] - x[0]).sin();
            o[2] = 0.3;
        });
        let uv = pointwise_tensor(&u, &v).unwrap();
        let vu = pointwise_tensor(&v, &u).unwrap();
        assert_eq!(uv.transpose(), vu);
        let uu = pointwise_tensor(&u, &u).unwrap();
        assert_eq!(uu.transpose(), uu);
    }

    /// Products of fields with modes `|k_i| <= N/3` against the direct
    /// convolution of their coefficient lists.
    #[test]
    fn dealiased_product_matches_direct_convolution() {
        let g = grid(2, 16);
        let cut = g.dealias_cutoff();
        let mut u = SpectralVectorField::zeros(g);
        let mut v = SpectralVectorField::zeros(g);
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for k1 in -cut..=cut {
            for k2 in 0..=cut {
                if k2 == 0 && k1 <= 0 {
                    continue;
                }
                for a in 0..2 {
                    u.set_mode(a, &[k1, k2], Complex64::new(next(), next()));
                    v.set_mode(a, &[k1, k2], Complex64::new(next(), next()));
                }
            }
        }
        let t = pointwise_tensor(&u, &v).unwrap();
        let tab = g.tables();
        for a in 0..2 {
            for b in 0..2 {
                let mut conv: HashMap<(i64, i64), Complex64> = HashMap::new();
                for (i, cu) in u.components()[a].iter().enumerate() {
                    if cu.norm() == 0.0 {
                        continue;
                    }
                    for (j, cv) in v.components()[b].iter().enumerate() {
                        if cv.norm() == 0.0 {
                            continue;
                        }
                        let ki = tab.kvec[i];
                        let kj = tab.kvec[j];
                        let key = ((ki[0] + kj[0]) as i64, (ki[1] + kj[1]) as i64);
                        *conv.entry(key).or_default() += cu * cv;
                    }
                }
                let got = t.entry(a, b);
                for idx in 0..g.len() {
                    let k = tab.kvec[idx];
                    let want = if tab.keep[idx] {
                        conv.get(&(k[0] as i64, k[1] as i64))
                            .copied()
                            .unwrap_or_default()
                    } else {
                        Complex64::default()
                    };
                    assert!((got[idx] - want).norm() < 1e-12, "mode {k:?}");
                }
            }
        }
    }

    #[test]
    fn lp_norm_closed_forms() {
        let g = grid(2, 32);
        let c = 1.7;
        let f = sampled(g, |_, o| o[0] = c);
        for p in [1.0, 2.0, 3.0, 7.5] {
            let want = c * (2.0 * PI).powf(2.0 / p);
            assert!((lp_norm(&f, p).unwrap() - want).abs() < 1e-12 * want);
        }
        assert!((lp_norm(&f, f64::INFINITY).unwrap() - c).abs() < 1e-14);

        let s = sampled(g, |x, o| o[0] = x[0].sin());
        assert!((lp_norm(&s, 2.0).unwrap() - PI * 2f64.sqrt()).abs() < 1e-10);

        let z = SpectralVectorField::zeros(g);
        for p in [1.0, 2.0, f64::INFINITY] {
            assert_eq!(lp_norm(&z, p).unwrap(), 0.0);
        }
        assert!(lp_norm(&z, 0.5).is_err());
    }

    #[test]
    fn parseval() {
        let g = grid(3, 16);
        let f = sampled(g, |x, o| {
            o[0] = (x[0] + 2.0 * x[1]).sin() + 0.2 * (3.0 * x[2]).cos();
            o[2] = x[1].cos() * x[2].sin();
        });
        let l2 = lp_norm(&f, 2.0).unwrap();
        assert!((l2 * l2 - spectral_energy(&f)).abs() < 1e-12 * l2 * l2);
    }
}
