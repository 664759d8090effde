//! Random test fields with controlled Besov and Lebesgue profiles.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::littlewood_paley::{Cutoff, DyadicPartition};
use crate::semigroup::leray_project;
use crate::spectral::{synthesize, Field, Grid, PhysicalField, SpectralVectorField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Independent stream for one check and one trial family.
pub(crate) fn stream(seed: u64, check: u64, family: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(check * 1024 + family);
    rng
}

/// Sharp-annulus index of `|k|² = ksq >= 1`.
fn annulus(ksq: f64) -> usize {
    ((ksq as u64).ilog2() / 2) as usize
}

/// Random Hermitian field whose sharp block `j` (`|k| <= kmax`, inside the
/// 2/3 rule) has sup-norm `2^{-js}·U(0.5, 1)`. The mean is zero.
pub(crate) fn besov_shaped<F: Field>(
    grid: Grid,
    rng: &mut ChaCha8Rng,
    s: f64,
    kmax: f64,
    divfree: bool,
) -> F {
    let t = grid.tables();
    let ncomp = F::component_count(grid);
    let mut comps = vec![vec![ZERO; grid.len()]; ncomp];
    for idx in 1..grid.len() {
        let neg = t.neg[idx] as usize;
        if neg <= idx || !t.keep[idx] || t.ksq[idx] > kmax * kmax {
            continue;
        }
        for c in comps.iter_mut() {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            c[idx] = z;
            c[neg] = z.conj();
        }
    }
    if divfree {
        let v = SpectralVectorField::from_components(grid, comps).expect("vector shape");
        comps = leray_project(&v).into_components();
    }
    let jcount = t.ksq.iter().skip(1).map(|&q| annulus(q)).max().unwrap_or(0) + 1;
    for j in 0..jcount {
        let blocks: Vec<Vec<Complex64>> = comps
            .iter()
            .map(|c| {
                c.iter()
                    .enumerate()
                    .map(|(idx, &v)| {
                        if idx > 0 && annulus(t.ksq[idx]) == j {
                            v
                        } else {
                            ZERO
                        }
                    })
                    .collect()
            })
            .collect();
        let refs: Vec<&[Complex64]> = blocks.iter().map(|b| b.as_slice()).collect();
        let samples = synthesize(grid, &refs);
        let sup = magnitude_sup(&samples);
        if sup == 0.0 {
            continue;
        }
        let target = 2f64.powf(-(j as f64) * s) * rng.gen_range(0.5..1.0);
        let scale = target / sup;
        for c in comps.iter_mut() {
            for (idx, v) in c.iter_mut().enumerate() {
                if idx > 0 && annulus(t.ksq[idx]) == j {
                    *v *= scale;
                }
            }
        }
    }
    F::from_components(grid, comps).expect("shape is correct by construction")
}

fn magnitude_sup(samples: &[Vec<f64>]) -> f64 {
    let mut sq = vec![0.0; samples[0].len()];
    for s in samples {
        for (a, v) in sq.iter_mut().zip(s) {
            *a += v * v;
        }
    }
    sq.into_iter().fold(0.0, f64::max).sqrt()
}

/// Periodized Gaussian bump of width `w` centred at a random point, with a
/// random unit direction per component and the mean removed.
pub(crate) fn bump<F: Field>(grid: Grid, rng: &mut ChaCha8Rng, width: f64) -> F {
    let ncomp = F::component_count(grid);
    let dim = grid.dim();
    let centre: Vec<f64> = (0..dim)
        .map(|_| rng.gen_range(0.0..grid.period()))
        .collect();
    let mut dir: Vec<f64> = (0..ncomp).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let len = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(1e-3);
    dir.iter_mut().for_each(|d| *d /= len);
    let period = grid.period();
    let samples = PhysicalField::sample(grid, ncomp, |x, out| {
        let mut r2 = 0.0;
        for a in 0..dim {
            let d = (x[a] - centre[a]).rem_euclid(period);
            let d = d.min(period - d);
            r2 += d * d;
        }
        let g = (-r2 / (2.0 * width * width)).exp();
        for (o, d) in out.iter_mut().zip(&dir) {
            *o = g * d;
        }
    });
    let f: F = samples.to_field().expect("component count matches");
    crate::spectral::dealias(&f).mean_zero()
}

/// Log-uniform bump width between a few grid spacings and one.
pub(crate) fn bump_width(grid: Grid, rng: &mut ChaCha8Rng) -> f64 {
    let lo = (2.0 * grid.spacing()).ln();
    rng.gen_range(lo..0.0).exp()
}

/// `Δ_j δ` along a random unit direction: the block kernel itself.
pub(crate) fn block_kernel<F: Field>(
    grid: Grid,
    rng: &mut ChaCha8Rng,
    j: i64,
    cutoff: Cutoff,
) -> F {
    let p = DyadicPartition::new(grid, cutoff);
    let t = grid.tables();
    let ncomp = F::component_count(grid);
    let mut dir: Vec<f64> = (0..ncomp).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let len = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(1e-3);
    dir.iter_mut().for_each(|d| *d /= len);
    let comps = dir
        .iter()
        .map(|&d| {
            (0..grid.len())
                .map(|idx| {
                    let m = if t.keep[idx] {
                        p.multiplier(j, idx)
                    } else {
                        0.0
                    };
                    Complex64::new(d * m, 0.0)
                })
                .collect()
        })
        .collect();
    F::from_components(grid, comps).expect("shape is correct by construction")
}
