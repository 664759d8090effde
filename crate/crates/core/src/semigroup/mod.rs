//! Heat semigroup, Leray projection, the quadratic term, the Duhamel
//! operator and `e^{νtΔ}ℙ∇·`.

mod phi;
mod timegrid;

use num_complex::Complex64;

pub use phi::{phi1, phi2, phi3, SERIES_THRESHOLD};
pub use timegrid::{Spacing, TimeGrid};

use crate::error::{Error, Result};
use crate::spectral::{self_tensor, Field, SpectralVectorField, TensorField};

/// Relative divergence defect accepted by [`nonlinearity`].
pub const DIVERGENCE_TOL: f64 = 1e-8;

fn check_viscosity(nu: f64) -> Result<()> {
    if nu.is_finite() && nu > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "viscosity must be positive, got {nu}"
        )))
    }
}

/// `e^{νtΔ} f`: `c(k) ↦ e^{-νt|k|²} c(k)`.
pub fn heat<F: Field>(f: &F, t: f64, nu: f64) -> Result<F> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "heat time must be >= 0, got {t}"
        )));
    }
    check_viscosity(nu)?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    let tables = f.grid().tables();
    Ok(f.map_multiplier(|idx| (-nu * t * tables.ksq[idx]).exp()))
}

/// Leray projection onto divergence-free fields; the `k = 0` mode is left as is.
pub fn leray_project(f: &SpectralVectorField) -> SpectralVectorField {
    let grid = f.grid();
    let dim = grid.dim();
    let t = grid.tables();
    let mut out = f.clone();
    let comps = out.components_mut();
    for idx in 1..grid.len() {
        let k = t.kvec[idx];
        let mut dot = Complex64::new(0.0, 0.0);
        for a in 0..dim {
            dot += comps[a][idx] * k[a] as f64;
        }
        let dot = dot / t.ksq[idx];
        for a in 0..dim {
            comps[a][idx] -= dot * k[a] as f64;
        }
    }
    out
}

/// `e^{-νt|k|²} ℙ(∇·T)` with `(∇·T)_a = Σ_b ∂_b T_ab`; `decay = 0` skips the heat factor.
pub(crate) fn projected_divergence(tensor: &TensorField, decay: f64) -> SpectralVectorField {
    let grid = tensor.grid();
    let dim = grid.dim();
    let t = grid.tables();
    let nyq = grid.nyquist() as i32;
    let mut comps = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; dim];
    let mut d = [Complex64::new(0.0, 0.0); 3];
    for idx in 1..grid.len() {
        let k = t.kvec[idx];
        for (a, da) in d.iter_mut().enumerate().take(dim) {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..dim {
                if k[b].abs() != nyq {
                    acc += tensor.entry(a, b)[idx] * k[b] as f64;
                }
            }
            // multiply by i
            *da = Complex64::new(-acc.im, acc.re);
        }
        let mut dot = Complex64::new(0.0, 0.0);
        for a in 0..dim {
            dot += d[a] * k[a] as f64;
        }
        let dot = dot / t.ksq[idx];
        let damp = if decay == 0.0 {
            1.0
        } else {
            (-decay * t.ksq[idx]).exp()
        };
        for a in 0..dim {
            comps[a][idx] = (d[a] - dot * k[a] as f64) * damp;
        }
    }
    SpectralVectorField::from_components(grid, comps).expect("shape is correct")
}

/// `ℙ∇·(u⊗u)` with the dealiased product.
pub fn nonlinearity(u: &SpectralVectorField) -> Result<SpectralVectorField> {
    let defect = u.divergence_defect();
    if !(defect <= DIVERGENCE_TOL) {
        return Err(Error::NotDivergenceFree(defect));
    }
    Ok(quadratic_term(u, true))
}

/// [`nonlinearity`] without the input check; `dealias = false` drops the 2/3 rule.
pub(crate) fn quadratic_term(u: &SpectralVectorField, dealias: bool) -> SpectralVectorField {
    projected_divergence(&self_tensor(u, dealias), 0.0)
}

/// `e^{νtΔ}ℙ(∇·F)` for `t > 0`.
pub fn oseen_apply(f: &TensorField, t: f64, nu: f64) -> Result<SpectralVectorField> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Oseen time must be > 0, got {t}"
        )));
    }
    check_viscosity(nu)?;
    Ok(projected_divergence(f, nu * t))
}

/// Weights of one Duhamel step at exponent `z = -νλh`:
/// `(e^z, h(φ₁ - φ₂), hφ₂)`.
fn step_weights(z: f64, h: f64) -> [f64; 3] {
    let p1 = phi1(z);
    let p2 = phi2(z);
    [z.exp(), h * (p1 - p2), h * p2]
}

/// `𝕃(f)(t) = -∫₀ᵗ e^{ν(t-s)Δ} f(s) ds` on the nodes of `times`.
///
/// Each Fourier coefficient of `f` is interpolated linearly between nodes and
/// the resulting integrals are evaluated exactly.
#[allow(non_snake_case)]
pub fn duhamel_L<F: Field>(path: &[F], times: &TimeGrid, nu: f64) -> Result<Vec<F>> {
    check_viscosity(nu)?;
    if path.len() != times.len() {
        return Err(Error::Shape(format!(
            "path has {} samples but the time grid has {} nodes",
            path.len(),
            times.len()
        )));
    }
    let grid = path[0].grid();
    for f in path {
        Error::check_grid(grid, f.grid())?;
    }
    let t = grid.tables();
    // |k|² takes integer values; tabulate the weights per distinct value.
    let max_ksq = t.ksq.iter().fold(0.0f64, |m, &x| m.max(x)) as usize;
    let lam: Vec<usize> = t.ksq.iter().map(|&x| x as usize).collect();
    let mut out = Vec::with_capacity(path.len());
    let mut current = F::zeros(grid);
    out.push(current.clone());
    let nodes = times.nodes();
    let mut table = vec![[0.0; 3]; max_ksq + 1];
    let mut last_h = f64::NAN;
    for m in 0..nodes.len() - 1 {
        let h = nodes[m + 1] - nodes[m];
        if h != last_h {
            for (l, w) in table.iter_mut().enumerate() {
                *w = step_weights(-nu * l as f64 * h, h);
            }
            last_h = h;
        }
        let (fm, fn_) = (path[m].components(), path[m + 1].components());
        for (c, (a, b)) in current.components_mut().iter_mut().zip(fm.iter().zip(fn_)) {
            for idx in 0..c.len() {
                let [e, w0, w1] = table[lam[idx]];
                c[idx] = c[idx] * e - (a[idx] * w0 + b[idx] * w1);
            }
        }
        out.push(current.clone());
    }
    Ok(out)
}
