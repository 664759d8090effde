use super::{Method, SolverConfig, Trajectory, TrajectoryMeta};
use crate::error::{Error, Result};
use crate::semigroup::{phi1, phi2, phi3, quadratic_term, DIVERGENCE_TOL};
use crate::spectral::{Field, SpectralVectorField};

/// Coefficient modulus treated as overflow.
const OVERFLOW: f64 = 1e100;

/// Per-|k|² weights of one ETDRK4 step of size `h`.
struct Weights {
    e: Vec<f64>,
    e2: Vec<f64>,
    q: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    f3: Vec<f64>,
}

impl Weights {
    fn new(max_ksq: usize, nu: f64, h: f64) -> Self {
        let mut w = Weights {
            e: Vec::with_capacity(max_ksq + 1),
            e2: Vec::with_capacity(max_ksq + 1),
            q: Vec::with_capacity(max_ksq + 1),
            f1: Vec::with_capacity(max_ksq + 1),
            f2: Vec::with_capacity(max_ksq + 1),
            f3: Vec::with_capacity(max_ksq + 1),
        };
        for l in 0..=max_ksq {
            let z = -nu * l as f64 * h;
            let (p1, p2, p3) = (phi1(z), phi2(z), phi3(z));
            w.e.push(z.exp());
            w.e2.push((z / 2.0).exp());
            w.q.push(0.5 * h * phi1(z / 2.0));
            w.f1.push(h * (p1 - 3.0 * p2 + 4.0 * p3));
            w.f2.push(h * (p2 - 2.0 * p3));
            w.f3.push(h * (4.0 * p3 - p2));
        }
        w
    }
}

/// `Σ_i s_i · table_i(|k|²) · field_i`.
fn mix(lam: &[usize], terms: &[(&SpectralVectorField, &[f64], f64)]) -> SpectralVectorField {
    let mut out = SpectralVectorField::zeros(terms[0].0.grid());
    for (field, table, s) in terms {
        for (o, c) in out.components_mut().iter_mut().zip(field.components()) {
            for idx in 0..o.len() {
                o[idx] += c[idx] * (table[lam[idx]] * s);
            }
        }
    }
    out
}

/// Cox–Matthews ETDRK4 for `u' = νΔu - ℙ∇·(u⊗u)` with a fixed step.
///
/// States are kept at every multiple of `T/node_count` hit by the step
/// sequence (the Picard nodes), at every `save_every`-th step and at `T`.
pub fn etdrk4_integrate(u0: &SpectralVectorField, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    Error::check_grid(grid, u0.grid())?;
    let defect = u0.divergence_defect();
    if !(defect <= DIVERGENCE_TOL) {
        return Err(Error::NotDivergenceFree(defect));
    }
    let (steps, h) = cfg.etd_steps();
    let t = grid.tables();
    let lam: Vec<usize> = t.ksq.iter().map(|&x| x as usize).collect();
    let max_ksq = lam.iter().copied().max().unwrap_or(0);
    let w = Weights::new(max_ksq, cfg.nu, h);
    let nl = |u: &SpectralVectorField| quadratic_term(u, cfg.dealias).scaled(-1.0);
    let nodes = cfg.picard.node_count;
    let keep = |s: usize| {
        s == steps || (s * nodes) % steps == 0 || cfg.etdrk4.save_every.is_some_and(|k| s % k == 0)
    };
    let mut times = vec![0.0];
    let mut states = vec![u0.clone()];
    let mut u = u0.clone();
    for s in 1..=steps {
        let nu_ = nl(&u);
        let a = mix(&lam, &[(&u, &w.e2, 1.0), (&nu_, &w.q, 1.0)]);
        let na = nl(&a);
        let b = mix(&lam, &[(&u, &w.e2, 1.0), (&na, &w.q, 1.0)]);
        let nb = nl(&b);
        let c = mix(
            &lam,
            &[(&a, &w.e2, 1.0), (&nb, &w.q, 2.0), (&nu_, &w.q, -1.0)],
        );
        let nc = nl(&c);
        let next = mix(
            &lam,
            &[
                (&u, &w.e, 1.0),
                (&nu_, &w.f1, 1.0),
                (&na, &w.f2, 2.0),
                (&nb, &w.f2, 2.0),
                (&nc, &w.f3, 1.0),
            ],
        );
        let time = if s == steps {
            cfg.horizon
        } else {
            s as f64 * h
        };
        if !next.is_finite() || next.max_coeff() > OVERFLOW {
            let last = (s - 1) as f64 * h;
            if *times.last().expect("nonempty") < last {
                times.push(last);
                states.push(u);
            }
            let mut meta = TrajectoryMeta::new(Method::Etdrk4, cfg.nu);
            meta.blowup_time = Some(time);
            let trajectory = Trajectory::new(times, states, meta)?;
            return Err(Error::BlowupSuspected {
                time: last,
                trajectory: Box::new(trajectory),
            });
        }
        u = next;
        if keep(s) {
            times.push(time);
            states.push(u.clone());
        }
    }
    Trajectory::new(times, states, TrajectoryMeta::new(Method::Etdrk4, cfg.nu))
}
