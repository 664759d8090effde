//! Norms and critical quantities along trajectories: Lᵖ norms, the
//! `B^{-1,∞}_∞` norm and distance to a profile, the Kato functional,
//! discrete total variation and power-law rate fits.

mod csv_io;

use serde::{Deserialize, Serialize};

pub(crate) use csv_io::num as format_number;
pub use csv_io::{read_csv, write_csv};

use crate::error::{Error, Result};
use crate::littlewood_paley::{besov_distance, besov_norm, Cutoff, DyadicPartition};
use crate::solver::{kato_smallness, Trajectory};
use crate::spectral::{lp_norm_physical, spectral_energy, to_physical, Field, SpectralVectorField};
use crate::stats::linear_fit;

/// Horizon used for the Kato functional at node `t₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum KatoHorizon {
    /// `min(1, T - t₀)` with `T` the last trajectory time.
    #[default]
    Auto,
    Fixed(f64),
    Off,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorOptions {
    /// Extra Lᵖ exponents; 2, n and ∞ are always included.
    #[serde(default)]
    pub p_list: Vec<f64>,
    #[serde(default)]
    pub kato_horizon: KatoHorizon,
    #[serde(default = "MonitorOptions::default_cutoff")]
    pub cutoff: Cutoff,
}

impl MonitorOptions {
    fn default_cutoff() -> Cutoff {
        Cutoff::Smooth
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.p_list.iter().find(|p| !(**p >= 1.0)) {
            return Err(Error::Config(format!("Lp exponent must be >= 1, got {p}")));
        }
        if let KatoHorizon::Fixed(h) = self.kato_horizon {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::Config(format!(
                    "kato horizon must be positive, got {h}"
                )));
            }
        }
        Ok(())
    }

    /// Exponents reported for dimension `dim`: 2, n, ∞, then the extras.
    pub fn exponents(&self, dim: usize) -> Vec<f64> {
        let mut ps = vec![2.0, dim as f64, f64::INFINITY];
        for &p in &self.p_list {
            if !ps.contains(&p) {
                ps.push(p);
            }
        }
        ps
    }
}

impl Default for MonitorOptions {
    fn default() -> Self {
        Self {
            p_list: Vec::new(),
            kato_horizon: KatoHorizon::Auto,
            cutoff: Self::default_cutoff(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorRecord {
    pub t: f64,
    /// `(p, ‖u(t)‖_p)` in the order of [`MonitorOptions::exponents`].
    pub lp_norms: Vec<(f64, f64)>,
    pub besov_m1: f64,
    pub besov_dist_omega: Option<f64>,
    pub kato_i: Option<f64>,
    /// `½‖u(t)‖₂²`.
    pub energy: f64,
}

impl MonitorRecord {
    pub fn lp(&self, p: f64) -> Option<f64> {
        self.lp_norms.iter().find(|(q, _)| *q == p).map(|&(_, v)| v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonitorSeries {
    pub dim: usize,
    pub records: Vec<MonitorRecord>,
    /// Time at which the producing solver met a non-finite state.
    pub blowup_time: Option<f64>,
}

/// One record per trajectory state.
pub fn monitor(
    traj: &Trajectory,
    opts: &MonitorOptions,
    omega: Option<&SpectralVectorField>,
) -> Result<MonitorSeries> {
    opts.validate()?;
    let grid = traj.grid();
    if let Some(w) = omega {
        Error::check_grid(grid, w.grid())?;
    }
    let part = DyadicPartition::new(grid, opts.cutoff);
    let ps = opts.exponents(grid.dim());
    let mut records = Vec::with_capacity(traj.len());
    for (node, (&t, u)) in traj.times().iter().zip(traj.states()).enumerate() {
        let phys = to_physical(u);
        let lp_norms = ps
            .iter()
            .map(|&p| Ok((p, lp_norm_physical(&phys, p)?)))
            .collect::<Result<Vec<_>>>()?;
        let kato_i = match kato_horizon(traj, node, opts.kato_horizon) {
            Some(h) => Some(kato_functional(traj, node, h)?),
            None => None,
        };
        records.push(MonitorRecord {
            t,
            lp_norms,
            besov_m1: besov_norm(u, -1.0, &part)?,
            besov_dist_omega: omega
                .map(|w| besov_distance(u, w, -1.0, &part))
                .transpose()?,
            kato_i,
            energy: 0.5 * spectral_energy(u),
        });
    }
    Ok(MonitorSeries {
        dim: grid.dim(),
        records,
        blowup_time: traj.meta().blowup_time,
    })
}

fn kato_horizon(traj: &Trajectory, node: usize, policy: KatoHorizon) -> Option<f64> {
    match policy {
        KatoHorizon::Off => None,
        KatoHorizon::Fixed(h) => Some(h),
        KatoHorizon::Auto => {
            let rest = traj.times().last().expect("nonempty") - traj.times()[node];
            (rest > 0.0).then(|| rest.min(1.0))
        }
    }
}

/// `I_*(u, t₀)`: the Kato smallness functional of the state at node `t₀`,
/// with the heat flow recomputed from that state.
pub fn kato_functional(traj: &Trajectory, node: usize, horizon: f64) -> Result<f64> {
    if node >= traj.len() {
        return Err(Error::OutOfRange {
            what: "node",
            index: node as i64,
            lo: 0,
            hi: traj.len() as i64 - 1,
        });
    }
    Ok(kato_smallness(&traj.states()[node], horizon, traj.meta().nu)?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BvVariation {
    /// `Σ_j ‖u(t_{j+1}) - u(t_j)‖_{B^{s,∞}_∞}`.
    pub total: f64,
    /// Largest single increment and the index of its left node.
    pub max_increment: f64,
    pub argmax: usize,
}

/// Discrete total variation in `B^{s,∞}_∞` over `nodes` (all states when `None`).
pub fn bv_variation(
    traj: &Trajectory,
    s: f64,
    cutoff: Cutoff,
    nodes: Option<&[usize]>,
) -> Result<BvVariation> {
    let all: Vec<usize> = (0..traj.len()).collect();
    let nodes = nodes.unwrap_or(&all);
    if nodes.len() < 2 {
        return Err(Error::InvalidArgument(
            "total variation needs at least two states".into(),
        ));
    }
    if let Some(&bad) = nodes.iter().find(|&&i| i >= traj.len()) {
        return Err(Error::OutOfRange {
            what: "node",
            index: bad as i64,
            lo: 0,
            hi: traj.len() as i64 - 1,
        });
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("nodes must be increasing".into()));
    }
    let part = DyadicPartition::new(traj.grid(), cutoff);
    let mut out = BvVariation {
        total: 0.0,
        max_increment: 0.0,
        argmax: nodes[0],
    };
    for w in nodes.windows(2) {
        let d = besov_distance(&traj.states()[w[1]], &traj.states()[w[0]], s, &part)?;
        out.total += d;
        if d > out.max_increment {
            out.max_increment = d;
            out.argmax = w[0];
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateFit {
    /// Slope of `log ‖u(t)‖_p` against `log(T* - t)`.
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points: usize,
}

/// Theoretical exponent `(n/p - 1)/2` of the lower blow-up rate.
pub fn giga_target_exponent(dim: usize, p: f64) -> f64 {
    0.5 * (dim as f64 / p - 1.0)
}

/// Least-squares power-law fit of `‖u(t)‖_p` against `T* - t`.
///
/// Needs at least eight records with strictly increasing norms, all before `t_star`.
pub fn giga_rate_fit(records: &[MonitorRecord], p: f64, t_star: f64) -> Result<RateFit> {
    if records.len() < 8 {
        return Err(Error::FitUndefined(format!(
            "{} records, need at least 8",
            records.len()
        )));
    }
    let last = records.last().expect("nonempty").t;
    if !(t_star > last) {
        return Err(Error::InvalidArgument(format!(
            "T* = {t_star} must exceed the last time {last}"
        )));
    }
    let mut xs = Vec::with_capacity(records.len());
    let mut ys = Vec::with_capacity(records.len());
    for r in records {
        let v = r
            .lp(p)
            .ok_or_else(|| Error::InvalidArgument(format!("records carry no L^{p} norm")))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::FitUndefined(format!(
                "non-positive norm {v} at t = {}",
                r.t
            )));
        }
        xs.push((t_star - r.t).ln());
        ys.push(v.ln());
    }
    if ys.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::FitUndefined(
            "norms are not increasing towards T*".into(),
        ));
    }
    let fit =
        linear_fit(&xs, &ys).ok_or_else(|| Error::FitUndefined("degenerate abscissae".into()))?;
    Ok(RateFit {
        exponent: fit.slope,
        intercept: fit.intercept,
        residual: fit.rms,
        points: xs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::besov_norm;
    use crate::semigroup::heat;
    use crate::solver::{
        make_profile, picard_solve, Method, ProfileSpec, SolverConfig, TrajectoryMeta,
    };
    use crate::spectral::Grid;

    fn synthetic(values: &[(f64, f64)], p: f64) -> Vec<MonitorRecord> {
        values
            .iter()
            .map(|&(t, v)| MonitorRecord {
                t,
                lp_norms: vec![(p, v)],
                besov_m1: 0.0,
                besov_dist_omega: None,
                kato_i: None,
                energy: 0.0,
            })
            .collect()
    }

    fn two_state(a: SpectralVectorField, b: SpectralVectorField) -> Trajectory {
        Trajectory::new(
            vec![0.0, 1.0],
            vec![a, b],
            TrajectoryMeta::new(Method::Snapshots, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn zero_trajectory_gives_zero_records() {
        let g = Grid::new(2, 16).unwrap();
        let z = SpectralVectorField::zeros(g);
        let traj = two_state(z.clone(), z);
        let series = monitor(&traj, &MonitorOptions::default(), None).unwrap();
        for r in &series.records {
            assert!(r.lp_norms.iter().all(|&(_, v)| v == 0.0));
            assert_eq!(r.besov_m1, 0.0);
            assert_eq!(r.energy, 0.0);
            assert!(r.kato_i.unwrap_or(0.0) == 0.0);
        }
        assert_eq!(series.records[1].kato_i, None);
    }

    #[test]
    fn taylor_green_decay_and_omega() {
        let g = Grid::new(2, 16).unwrap();
        let u0 = make_profile(g, &ProfileSpec::TaylorGreen2d { amplitude: 1.0 }).unwrap();
        let mut cfg = SolverConfig::new(g, 1.0);
        cfg.picard.node_count = 8;
        let run = picard_solve(&u0, &cfg).unwrap();
        let series = monitor(&run.trajectory, &MonitorOptions::default(), Some(&u0)).unwrap();
        let b0 = series.records[0].besov_m1;
        assert_eq!(series.records[0].besov_dist_omega, Some(0.0));
        for r in &series.records {
            assert!((r.besov_m1 - (-2.0 * r.t).exp() * b0).abs() < 1e-6);
            assert!(r.lp(f64::INFINITY).unwrap() <= 1.0 + 1e-12);
        }
        assert!(series.records[0].kato_i.unwrap() > 0.0);
    }

    #[test]
    fn kato_functional_is_monotone_in_horizon() {
        let g = Grid::new(2, 16).unwrap();
        let u0 = make_profile(g, &ProfileSpec::TaylorGreen2d { amplitude: 1.0 }).unwrap();
        let traj = two_state(u0.clone(), heat(&u0, 1.0, 1.0).unwrap());
        let mut last = 0.0;
        for h in [0.01, 0.1, 0.2, 0.25, 0.26, 0.5, 0.7, 1.0] {
            let v = kato_functional(&traj, 0, h).unwrap();
            assert!(v >= last * (1.0 - 1e-12), "{h}: {v} < {last}");
            last = v;
        }
        assert!(kato_functional(&traj, 2, 1.0).is_err());
    }

    #[test]
    fn bv_variation_mechanics() {
        let g = Grid::new(2, 16).unwrap();
        let a = make_profile(g, &ProfileSpec::TaylorGreen2d { amplitude: 1.0 }).unwrap();
        let b = make_profile(
            g,
            &ProfileSpec::RandomDivfree {
                amplitude: 1.0,
                slope: 1.0,
                seed: 5,
                band: [1.0, 4.0],
            },
        )
        .unwrap();
        let constant = two_state(a.clone(), a.clone());
        assert_eq!(
            bv_variation(&constant, -1.0, Cutoff::Smooth, None)
                .unwrap()
                .total,
            0.0
        );
        let pair = two_state(a.clone(), b.clone());
        let part = DyadicPartition::new(g, Cutoff::Smooth);
        let v = bv_variation(&pair, -1.0, Cutoff::Smooth, None).unwrap();
        assert_eq!(v.total, besov_norm(&(&b - &a), -1.0, &part).unwrap());
        assert_eq!(v.max_increment, v.total);
        assert!(bv_variation(&pair, -1.0, Cutoff::Smooth, Some(&[0])).is_err());
        assert!(bv_variation(&pair, -1.0, Cutoff::Smooth, Some(&[0, 3])).is_err());
    }

    #[test]
    fn rate_fit() {
        let t_star = 1.0;
        let vals: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let t = 0.9 * i as f64 / 12.0;
                (t, (t_star - t).powf(-0.5))
            })
            .collect();
        let fit = giga_rate_fit(&synthetic(&vals, f64::INFINITY), f64::INFINITY, t_star).unwrap();
        assert!((fit.exponent + 0.5).abs() < 1e-6);
        assert!(fit.residual < 1e-12);
        assert_eq!(giga_target_exponent(3, f64::INFINITY), -0.5);
        let flat: Vec<(f64, f64)> = vals.iter().map(|&(t, _)| (t, 2.0)).collect();
        assert!(matches!(
            giga_rate_fit(&synthetic(&flat, 2.0), 2.0, t_star),
            Err(Error::FitUndefined(_))
        ));
        assert!(matches!(
            giga_rate_fit(&synthetic(&vals[..5], f64::INFINITY), f64::INFINITY, t_star),
            Err(Error::FitUndefined(_))
        ));
        assert!(giga_rate_fit(&synthetic(&vals, f64::INFINITY), f64::INFINITY, 0.5).is_err());
    }
}
