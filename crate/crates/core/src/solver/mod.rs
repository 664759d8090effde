//! Picard iteration for the mild formulation, an ETDRK4 time-stepper, initial
//! data, the Kato smallness functional and cross-checks between the two
//! solvers.

mod config;
mod crossval;
mod etdrk4;
mod kato;
mod picard;
mod profile;
mod trajectory;

pub use config::{EtdConfig, PicardConfig, SolverConfig};
pub use crossval::{
    cross_validate, epsilon_n_probe, restart_discrepancy, trajectory_discrepancy, CrossValidation,
    CrossValidationSummary, EpsilonProbe, ProbeSample,
};
pub use etdrk4::etdrk4_integrate;
pub use kato::{
    heat_sup, kato_smallness, kato_time_grid, KatoValue, KATO_GRID_FLOOR, KATO_GRID_POINTS,
};
pub use picard::{picard_solve, picard_solve_on, ConvergenceReport, PicardRun, Timings};
pub use profile::{make_profile, ProfileSpec};
pub use trajectory::{Method, Trajectory, TrajectoryMeta};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::semigroup::heat;
    use crate::spectral::{to_physical, Field, Grid, SpectralVectorField};

    fn tg_config(res: usize) -> (SpectralVectorField, SolverConfig) {
        let g = Grid::new(2, res).unwrap();
        let u0 = make_profile(g, &ProfileSpec::TaylorGreen2d { amplitude: 1.0 }).unwrap();
        (u0, SolverConfig::new(g, 1.0))
    }

    fn sup_error_to_decay(traj: &Trajectory, u0: &SpectralVectorField) -> f64 {
        traj.times()
            .iter()
            .zip(traj.states())
            .map(|(&t, s)| to_physical(&(s - &heat(u0, t, 1.0).unwrap())).max_magnitude())
            .fold(0.0, f64::max)
    }

    #[test]
    fn picard_taylor_green_is_heat_decay() {
        let (u0, cfg) = tg_config(32);
        let run = picard_solve(&u0, &cfg).unwrap();
        assert!(run.report.converged);
        assert_eq!(run.trajectory.len(), 65);
        assert!(sup_error_to_decay(&run.trajectory, &u0) < 1e-6);
        // exp(-2t) for |k|² = 2
        let last = run.trajectory.states().last().unwrap();
        let expected = u0.scaled((-2.0f64).exp());
        assert!(last.max_coeff_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn zero_data_converges_at_once() {
        let g = Grid::new(2, 16).unwrap();
        let u0 = SpectralVectorField::zeros(g);
        let run = picard_solve(&u0, &SolverConfig::new(g, 1.0)).unwrap();
        assert_eq!(run.report.iterations, 1);
        assert!(run.trajectory.states().iter().all(|s| s.max_coeff() == 0.0));
        let mut cfg = SolverConfig::new(g, 1.0);
        cfg.etdrk4.dt = Some(0.1);
        let e = etdrk4_integrate(&u0, &cfg).unwrap();
        assert!(e.states().iter().all(|s| s.max_coeff() == 0.0));
        let cv = cross_validate(&u0, &cfg).unwrap();
        assert_eq!(cv.discrepancy, 0.0);
    }

    #[test]
    fn etdrk4_taylor_green() {
        let (u0, cfg) = tg_config(16);
        let traj = etdrk4_integrate(&u0, &cfg).unwrap();
        assert_eq!(traj.len(), 9);
        assert!((traj.times()[1] - 0.125).abs() < 1e-15);
        assert!(sup_error_to_decay(&traj, &u0) < 1e-8);
    }

    #[test]
    fn large_data_does_not_contract() {
        let g = Grid::new(2, 16).unwrap();
        let spec = ProfileSpec::RandomDivfree {
            amplitude: 60.0,
            slope: 0.0,
            seed: 1,
            band: [1.0, 4.0],
        };
        let u0 = make_profile(g, &spec).unwrap();
        let mut cfg = SolverConfig::new(g, 1.0);
        cfg.picard.node_count = 16;
        match picard_solve(&u0, &cfg) {
            Err(Error::NonConvergence(run)) => {
                assert!(!run.report.converged);
                assert_eq!(run.trajectory.len(), 17);
            }
            other => panic!("expected NonConvergence, got {:?}", other.map(|r| r.report)),
        }
    }

    #[test]
    fn blowup_is_reported_with_finite_states() {
        let g = Grid::new(2, 16).unwrap();
        let spec = ProfileSpec::RandomDivfree {
            amplitude: 1e60,
            slope: 0.0,
            seed: 2,
            band: [1.0, 5.0],
        };
        let u0 = make_profile(g, &spec).unwrap();
        let mut cfg = SolverConfig::new(g, 1.0);
        cfg.etdrk4.dt = Some(0.1);
        cfg.dealias = false;
        match etdrk4_integrate(&u0, &cfg) {
            Err(Error::BlowupSuspected { time, trajectory }) => {
                assert!(trajectory.states().iter().all(|s| s.is_finite()));
                assert_eq!(*trajectory.times().last().unwrap(), time);
                assert!(trajectory.meta().blowup_time.unwrap() > time);
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn restart_reproduces_taylor_green() {
        let (u0, cfg) = tg_config(16);
        let run = picard_solve(&u0, &cfg).unwrap();
        let d = restart_discrepancy(&run.trajectory, 16, &cfg).unwrap();
        assert!(d < 1e-9, "{d}");
        assert!(restart_discrepancy(&run.trajectory, 64, &cfg).is_err());
    }
}
