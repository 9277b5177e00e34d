//! Classical 4th-order Runge-Kutta with a fixed step.
//!
//! Fixed stepping is deliberate: adiabatic runs need smooth, reproducible
//! sampling for loop averaging, and accuracy is certified by step halving
//! rather than by an embedded error estimate.

use crate::{Error, Result};

/// Controls for [`solve_ode`].
#[derive(Debug, Clone, Copy)]
pub struct OdeConfig {
    /// Requested step size (time units). The actual step is `t_end / n` with
    /// `n = round(t_end / step)` so the grid lands exactly on `t_end`.
    pub step: f64,
    /// End of the integration interval (start is 0).
    pub t_end: f64,
    /// Every `record_stride`-th state is stored; the final state always is.
    pub record_stride: usize,
}

impl OdeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "step",
                reason: format!("{} (must be positive and finite)", self.step),
            });
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                reason: format!("{} (must be positive and finite)", self.t_end),
            });
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter {
                name: "record_stride",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Recorded samples of a [`solve_ode`] run.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    /// Step actually used (after rounding to divide `t_end` evenly).
    pub step: f64,
}

impl<const N: usize> Trajectory<N> {
    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn final_state(&self) -> [f64; N] {
        *self.states.last().expect("trajectory is never empty")
    }
}

fn add_scaled<const N: usize>(y: &[f64; N], k: &[f64; N], s: f64) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += s * k[i];
    }
    out
}

/// Integrate `dy/dt = rhs(t, y)` from 0 to `cfg.t_end` with classic RK4.
///
/// Halving the step must change the final state by less than 1e-6 relative
/// for the solution to be trusted; the tests enforce that contract on the
/// harmonic oscillator.
pub fn solve_ode<const N: usize, F>(rhs: F, y0: [f64; N], cfg: &OdeConfig) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    cfg.validate()?;
    let n_steps = (cfg.t_end / cfg.step).round().max(1.0) as usize;
    let h = cfg.t_end / n_steps as f64;

    let mut y = y0;
    let mut times = Vec::with_capacity(n_steps / cfg.record_stride + 2);
    let mut states = Vec::with_capacity(n_steps / cfg.record_stride + 2);
    times.push(0.0);
    states.push(y);

    for step_idx in 0..n_steps {
        let t = step_idx as f64 * h;
        let k1 = rhs(t, &y);
        let k2 = rhs(t + 0.5 * h, &add_scaled(&y, &k1, 0.5 * h));
        let k3 = rhs(t + 0.5 * h, &add_scaled(&y, &k2, 0.5 * h));
        let k4 = rhs(t + h, &add_scaled(&y, &k3, h));
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t_next = (step_idx + 1) as f64 * h;
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::OdeNonFinite { t: t_next });
        }
        if (step_idx + 1) % cfg.record_stride == 0 || step_idx + 1 == n_steps {
            times.push(t_next);
            states.push(y);
        }
    }

    Ok(Trajectory {
        times,
        states,
        step: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn oscillator(_t: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], -y[0]]
    }

    #[test]
    fn harmonic_oscillator_returns_after_one_period() {
        let cfg = OdeConfig {
            step: 2.0 * PI / 1000.0,
            t_end: 2.0 * PI,
            record_stride: 100,
        };
        let traj = solve_ode(oscillator, [1.0, 0.0], &cfg).unwrap();
        let [s, p] = traj.final_state();
        assert!((s - 1.0).abs() < 1e-8 && p.abs() < 1e-8, "got ({s}, {p})");
    }

    #[test]
    fn zero_rhs_keeps_state_constant() {
        let cfg = OdeConfig {
            step: 0.01,
            t_end: 5.0,
            record_stride: 10,
        };
        let traj = solve_ode(|_, _: &[f64; 2]| [0.0, 0.0], [3.0, -2.0], &cfg).unwrap();
        for state in &traj.states {
            assert_eq!(*state, [3.0, -2.0]);
        }
    }

    #[test]
    fn free_motion_is_linear_in_time() {
        let cfg = OdeConfig {
            step: 0.01,
            t_end: 10.0,
            record_stride: 1000,
        };
        let traj = solve_ode(|_, y: &[f64; 2]| [y[1], 0.0], [0.5, 2.0], &cfg).unwrap();
        let [s, p] = traj.final_state();
        assert!((s - (0.5 + 2.0 * 10.0)).abs() < 1e-10);
        assert!((p - 2.0).abs() < 1e-12);
    }

    #[test]
    fn global_error_scales_as_fourth_order() {
        let run = |n: usize| {
            let cfg = OdeConfig {
                step: 2.0 * PI / n as f64,
                t_end: 2.0 * PI,
                record_stride: usize::MAX,
            };
            let [s, p] = solve_ode(oscillator, [1.0, 0.0], &cfg).unwrap().final_state();
            ((s - 1.0).powi(2) + p.powi(2)).sqrt()
        };
        // One decade of step refinement: error ratio should be ~10^4,
        // within a factor of 2.
        let ratio = run(100) / run(1000);
        assert!(
            (5.0e3..2.0e4).contains(&ratio),
            "order-4 ratio out of range: {ratio}"
        );
    }

    #[test]
    fn divergent_state_reports_failure_time() {
        // y' = y^2 blows up at t = 1 from y(0) = 1.
        let cfg = OdeConfig {
            step: 1e-3,
            t_end: 2.0,
            record_stride: usize::MAX,
        };
        let err = solve_ode(|_, y: &[f64; 1]| [y[0] * y[0]], [1.0], &cfg).unwrap_err();
        match err {
            Error::OdeNonFinite { t } => assert!(t > 0.9 && t < 1.5, "t = {t}"),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
