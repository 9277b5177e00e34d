//! Periodic quadrature by composite Simpson with panel-doubling refinement.

use crate::{Error, Result};

/// Controls for [`integrate_periodic`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Initial panel count; must be even.
    pub panels: usize,
    /// Number of panel doublings attempted before giving up.
    pub refinement_checks: usize,
    /// Relative tolerance on the change under panel doubling, scaled by the
    /// larger of |integral| and the L1 magnitude of the integrand.
    pub rel_tol: f64,
    /// Absolute floor on the convergence test. Needed for integrands that
    /// cancel to rounding noise pointwise (e.g. a projected-area component
    /// that is identically zero), where no relative scale survives.
    pub abs_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            panels: 4096,
            refinement_checks: 3,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.panels == 0 || self.panels % 2 != 0 {
            return Err(Error::InvalidParameter {
                name: "panels",
                reason: format!("{} (must be a positive even number)", self.panels),
            });
        }
        if self.refinement_checks == 0 {
            return Err(Error::InvalidParameter {
                name: "refinement_checks",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                reason: format!("{} (must be positive)", self.rel_tol),
            });
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "abs_tol",
                reason: format!("{} (must be non-negative)", self.abs_tol),
            });
        }
        Ok(())
    }
}

/// Composite Simpson over one full period, returning the value and the L1
/// magnitude of the integrand (used to scale the convergence test so that
/// integrals near zero do not fail a purely relative check).
fn simpson<F: Fn(f64) -> f64>(f: &F, period: f64, panels: usize) -> (f64, f64) {
    let h = period / panels as f64;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for i in 0..=panels {
        let w = if i == 0 || i == panels {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let v = f(i as f64 * h);
        sum += w * v;
        abs_sum += w * v.abs();
    }
    (sum * h / 3.0, abs_sum * h / 3.0)
}

/// Integrate `f` over `[0, period]`, refining by panel doubling until the
/// change falls below `rel_tol` times the integral scale.
pub fn integrate_periodic<F: Fn(f64) -> f64>(
    f: F,
    period: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "period",
            reason: format!("{period} (must be positive and finite)"),
        });
    }

    let mut panels = cfg.panels;
    let (mut value, _) = simpson(&f, period, panels);
    let mut achieved = f64::INFINITY;
    for _ in 0..cfg.refinement_checks {
        panels *= 2;
        let (next, scale) = simpson(&f, period, panels);
        let diff = (next - value).abs();
        let tol_scale = next.abs().max(scale).max(f64::MIN_POSITIVE);
        achieved = diff / tol_scale;
        value = next;
        if diff <= cfg.rel_tol * tol_scale + cfg.abs_tol {
            return Ok(value);
        }
    }
    Err(Error::QuadratureNonConvergence {
        achieved,
        requested: cfg.rel_tol,
        doublings: cfg.refinement_checks,
    })
}
