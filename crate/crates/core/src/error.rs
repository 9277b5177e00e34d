//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by geometry validation and the numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Torus radii violate the ring-torus condition 0 < a < c.
    #[error("invalid torus shape: c = {c}, a = {a} (need 0 < a < c)")]
    InvalidShape { c: f64, a: f64 },

    /// Loop parameters out of domain (non-coprime knot indices, zero windings, ...).
    #[error("invalid loop: {reason}")]
    InvalidLoop { reason: String },

    /// A rotation axis that is not a unit vector, or a protocol violating Ω(0) = 0.
    #[error("invalid rotation protocol: {reason}")]
    InvalidProtocol { reason: String },

    /// Generic parameter validation failure.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Quadrature refinement stalled above the requested tolerance.
    #[error("quadrature did not converge: achieved {achieved:.3e} relative after {doublings} panel doublings (requested {requested:.3e})")]
    QuadratureNonConvergence {
        achieved: f64,
        requested: f64,
        doublings: usize,
    },

    /// The ODE state left the finite range.
    #[error("ODE state became non-finite at t = {t}")]
    OdeNonFinite { t: f64 },

    /// Eigensolver failure (non-convergence or invalid problem).
    #[error("eigensolver failed: {reason}")]
    Eigen { reason: String },
}
