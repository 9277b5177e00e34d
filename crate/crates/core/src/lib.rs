//! Geometric phases for noncontractible loops on a revolving torus.
//!
//! Computes Hannay angles and Berry phases for a particle constrained to
//! toroidal loops, poloidal loops, and (p, q) torus knots on a ring torus
//! that slowly revolves in space. Four independent routes are provided and
//! cross-checked against each other:
//!
//! - analytic closed forms ([`classical`], [`quantum`]),
//! - direct line-integral quadrature of the anholonomy ([`classical`]),
//! - adiabatic rotating-frame dynamics with Euler pseudo-forces ([`dynamics`]),
//! - a spectral eigensolver for the knot's periodic-potential problem
//!   ([`quantum`]).
//!
//! Geometry lives in [`geometry`], shared numerical kernels (quadrature,
//! fixed-step ODE integration, dense generalized eigensolves) in
//! [`numerics`]. Batch helpers in [`batch`] run independent evaluations in
//! parallel when the `parallel` feature (default) is enabled.

pub mod batch;
pub mod classical;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod quantum;
pub mod vec3;

pub use error::Error;
pub use geometry::{LoopSpec, TorusShape};
pub use vec3::Vec3;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
