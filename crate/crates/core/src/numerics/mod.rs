//! Shared numerical kernels with explicit accuracy contracts: periodic
//! composite-Simpson quadrature, fixed-step 4th-order ODE integration, and a
//! dense symmetric generalized eigensolver.

mod eigen;
mod ode;
mod quadrature;

pub use eigen::{generalized_eigs, EigenPair, EigenProblem};
pub use ode::{solve_ode, OdeConfig, Trajectory};
pub use quadrature::{integrate_periodic, QuadratureConfig};
