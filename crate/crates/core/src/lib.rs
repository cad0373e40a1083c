//! Well-balanced asymptotic-preserving schemes for one-dimensional kinetic
//! equations in the diffusive scaling, built on interface scattering matrices.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod kinetic_solver;
pub mod linalg;
pub mod macrolimit;
pub mod par;
pub mod quadrature;
pub mod scattering;
pub mod spectral;
pub mod twostream;

pub use error::{Error, Result};
pub use kinetic_solver::{imex_step, KineticGrid, Model};
pub use par::Execution;
pub use quadrature::{gauss_symmetric, vfp_quadrature, VelocityQuadrature};
