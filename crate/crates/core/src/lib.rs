//! Pseudo-spectral simulation of the artificial-compressibility
//! Navier-Stokes model on a periodic box, with kernel checks, Picard terms
//! and long-time asymptotic diagnostics.

pub mod asymptotics;
pub mod error;
pub mod example3d;
pub mod field;
pub mod grid;
pub mod io;
pub mod kernels;
pub mod quadrature;
pub mod solver;
pub mod spectral;
mod transform;

pub use error::{Error, Result};
pub use field::{ScalarField, SpectralVectorField};
pub use grid::{make_grid, Grid};
pub use quadrature::QuadratureResult;
pub use solver::{Model, SimConfig, Trajectory};
