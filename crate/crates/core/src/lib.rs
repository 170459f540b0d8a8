//! Spectral computations for free boundary minimal surfaces in the unit ball:
//! the critical catenoid and the flat equatorial disk.
//!
//! Functions on a surface of revolution are expanded in Fourier modes
//! `u(s) cos mθ`, `u(s) sin mθ`; every operator here reduces to one radial
//! problem per mode.

pub mod convergence;
pub mod discretize;
pub mod eigensolve;
pub mod error;
pub mod geometry;
pub mod spectra;
pub mod verify;

pub use discretize::{BoundaryCondition, ModeProblem};
pub use eigensolve::{count_below, Count, SpectrumResult};
pub use error::{Error, Result};
pub use geometry::{SurfaceKind, SurfaceModel};
