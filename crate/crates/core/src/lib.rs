//! Nudged spectral Galerkin data assimilation for the 2D incompressible
//! Navier-Stokes equations on a periodic square, with postprocessing of the
//! Galerkin approximation through an approximate inertial manifold.

// `!(x > 0.0)` style checks are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
mod fft;
pub mod field;
pub mod forcing;
pub mod grid;
pub mod interp;
pub mod ops;
pub mod postprocess;
pub mod random;
pub mod snapshot;
pub mod cli;
pub mod conditions;
pub mod config;
pub mod run;
pub mod series;
pub mod solver;
pub mod sweep;

pub use error::{Error, Result};
pub use field::{PhysicalVelocity, SpectralVelocity};
pub use grid::{make_grid, ShellCutoff, WaveGrid};
