//! Heat kernels and semilinear mild equations for the space-time fractional
//! diffusion `d_t^beta V = -(-Delta)^(alpha/2) V`.

pub mod cli;
pub mod dirichlet;
pub mod error;
pub mod interp;
pub mod kernel;
pub mod operators;
pub mod params;
pub mod quad;
pub mod solver;
pub mod specfun;
pub mod verify;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use params::ModelParams;
