//! Entanglement entropy of free-fermion chains and hypercube graphs, with
//! tridiagonal commuting operators, association-scheme tools and scaling fits.

pub mod asymptotics;
pub mod chain;
pub mod correlation;
pub mod error;
pub mod heun;
pub mod hypercube;
pub mod linalg;
pub mod scheme;

pub use error::{Error, Result};
