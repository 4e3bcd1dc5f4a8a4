//! Giant atom on a tight-binding lattice: oscillating bound states in the
//! continuum, their design, and exact single-excitation dynamics.

pub mod bic_subspace;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod io;
pub mod lattice;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
