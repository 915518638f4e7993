//! Grand-canonical Gaussian states of the free lattice Bose gas and the
//! numerics needed to ask whether temperature stays a local quantity across
//! Bose-Einstein condensation.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: lattice geometry, dispersion, thermodynamics and covariance matrices.
//! * [`gaussian`]: reductions, fidelity, purity and entropy of thermal Gaussian states.
//! * [`correlations`]: density-density correlations along a lattice axis.
//! * [`fitting`]: the least-squares recipes used to extract exponents.
//! * [`experiments`]: sweep drivers producing [`experiments::Row`] records.
//! * [`oracle`]: an exact Fock-space reference for the 2×2×2 lattice.

pub mod correlations;
pub mod error;
pub mod experiments;
pub mod fitting;
pub mod gaussian;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
