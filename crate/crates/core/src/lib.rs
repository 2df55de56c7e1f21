//! Cavity QED with a two-level atom inside a parametrically pumped
//! (two-photon driven) cavity.
//!
//! The crate builds the truncated atom ⊗ cavity model in the lab frame or in
//! the frame that diagonalizes the pumped cavity, solves the Lindblad master
//! equation for steady states and trajectories, and evaluates cavity
//! observables (moments, photon distributions, output flux, Wigner function).
//! [`oracle`] holds independent reference calculations used to cross-check
//! the main routes.

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod operators;
pub mod oracle;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, SparseMatrix};
pub use operators::{AtomLevel, DensityMatrix, FockOperator, HilbertDims};
