//! Impurity qubits dephasing in a Bose-Hubbard ring, and the Bell
//! nonlocality left in their reduced state.

pub mod analysis;
pub mod bell;
pub mod bogoliubov;
pub mod continuum;
pub mod dephasing;
pub mod error;
pub mod exact;
pub mod fock;
pub mod krylov;
pub mod model;
pub mod optimize;
pub mod parallel;
pub mod quadrature;
pub mod sparse;
pub mod state;

pub use error::{Error, Result};
