//! Pure-dephasing maps `ρ_ij(t) = e^{-γ_ij(t)} e^{iφ_ij(t)} ρ_ij(0)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::QubitState;

/// `γ_ij` and `φ_ij` for every pair of basis indices at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingProfile {
    pub t: f64,
    qubits: usize,
    gamma: DMatrix<f64>,
    phi: DMatrix<f64>,
}

impl DephasingProfile {
    pub fn new(t: f64, qubits: usize, gamma: DMatrix<f64>, phi: DMatrix<f64>) -> Self {
        let n = 1 << qubits;
        assert_eq!(gamma.shape(), (n, n));
        assert_eq!(phi.shape(), (n, n));
        Self {
            t,
            qubits,
            gamma,
            phi,
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn gamma(&self, i: usize, j: usize) -> f64 {
        self.gamma[(i, j)]
    }

    pub fn phi(&self, i: usize, j: usize) -> f64 {
        self.phi[(i, j)]
    }

    pub fn gamma_matrix(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    /// Apply the map to `rho0`. With `unitary_only` every `γ_ij` is taken as zero.
    pub fn apply(&self, rho0: &QubitState, unitary_only: bool) -> Result<QubitState> {
        if rho0.qubits() != self.qubits {
            return Err(Error::Dimension(format!(
                "initial state has {} qubits, dephasing map acts on {}",
                rho0.qubits(),
                self.qubits
            )));
        }
        let n = 1 << self.qubits;
        let m = DMatrix::from_fn(n, n, |i, j| {
            let damp = if unitary_only { 1.0 } else { (-self.gamma[(i, j)]).exp() };
            rho0.get(i, j) * Complex64::from_polar(damp, self.phi[(i, j)])
        });
        QubitState::from_matrix_unchecked(m)
    }
}

/// A solver that yields closed-form dephasing profiles.
pub trait Dephasing: Sync {
    fn qubits(&self) -> usize;

    fn profile(&self, t: f64) -> Result<DephasingProfile>;

    /// `γ_ij(t)` alone; defaults to building a full profile.
    fn gamma(&self, i: usize, j: usize, t: f64) -> Result<f64> {
        Ok(self.profile(t)?.gamma(i, j))
    }

    fn reduced_state(&self, rho0: &QubitState, t: f64) -> Result<QubitState> {
        self.profile(t)?.apply(rho0, false)
    }
}
