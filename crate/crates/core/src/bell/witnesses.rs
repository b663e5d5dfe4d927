//! WWZB, GTNL, CHSH and Horodecki witnesses.

use nalgebra::Matrix3;
use serde::Serialize;

use crate::bell::correlation::{check_parties, projector_row, CorrelationTensor, PauliTensor, IDENTITY_ROW};
use crate::bell::settings::MeasurementSettings;
use crate::error::{Error, Result};
use crate::state::QubitState;

/// WWZB values above this are reported as nonlocal.
pub const WWZB_THRESHOLD: f64 = 1.0 + 1e-9;

/// `Σ_r |ξ̃(r)|`.
pub fn wwzb_from_pauli(r: &PauliTensor, settings: &MeasurementSettings) -> Result<f64> {
    Ok(CorrelationTensor::from_pauli(r, settings)?
        .xi_tilde()
        .iter()
        .map(|v| v.abs())
        .sum())
}

pub fn wwzb_value(rho: &QubitState, settings: &MeasurementSettings) -> Result<f64> {
    wwzb_from_pauli(&PauliTensor::from_state(rho), settings)
}

/// Three-party inequality value `I`; `I > 0` witnesses genuine tripartite nonlocality.
pub fn gtnl_from_pauli(r: &PauliTensor, settings: &MeasurementSettings) -> Result<f64> {
    if r.qubits() != 3 {
        return Err(Error::Dimension(format!("GTNL needs 3 qubits, got {}", r.qubits())));
    }
    check_parties(3, settings)?;
    let rows: Vec<Vec<[f64; 4]>> = settings
        .vectors()
        .iter()
        .map(|pair| vec![IDENTITY_ROW, projector_row(pair[0]), projector_row(pair[1])])
        .collect();
    let p = r.contract(&rows);
    // 0 = unmeasured, 1 = setting 0, 2 = setting 1
    let at = |a: usize, b: usize, c: usize| p[(a * 3 + b) * 3 + c];
    Ok(-2.0 * (at(2, 2, 0) + at(0, 2, 2) + at(2, 0, 2))
        - (at(1, 1, 2) + at(1, 2, 1) + at(2, 1, 1))
        + 2.0 * (at(2, 2, 1) + at(2, 1, 2) + at(1, 2, 2))
        + 2.0 * at(2, 2, 2))
}

pub fn gtnl_value(rho: &QubitState, settings: &MeasurementSettings) -> Result<f64> {
    if rho.qubits() != 3 {
        return Err(Error::Dimension(format!("GTNL needs 3 qubits, got {}", rho.qubits())));
    }
    gtnl_from_pauli(&PauliTensor::from_state(rho), settings)
}

/// `|ξ(00) + ξ(01) + ξ(10) - ξ(11)|` for two parties.
pub fn chsh_from_pauli(r: &PauliTensor, settings: &MeasurementSettings) -> Result<f64> {
    if r.qubits() != 2 {
        return Err(Error::Dimension(format!("CHSH needs 2 qubits, got {}", r.qubits())));
    }
    let t = CorrelationTensor::from_pauli(r, settings)?;
    let xi = t.xi();
    Ok((xi[0] + xi[1] + xi[2] - xi[3]).abs())
}

pub fn chsh_value(rho: &QubitState, settings: &MeasurementSettings) -> Result<f64> {
    chsh_from_pauli(&PauliTensor::from_state(rho), settings)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Horodecki {
    /// Sum of the two largest eigenvalues of `TᵀT`.
    pub m: f64,
    /// `sqrt(max(0, M - 1))`; positive values witness CHSH violation.
    pub b: f64,
}

/// `T_ij = tr[ρ σ_i ⊗ σ_j]`.
pub fn correlation_matrix(rho: &QubitState) -> Result<Matrix3<f64>> {
    if rho.qubits() != 2 {
        return Err(Error::Dimension(format!("Horodecki criterion needs 2 qubits, got {}", rho.qubits())));
    }
    Ok(Matrix3::from_fn(|i, j| rho.pauli_expectation(&[i + 1, j + 1])))
}

pub fn horodecki(rho: &QubitState) -> Result<Horodecki> {
    let t = correlation_matrix(rho)?;
    let mut eig: Vec<f64> = (t.transpose() * t).symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    let m = eig[0] + eig[1];
    Ok(Horodecki {
        m,
        b: (m - 1.0).max(0.0).sqrt(),
    })
}
