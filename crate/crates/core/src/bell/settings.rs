//! Projective spin measurements, two settings per party.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type BlochVector = [f64; 3];

const UNIT_TOL: f64 = 1e-12;

pub fn bloch(theta: f64, phi: f64) -> BlochVector {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// `u^{(j)}_{s}` for party `j` and setting `s ∈ {0, 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSettings {
    parties: Vec<[BlochVector; 2]>,
}

impl MeasurementSettings {
    pub fn new(parties: Vec<[BlochVector; 2]>) -> Result<Self> {
        for (j, pair) in parties.iter().enumerate() {
            for u in pair {
                let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > UNIT_TOL {
                    return Err(Error::InvalidConfig(format!(
                        "party {j} has a Bloch vector of norm {norm}"
                    )));
                }
            }
        }
        Ok(Self { parties })
    }

    /// Same two settings for every party.
    pub fn uniform(d: usize, u0: BlochVector, u1: BlochVector) -> Result<Self> {
        Self::new(vec![[u0, u1]; d])
    }

    /// From `4d` angles ordered `(θ, φ)` for setting 0 then setting 1 of each party.
    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        if !angles.len().is_multiple_of(4) || angles.is_empty() {
            return Err(Error::Dimension(format!(
                "expected 4 angles per party, got {}",
                angles.len()
            )));
        }
        Ok(Self {
            parties: angles
                .chunks_exact(4)
                .map(|a| [bloch(a[0], a[1]), bloch(a[2], a[3])])
                .collect(),
        })
    }

    /// Inverse of [`from_angles`](Self::from_angles), with `θ ∈ [0, π]`, `φ ∈ (-π, π]`.
    pub fn to_angles(&self) -> Vec<f64> {
        self.parties
            .iter()
            .flat_map(|pair| pair.iter().flat_map(|u| [u[2].clamp(-1.0, 1.0).acos(), u[1].atan2(u[0])]))
            .collect()
    }

    pub fn parties(&self) -> usize {
        self.parties.len()
    }

    pub fn vector(&self, party: usize, setting: usize) -> BlochVector {
        self.parties[party][setting]
    }

    pub fn vectors(&self) -> &[[BlochVector; 2]] {
        &self.parties
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angle_roundtrip() {
        let angles = [0.3, -1.2, 2.0, 0.7, 1.1, 3.0, 0.2, -2.9];
        let s = MeasurementSettings::from_angles(&angles).unwrap();
        let back = MeasurementSettings::from_angles(&s.to_angles()).unwrap();
        for j in 0..2 {
            for k in 0..2 {
                for c in 0..3 {
                    assert!((s.vector(j, k)[c] - back.vector(j, k)[c]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_non_unit_vectors() {
        assert!(MeasurementSettings::new(vec![[[1.0, 0.0, 0.0], [0.0, 0.5, 0.0]]]).is_err());
        assert!(MeasurementSettings::from_angles(&[0.0; 6]).is_err());
        let z = bloch(0.0, 1.0);
        assert_eq!(z, [0.0, 0.0, 1.0]);
        let x = bloch(PI / 2.0, 0.0);
        assert!((x[0] - 1.0).abs() < 1e-15);
    }
}
