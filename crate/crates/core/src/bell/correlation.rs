//! Pauli expansion of a state and the correlators built from it.

use crate::bell::settings::{BlochVector, MeasurementSettings};
use crate::error::{Error, Result};
use crate::state::QubitState;

/// `R_a = tr[ρ σ_{a_1} ⊗ … ⊗ σ_{a_d}]`, `a_j ∈ {0,1,2,3}`, party 1 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTensor {
    qubits: usize,
    r: Vec<f64>,
}

impl PauliTensor {
    pub fn from_state(rho: &QubitState) -> Self {
        let d = rho.qubits();
        let r = (0..1usize << (2 * d))
            .map(|a| {
                let labels: Vec<usize> = (0..d).map(|j| (a >> (2 * (d - 1 - j))) & 3).collect();
                rho.pauli_expectation(&labels)
            })
            .collect();
        Self { qubits: d, r }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn get(&self, labels: &[usize]) -> f64 {
        self.r[labels.iter().fold(0, |acc, &a| 4 * acc + a)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.r
    }

    /// Contract party `j` with each row of `rows[j]`, where a row holds the
    /// Pauli coefficients `(c_0, c_x, c_y, c_z)` of the local operator.
    /// The result is indexed by the row choices, party 1 most significant.
    pub fn contract(&self, rows: &[Vec<[f64; 4]>]) -> Vec<f64> {
        assert_eq!(rows.len(), self.qubits);
        let mut data = self.r.clone();
        let mut dims = vec![4usize; self.qubits];
        for (axis, rs) in rows.iter().enumerate().rev() {
            let pre: usize = dims[..axis].iter().product();
            let post: usize = dims[axis + 1..].iter().product();
            let mut out = vec![0.0; pre * rs.len() * post];
            for p in 0..pre {
                for (s, row) in rs.iter().enumerate() {
                    let dst = &mut out[(p * rs.len() + s) * post..][..post];
                    for (a, &c) in row.iter().enumerate() {
                        if c == 0.0 {
                            continue;
                        }
                        let src = &data[(p * 4 + a) * post..][..post];
                        for (o, v) in dst.iter_mut().zip(src) {
                            *o += c * v;
                        }
                    }
                }
            }
            dims[axis] = rs.len();
            data = out;
        }
        data
    }
}

/// `(0, u)`: Pauli coefficients of `u·σ`.
pub fn observable_row(u: BlochVector) -> [f64; 4] {
    [0.0, u[0], u[1], u[2]]
}

/// `(1/2, u/2)`: Pauli coefficients of the outcome-0 projector `(I + u·σ)/2`.
pub fn projector_row(u: BlochVector) -> [f64; 4] {
    [0.5, 0.5 * u[0], 0.5 * u[1], 0.5 * u[2]]
}

pub const IDENTITY_ROW: [f64; 4] = [1.0, 0.0, 0.0, 0.0];

/// In-place unnormalised Walsh-Hadamard transform; `v.len()` must be a power of two.
pub fn walsh_hadamard(v: &mut [f64]) {
    let n = v.len();
    assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Full correlation function `ξ(s)` and its transform `ξ̃(r) = 2^{-d} Σ_s (-1)^{r·s} ξ(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTensor {
    qubits: usize,
    xi: Vec<f64>,
    xi_tilde: Vec<f64>,
}

impl CorrelationTensor {
    pub fn from_correlators(qubits: usize, xi: Vec<f64>) -> Result<Self> {
        if xi.len() != 1 << qubits {
            return Err(Error::Dimension(format!(
                "{} correlators for {qubits} parties",
                xi.len()
            )));
        }
        let mut xi_tilde = xi.clone();
        walsh_hadamard(&mut xi_tilde);
        let scale = 1.0 / xi.len() as f64;
        xi_tilde.iter_mut().for_each(|v| *v *= scale);
        Ok(Self {
            qubits,
            xi,
            xi_tilde,
        })
    }

    pub fn from_pauli(r: &PauliTensor, settings: &MeasurementSettings) -> Result<Self> {
        check_parties(r.qubits(), settings)?;
        let rows: Vec<Vec<[f64; 4]>> = settings
            .vectors()
            .iter()
            .map(|pair| pair.iter().map(|&u| observable_row(u)).collect())
            .collect();
        Self::from_correlators(r.qubits(), r.contract(&rows))
    }

    pub fn from_state(rho: &QubitState, settings: &MeasurementSettings) -> Result<Self> {
        Self::from_pauli(&PauliTensor::from_state(rho), settings)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// `ξ(s)`, with `s_1` the most significant bit.
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn xi_tilde(&self) -> &[f64] {
        &self.xi_tilde
    }
}

pub(crate) fn check_parties(d: usize, settings: &MeasurementSettings) -> Result<()> {
    if settings.parties() == d {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "{} measurement settings for {d} qubits",
            settings.parties()
        )))
    }
}

/// `ξ(s) = ⟨u^{(1)}_{s_1}·σ ⊗ … ⊗ u^{(d)}_{s_d}·σ⟩`.
pub fn correlator(rho: &QubitState, settings: &MeasurementSettings, s: &[usize]) -> Result<f64> {
    check_parties(rho.qubits(), settings)?;
    if s.len() != rho.qubits() || s.iter().any(|&v| v > 1) {
        return Err(Error::Dimension("setting choices must be d values in {0, 1}".into()));
    }
    let rows: Vec<Vec<[f64; 4]>> = s
        .iter()
        .enumerate()
        .map(|(j, &sj)| vec![observable_row(settings.vector(j, sj))])
        .collect();
    Ok(PauliTensor::from_state(rho).contract(&rows)[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::settings::bloch;
    use crate::state::{kron_all, pauli, random_pure};
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_observable(u: BlochVector) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(2, 2);
        for (a, c) in u.iter().enumerate() {
            let p = pauli(a + 1);
            for r in 0..2 {
                for s in 0..2 {
                    m[(r, s)] += p[r][s] * *c;
                }
            }
        }
        m
    }

    fn random_settings(d: usize, rng: &mut ChaCha8Rng) -> MeasurementSettings {
        let angles: Vec<f64> = (0..4 * d).map(|_| rng.random_range(0.0..6.3)).collect();
        MeasurementSettings::from_angles(&angles).unwrap()
    }

    #[test]
    fn correlators_match_dense_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in 1..=3 {
            let rho = random_pure(d, &mut rng);
            let settings = random_settings(d, &mut rng);
            let tensor = CorrelationTensor::from_state(&rho, &settings).unwrap();
            for s in 0..1usize << d {
                let choice: Vec<usize> = (0..d).map(|j| (s >> (d - 1 - j)) & 1).collect();
                let ops: Vec<_> = (0..d).map(|j| dense_observable(settings.vector(j, choice[j]))).collect();
                let dense = (rho.matrix() * kron_all(&ops)).trace().re;
                assert!((tensor.xi()[s] - dense).abs() < 1e-12);
                assert!((correlator(&rho, &settings, &choice).unwrap() - dense).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn simple_correlators() {
        let x = bloch(std::f64::consts::FRAC_PI_2, 0.0);
        let z = bloch(0.0, 0.0);
        let s = MeasurementSettings::uniform(3, x, z).unwrap();
        assert!(correlator(&QubitState::maximally_mixed(3), &s, &[0, 1, 0]).unwrap().abs() < 1e-15);
        assert!((correlator(&QubitState::basis(3, 0), &s, &[1, 1, 1]).unwrap() + 1.0).abs() < 1e-15);
        assert!((correlator(&QubitState::basis(2, 0), &MeasurementSettings::uniform(2, z, z).unwrap(), &[1, 1]).unwrap() - 1.0).abs() < 1e-15);
        assert!((correlator(&QubitState::ghz(3), &s, &[0, 0, 0]).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn walsh_hadamard_is_an_involution_up_to_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut w = v.clone();
        walsh_hadamard(&mut w);
        walsh_hadamard(&mut w);
        for (a, b) in v.iter().zip(&w) {
            assert!((32.0 * a - b).abs() < 1e-12);
        }
        let t = CorrelationTensor::from_correlators(5, v.clone()).unwrap();
        let mut back = t.xi_tilde().to_vec();
        walsh_hadamard(&mut back);
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_tensor_of_mixed_state() {
        let r = PauliTensor::from_state(&QubitState::maximally_mixed(2));
        assert!((r.get(&[0, 0]) - 1.0).abs() < 1e-15);
        assert!(r.as_slice()[1..].iter().all(|v| v.abs() < 1e-15));
    }
}
