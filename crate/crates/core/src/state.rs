//! Reduced density matrices of the impurity qubits.
//!
//! Basis index `i = (i_1..i_d)` with qubit 1 as the most significant bit;
//! `i_j = 1` is the excited state. The Pauli convention is `σ^z|1⟩ = +|1⟩`,
//! so `σ^z = diag(-1, +1)` and `σ^y` carries the sign that keeps
//! `σ^x σ^y = i σ^z`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Bit `j` (0-based, qubit 1 first) of basis index `i` for `d` qubits.
#[inline]
pub fn bit(i: usize, j: usize, d: usize) -> usize {
    (i >> (d - 1 - j)) & 1
}

/// Bits of basis index `i`, qubit 1 first.
pub fn bits(i: usize, d: usize) -> Vec<usize> {
    (0..d).map(|j| bit(i, j, d)).collect()
}

pub fn index_of(bits: &[usize]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1))
}

/// Single-qubit Pauli matrices `[I, σx, σy, σz]` in the `(|0⟩, |1⟩)` basis.
pub fn pauli(a: usize) -> [[Complex64; 2]; 2] {
    match a {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, I], [-I, ZERO]],
        3 => [[-ONE, ZERO], [ZERO, ONE]],
        _ => panic!("pauli index {a} out of range"),
    }
}

/// A `2^d × 2^d` density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl QubitState {
    /// Wrap a matrix after checking Hermiticity, unit trace and positivity.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let state = Self::from_matrix_unchecked(matrix)?;
        state.validate()?;
        Ok(state)
    }

    /// Wrap a matrix checking only its shape.
    pub fn from_matrix_unchecked(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "density matrix must be 2^d x 2^d, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = v / Complex64::new(norm, 0.0);
        Self::from_matrix_unchecked(&v * v.adjoint())
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let n = 1 << d;
        Self {
            qubits: d,
            matrix: DMatrix::identity(n, n) / Complex64::new(n as f64, 0.0),
        }
    }

    /// `|+⟩^{⊗d}`.
    pub fn plus(d: usize) -> Self {
        let n = 1 << d;
        Self {
            qubits: d,
            matrix: DMatrix::from_element(n, n, Complex64::new(1.0 / n as f64, 0.0)),
        }
    }

    /// Computational basis state `|i⟩⟨i|`.
    pub fn basis(d: usize, index: usize) -> Self {
        let n = 1 << d;
        let mut matrix = DMatrix::zeros(n, n);
        matrix[(index, index)] = ONE;
        Self { qubits: d, matrix }
    }

    /// `(|0..0⟩ + |1..1⟩)/√2`.
    pub fn ghz(d: usize) -> Self {
        let n = 1 << d;
        let mut amps = vec![ZERO; n];
        amps[0] = ONE;
        amps[n - 1] = ONE;
        Self::from_pure(&amps).expect("nonzero vector")
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn phi_plus() -> Self {
        Self::ghz(2)
    }

    /// `p |ψ⁻⟩⟨ψ⁻| + (1 - p) I/4`.
    pub fn werner(p: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = Self::from_pure(&[
            ZERO,
            Complex64::new(s, 0.0),
            Complex64::new(-s, 0.0),
            ZERO,
        ])
        .expect("nonzero vector");
        let mixed = Self::maximally_mixed(2);
        Self {
            qubits: 2,
            matrix: singlet.matrix * Complex64::new(p, 0.0)
                + mixed.matrix * Complex64::new(1.0 - p, 0.0),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (error {herm:e})")));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = self.eigenvalues()[0];
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `tr[ρ (σ_{a_1} ⊗ … ⊗ σ_{a_d})]` for Pauli labels `a_j ∈ {0,1,2,3}`.
    pub fn pauli_expectation(&self, labels: &[usize]) -> f64 {
        let d = self.qubits;
        assert_eq!(labels.len(), d);
        let n = self.dim();
        // P|b⟩ = phase(b) |b ^ flip⟩
        let mut flip = 0usize;
        for (j, &a) in labels.iter().enumerate() {
            if a == 1 || a == 2 {
                flip |= 1 << (d - 1 - j);
            }
        }
        let mut acc = ZERO;
        for b in 0..n {
            let mut phase = ONE;
            for (j, &a) in labels.iter().enumerate() {
                let bj = bit(b, j, d);
                let p = pauli(a);
                phase *= p[bj ^ usize::from(a == 1 || a == 2)][bj];
            }
            acc += self.matrix[(b, b ^ flip)] * phase;
        }
        acc.re
    }

    /// Apply a unitary `U ρ U†`.
    pub fn conjugate(&self, unitary: &DMatrix<Complex64>) -> Self {
        Self {
            qubits: self.qubits,
            matrix: unitary * &self.matrix * unitary.adjoint(),
        }
    }
}

impl Serialize for QubitState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DensityMatrixRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for QubitState {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = DensityMatrixRepr::deserialize(de)?;
        QubitState::try_from(repr).map_err(serde::de::Error::custom)
    }
}

/// Row-major real/imaginary parts, for JSON exchange.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityMatrixRepr {
    pub qubits: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&QubitState> for DensityMatrixRepr {
    fn from(s: &QubitState) -> Self {
        let n = s.dim();
        let row = |i: usize, f: fn(Complex64) -> f64| (0..n).map(|j| f(s.matrix[(i, j)])).collect();
        Self {
            qubits: s.qubits,
            re: (0..n).map(|i| row(i, |c| c.re)).collect(),
            im: (0..n).map(|i| row(i, |c| c.im)).collect(),
        }
    }
}

impl TryFrom<DensityMatrixRepr> for QubitState {
    type Error = Error;

    fn try_from(r: DensityMatrixRepr) -> Result<Self> {
        let n = 1usize << r.qubits;
        if r.re.len() != n || r.im.len() != n || r.re.iter().chain(&r.im).any(|row| row.len() != n) {
            return Err(Error::Dimension(format!("expected {n}x{n} real and imaginary parts")));
        }
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(r.re[i][j], r.im[i][j]));
        QubitState::new(m)
    }
}

/// `½ ‖ρ - σ‖₁`.
pub fn trace_distance(a: &QubitState, b: &QubitState) -> f64 {
    assert_eq!(a.dim(), b.dim(), "trace distance between different dimensions");
    let diff = a.matrix() - b.matrix();
    let h = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    0.5 * h.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
}

/// Tensor product of single-qubit 2×2 matrices, qubit 1 first.
pub fn kron_all(factors: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

/// Random Haar-distributed single-qubit unitary.
pub fn random_unitary_2<R: rand::Rng + ?Sized>(rng: &mut R) -> DMatrix<Complex64> {
    let mut z = DMatrix::from_fn(2, 2, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    // Gram-Schmidt on columns
    for c in 0..2 {
        for p in 0..c {
            let proj: Complex64 = (0..2).map(|r| z[(r, p)].conj() * z[(r, c)]).sum();
            for r in 0..2 {
                let v = z[(r, p)];
                z[(r, c)] -= proj * v;
            }
        }
        let norm = (0..2).map(|r| z[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..2 {
            z[(r, c)] /= norm;
        }
    }
    z
}

/// Haar-random pure state on `d` qubits.
pub fn random_pure<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> QubitState {
    let amps: Vec<Complex64> = (0..1 << d)
        .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
        .collect();
    QubitState::from_pure(&amps).expect("nonzero with probability one")
}

fn gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(rand_distr::StandardNormal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dense_pauli(a: usize) -> DMatrix<Complex64> {
        let p = pauli(a);
        DMatrix::from_fn(2, 2, |i, j| p[i][j])
    }

    #[test]
    fn pauli_algebra_holds() {
        let (x, y, z) = (dense_pauli(1), dense_pauli(2), dense_pauli(3));
        assert_abs_diff_eq!((&x * &y - &z * I).norm(), 0.0, epsilon = 1e-15);
        // σ^z|1⟩ = +|1⟩
        assert_eq!(z[(1, 1)], ONE);
        assert_eq!(z[(0, 0)], -ONE);
    }

    #[test]
    fn pauli_expectation_matches_dense_trace() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let rho = random_pure(3, &mut rng);
        for labels in [[0, 1, 2], [3, 3, 1], [2, 2, 2], [0, 0, 0], [1, 0, 3]] {
            let op = kron_all(&labels.map(dense_pauli));
            let dense = (rho.matrix() * op).trace().re;
            assert_abs_diff_eq!(rho.pauli_expectation(&labels), dense, epsilon = 1e-13);
        }
    }

    #[test]
    fn bit_order_is_msb_first() {
        assert_eq!(bits(0b100, 3), vec![1, 0, 0]);
        assert_eq!(index_of(&[0, 1, 1]), 3);
    }

    #[test]
    fn validation_catches_bad_trace() {
        let m = DMatrix::identity(2, 2);
        assert!(QubitState::new(m).is_err());
        assert!(QubitState::new(DMatrix::identity(3, 3) / Complex64::new(3.0, 0.0)).is_err());
    }

    #[test]
    fn trace_distance_of_orthogonal_states_is_one() {
        let a = QubitState::basis(2, 0);
        let b = QubitState::basis(2, 3);
        assert_abs_diff_eq!(trace_distance(&a, &b), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(trace_distance(&a, &a), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn json_roundtrip() {
        let s = QubitState::werner(0.3);
        let txt = serde_json::to_string(&s).unwrap();
        let back: QubitState = serde_json::from_str(&txt).unwrap();
        assert_abs_diff_eq!(trace_distance(&s, &back), 0.0, epsilon = 1e-15);
    }
}
