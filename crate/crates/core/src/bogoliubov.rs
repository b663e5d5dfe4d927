//! Closed-form reduced qubit state under the Bogoliubov Hamiltonian.
//!
//! The interaction-picture propagator is exactly `exp(Ω1 + Ω2)`: `Ω1`
//! displaces each quasiparticle mode conditionally on the excited qubits and
//! `Ω2` is a qubit-only `ZZ` term. Tracing out the modes yields
//! `ρ_ij(t) = e^{-γ_ij} e^{iφ_ij} ρ_ij(0)` with
//!
//! * `γ_ij(t) = Σ_k ν_k sin²(ω_k t/2) |Σ_m e^{ikal_m}(i_m - j_m)|²`
//! * `φ_ij(t) = Σ_s ω_s(t)((-1)^{i_s} - (-1)^{j_s})
//!            + Σ_{r>s} c_rs(t)((-1)^{j_r+j_s} - (-1)^{i_r+i_s})
//!            + Σ_k Σ_{r,s} f_k²(t) sin(ka(l_r - l_s)) i_r j_s`
//!
//! where `c_jm(t) = ½ Σ_k (ξ_k/ω_k)² (sin ω_k t - ω_k t) cos(ka(l_j - l_m))`
//! and `ω_j(t) = ω̄0 t/2 + Σ_m c_jm(t)`. Constant global phases are dropped,
//! so comparisons with the exact solver must go through trace distance.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dephasing::{Dephasing, DephasingProfile};
use crate::error::Result;
use crate::model::Model;
use crate::state::{bit, QubitState};

#[inline]
fn z(config: usize, j: usize, d: usize) -> f64 {
    2.0 * bit(config, j, d) as f64 - 1.0
}

/// `Σ_m i_m e^{ikal_m}` for every mode, for configuration `config`.
fn mode_amplitudes(model: &Model, config: usize) -> Vec<Complex64> {
    let d = model.qubits();
    model
        .modes()
        .iter()
        .map(|mode| {
            (0..d)
                .filter(|&m| bit(config, m, d) == 1)
                .map(|m| Complex64::from_polar(1.0, model.phase(mode, m)))
                .sum()
        })
        .collect()
}

/// Dephasing exponent `γ_ij(t)`.
pub fn gamma_finite(model: &Model, i: usize, j: usize, t: f64) -> f64 {
    let d = model.qubits();
    model
        .modes()
        .iter()
        .map(|mode| {
            let s = (0.5 * mode.omega * t).sin();
            let amp: Complex64 = (0..d)
                .map(|m| {
                    let diff = bit(i, m, d) as f64 - bit(j, m, d) as f64;
                    Complex64::from_polar(diff, model.phase(mode, m))
                })
                .sum();
            mode.nu * s * s * amp.norm_sqr()
        })
        .sum()
}

/// `ZZ` coefficient `c_jm(t)` for impurities `j`, `m` (0-based).
pub fn c_coeff(model: &Model, j: usize, m: usize, t: f64) -> f64 {
    0.5 * model
        .modes()
        .iter()
        .map(|mode| {
            let r = mode.xi / mode.omega;
            r * r * ((mode.omega * t).sin() - mode.omega * t) * model.phase_difference(mode, j, m).cos()
        })
        .sum::<f64>()
}

/// All `c_jm(t)` as a `d × d` matrix.
pub fn c_matrix(model: &Model, t: f64) -> DMatrix<f64> {
    let d = model.qubits();
    DMatrix::from_fn(d, d, |j, m| c_coeff(model, j, m, t))
}

/// Local phase rates `ω_j(t) = ω̄0 t/2 + Σ_m c_jm(t)`.
pub fn local_phases(model: &Model, c: &DMatrix<f64>, t: f64) -> Vec<f64> {
    (0..model.qubits())
        .map(|j| 0.5 * model.omega0_bar * t + c.row(j).sum())
        .collect()
}

/// The `Σ_k f_k² sin(ka(l_r - l_s)) i_r j_s` part of `φ_ij`.
fn cross_phase(model: &Model, i: usize, j: usize, t: f64) -> f64 {
    let d = model.qubits();
    let mut acc = 0.0;
    for mode in model.modes() {
        let f = mode.f(t);
        for r in 0..d {
            if bit(i, r, d) == 0 {
                continue;
            }
            for s in 0..d {
                if bit(j, s, d) == 1 {
                    acc += f * f * model.phase_difference(mode, r, s).sin();
                }
            }
        }
    }
    acc
}

fn phi_from_parts(model: &Model, c: &DMatrix<f64>, omegas: &[f64], i: usize, j: usize, t: f64) -> f64 {
    let d = model.qubits();
    let mut local = 0.0;
    for (s, w) in omegas.iter().enumerate() {
        // (-1)^{i_s} = -z
        local += w * (z(j, s, d) - z(i, s, d));
    }
    let mut zz = 0.0;
    for r in 0..d {
        for s in 0..r {
            zz += c[(r, s)] * (z(j, r, d) * z(j, s, d) - z(i, r, d) * z(i, s, d));
        }
    }
    local + zz + cross_phase(model, i, j, t)
}

/// Phase `φ_ij(t)`.
pub fn phi(model: &Model, i: usize, j: usize, t: f64) -> f64 {
    let c = c_matrix(model, t);
    let omegas = local_phases(model, &c, t);
    phi_from_parts(model, &c, &omegas, i, j, t)
}

/// Diagonal of the effective qubit Hamiltonian
/// `ĥ(t) = Σ_j ω_j(t) σ^z_j + Σ_{j>m} c_jm(t) σ^z_j σ^z_m`.
pub fn effective_energies(model: &Model, t: f64) -> Vec<f64> {
    let d = model.qubits();
    let c = c_matrix(model, t);
    let omegas = local_phases(model, &c, t);
    (0..1usize << d)
        .map(|i| {
            let mut h: f64 = omegas.iter().enumerate().map(|(j, w)| w * z(i, j, d)).sum();
            for j in 0..d {
                for m in 0..j {
                    h += c[(j, m)] * z(i, j, d) * z(i, m, d);
                }
            }
            h
        })
        .collect()
}

/// `ĥ(t)` as a diagonal `2^d × 2^d` matrix.
pub fn effective_hamiltonian(model: &Model, t: f64) -> DMatrix<Complex64> {
    let e = effective_energies(model, t);
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        e.len(),
        e.iter().map(|&v| Complex64::new(v, 0.0)),
    ))
}

/// `e^{-iĥ(t)}`.
pub fn effective_unitary(model: &Model, t: f64) -> DMatrix<Complex64> {
    let e = effective_energies(model, t);
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        e.len(),
        e.iter().map(|&v| Complex64::from_polar(1.0, -v)),
    ))
}

/// Conditional displacement `x_i^k(t) = (ξ_k/ω_k)(1 - e^{iω_k t}) Σ_m i_m e^{ikal_m}`,
/// one entry per mode.
pub fn displacements(model: &Model, config: usize, t: f64) -> Vec<Complex64> {
    model
        .modes()
        .iter()
        .zip(mode_amplitudes(model, config))
        .map(|(mode, a)| {
            let pre = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, mode.omega * t)) * (mode.xi / mode.omega);
            pre * a
        })
        .collect()
}

/// Coherent-state overlap `⟨x|y⟩ = exp(-|x|²/2 - |y|²/2 + x̄ y)`.
pub fn glauber_overlap(x: Complex64, y: Complex64) -> Complex64 {
    (-0.5 * x.norm_sqr() - 0.5 * y.norm_sqr() + x.conj() * y).exp()
}

/// Bogoliubov-approximation solver.
#[derive(Debug, Clone)]
pub struct BogoliubovSolver {
    model: Model,
}

impl BogoliubovSolver {
    pub fn new(model: &Model) -> Self {
        Self {
            model: model.clone(),
        }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }
}

impl Dephasing for BogoliubovSolver {
    fn qubits(&self) -> usize {
        self.model.qubits()
    }

    fn profile(&self, t: f64) -> Result<DephasingProfile> {
        let model = &self.model;
        let d = model.qubits();
        let n = 1usize << d;
        let c = c_matrix(model, t);
        let omegas = local_phases(model, &c, t);
        let amps: Vec<Vec<Complex64>> = (0..n).map(|i| mode_amplitudes(model, i)).collect();
        let weights: Vec<f64> = model
            .modes()
            .iter()
            .map(|mode| {
                let s = (0.5 * mode.omega * t).sin();
                mode.nu * s * s
            })
            .collect();
        let gamma = DMatrix::from_fn(n, n, |i, j| {
            weights
                .iter()
                .zip(amps[i].iter().zip(&amps[j]))
                .map(|(w, (a, b))| w * (a - b).norm_sqr())
                .sum()
        });
        let phi = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                phi_from_parts(model, &c, &omegas, i, j, t)
            }
        });
        Ok(DephasingProfile::new(t, d, gamma, phi))
    }

    fn gamma(&self, i: usize, j: usize, t: f64) -> Result<f64> {
        Ok(gamma_finite(&self.model, i, j, t))
    }
}

/// `ρ_S(t)` under the Bogoliubov approximation.
pub fn reduced_state_bogoliubov(rho0: &QubitState, t: f64, model: &Model) -> Result<QubitState> {
    BogoliubovSolver::new(model).reduced_state(rho0, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ImpurityConfig, LatticeConfig};
    use crate::state::{random_pure, trace_distance};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model(m: usize, d: usize, eta: f64) -> Model {
        Model::new(
            LatticeConfig::with_un(m, 1.0, 2.0, 100),
            ImpurityConfig::filled(d, 1.0, eta),
        )
        .unwrap()
    }

    #[test]
    fn single_qubit_gamma_closed_form() {
        let eta = 0.3;
        let m = model(3, 1, eta);
        // ν = 2η² n0 ε / (ω³ M) with n0 = 100/3, ε = 3, ω = √13
        let nu = 2.0 * eta * eta * (100.0 / 3.0) * 3.0 / (13f64.powf(1.5) * 3.0);
        assert_abs_diff_eq!(nu / (eta * eta), 1.4223, epsilon = 1e-4);
        for t in [0.0, 0.3, 1.7, 5.0] {
            let expected = 2.0 * nu * (13f64.sqrt() * t / 2.0).sin().powi(2);
            assert_abs_diff_eq!(gamma_finite(&m, 1, 0, t), expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn trivial_gammas_vanish() {
        let m = model(5, 3, 0.2);
        assert_eq!(gamma_finite(&m, 0b101, 0b101, 3.0), 0.0);
        assert_eq!(gamma_finite(&m, 0b101, 0b010, 0.0), 0.0);
    }

    #[test]
    fn c_coeff_properties() {
        let m = model(5, 3, 0.2);
        assert_eq!(c_coeff(&m, 0, 1, 0.0), 0.0);
        assert_eq!(c_coeff(&model(5, 3, 0.0), 0, 1, 2.0), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let t = rng.random_range(0.0..20.0);
            assert_abs_diff_eq!(c_coeff(&m, 0, 2, t), c_coeff(&m, 2, 0, t), epsilon = 1e-15);
        }
    }

    #[test]
    fn phi_properties() {
        let m = model(4, 3, 0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let (i, j) = (rng.random_range(0..8), rng.random_range(0..8));
            let t = rng.random_range(0.0..15.0);
            assert_abs_diff_eq!(phi(&m, i, j, t), -phi(&m, j, i, t), epsilon = 1e-12);
            assert_abs_diff_eq!(phi(&m, i, i, t), 0.0, epsilon = 1e-12);
        }
        // bare precession only
        let free = model(4, 3, 0.0);
        let t = 2.5;
        for (i, j) in [(0b000, 0b111), (0b100, 0b010), (0b110, 0b001)] {
            let expected: f64 = (0..3)
                .map(|s| {
                    let si = if bit(i, s, 3) == 1 { -1.0 } else { 1.0 };
                    let sj = if bit(j, s, 3) == 1 { -1.0 } else { 1.0 };
                    0.5 * t * (si - sj)
                })
                .sum();
            assert_abs_diff_eq!(phi(&free, i, j, t), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn gamma_and_c_scale_as_eta_squared() {
        let a = model(5, 3, 0.1);
        let b = model(5, 3, 0.3);
        for t in [0.7, 4.0] {
            assert_abs_diff_eq!(gamma_finite(&b, 5, 2, t), 9.0 * gamma_finite(&a, 5, 2, t), epsilon = 1e-12);
            assert_abs_diff_eq!(c_coeff(&b, 0, 1, t), 9.0 * c_coeff(&a, 0, 1, t), epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonal_states_are_stationary() {
        let m = model(5, 3, 0.3);
        let rho0 = QubitState::basis(3, 0b011);
        for t in [0.0, 1.0, 7.0] {
            let out = reduced_state_bogoliubov(&rho0, t, &m).unwrap();
            assert!(trace_distance(&out, &rho0) < 1e-14);
        }
        let out = reduced_state_bogoliubov(&QubitState::plus(3), 0.0, &m).unwrap();
        assert!(trace_distance(&out, &QubitState::plus(3)) < 1e-14);
    }

    #[test]
    fn output_is_a_valid_state() {
        let m = model(5, 3, 0.4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let rho0 = random_pure(3, &mut rng);
            let t = rng.random_range(0.0..30.0);
            reduced_state_bogoliubov(&rho0, t, &m).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn single_qubit_effective_hamiltonian() {
        let m = model(3, 1, 0.2);
        let t = 1.3;
        let c = c_matrix(&m, t);
        let w = local_phases(&m, &c, t)[0];
        let e = effective_energies(&m, t);
        assert_abs_diff_eq!(e[0], -w, epsilon = 1e-15);
        assert_abs_diff_eq!(e[1], w, epsilon = 1e-15);

        let free = model(3, 2, 0.0);
        let e = effective_energies(&free, 2.0);
        assert_abs_diff_eq!(e[0b11], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[0b00], -2.0, epsilon = 1e-15);
    }

    #[test]
    fn effective_unitary_reproduces_phases() {
        // f_k² cross term cancels between k and 2π/a - k on the full grid
        for (mm, d) in [(3, 1), (4, 2), (5, 3)] {
            let m = model(mm, d, 0.3);
            let t = 2.7;
            let rho0 = QubitState::plus(d);
            let unitary = rho0.conjugate(&effective_unitary(&m, t));
            let solver = BogoliubovSolver::new(&m);
            let via_phi = solver.profile(t).unwrap().apply(&rho0, true).unwrap();
            assert!(trace_distance(&unitary, &via_phi) < 1e-12);
        }
    }

    #[test]
    fn glauber_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y = Complex64::new(0.7, -0.4);
        assert_abs_diff_eq!((glauber_overlap(y, y) - 1.0).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            (glauber_overlap(Complex64::new(0.0, 0.0), y) - (-0.5 * y.norm_sqr()).exp()).norm(),
            0.0,
            epsilon = 1e-15
        );
        for _ in 0..50 {
            let x = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let y = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let lhs = glauber_overlap(x, y).norm();
            let rhs = (-0.5 * (x - y).norm_sqr()).exp();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-14);
        }
    }
}
