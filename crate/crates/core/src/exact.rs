//! Exact zero-temperature dynamics of the qubits + gas.
//!
//! Every `σ^z_j` is conserved, so the evolution splits into one gas
//! propagation per qubit configuration `i ∈ {0,1}^d` under
//! `H_i = H_BH + η Σ_{j: i_j = 1} n̂_{l_j}`, started from the gas ground
//! state. The reduced state is then
//! `ρ_ij(t) = e^{-i(E_i - E_j)t} ⟨ψ_j(t)|ψ_i(t)⟩ ρ_ij(0)` with the free qubit
//! energy `E_i = (ω0/2) Σ_j (2 i_j - 1)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{build_bh_hamiltonian, FockBasis, DEFAULT_MAX_STATES};
use crate::krylov::{ground_state, EigenOptions, PropagationOptions, Propagator};
use crate::model::{ImpurityConfig, Model};
use crate::parallel;
use crate::sparse::SparseHamiltonian;
use crate::state::{bit, QubitState};

/// Complex amplitudes over a [`FockBasis`].
pub type GasState = Vec<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExactOptions {
    pub max_states: usize,
    pub eigen: EigenOptions,
    pub propagation: PropagationOptions,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            max_states: DEFAULT_MAX_STATES,
            eigen: EigenOptions::default(),
            propagation: PropagationOptions::default(),
        }
    }
}

/// Free qubit energy of configuration `config` (σ^z|1⟩ = +|1⟩).
pub fn qubit_energy(config: usize, d: usize, omega0: f64) -> f64 {
    (0..d)
        .map(|j| 0.5 * omega0 * (2.0 * bit(config, j, d) as f64 - 1.0))
        .sum()
}

/// `H_BH + η Σ_{j: i_j=1} n̂_{l_j}` together with the scalar qubit energy `E_i`.
pub fn conditional_hamiltonian(
    h_bh: &SparseHamiltonian,
    basis: &FockBasis,
    config: usize,
    impurities: &ImpurityConfig,
) -> (SparseHamiltonian, f64) {
    let d = impurities.qubits();
    let mut shift = vec![0.0; basis.len()];
    for j in 0..d {
        if bit(config, j, d) == 1 && impurities.eta != 0.0 {
            let site = impurities.sites[j] - 1;
            for (s, occ) in shift.iter_mut().zip(basis.states()) {
                *s += impurities.eta * occ[site] as f64;
            }
        }
    }
    (
        h_bh.with_diagonal_shift(&shift),
        qubit_energy(config, d, impurities.omega0),
    )
}

/// Exact solver with the gas ground state cached.
#[derive(Debug, Clone)]
pub struct ExactSolver {
    model: Model,
    basis: FockBasis,
    h_bh: SparseHamiltonian,
    ground_energy: f64,
    ground: Vec<f64>,
    opts: ExactOptions,
}

impl ExactSolver {
    pub fn new(model: &Model, opts: ExactOptions) -> Result<Self> {
        let lattice = &model.lattice;
        let basis = FockBasis::with_limit(lattice.sites, lattice.bosons, opts.max_states)?;
        let h_bh = build_bh_hamiltonian(&basis, lattice.hopping, lattice.interaction);
        let (ground_energy, ground) = ground_state(&h_bh, &opts.eigen)?;
        Ok(Self {
            model: model.clone(),
            basis,
            h_bh,
            ground_energy,
            ground,
            opts,
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn hamiltonian(&self) -> &SparseHamiltonian {
        &self.h_bh
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    pub fn ground_state(&self) -> &[f64] {
        &self.ground
    }

    /// Same gas, different coupling; reuses the basis and ground state.
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Ok(Self {
            model: self.model.with_eta(eta)?,
            ..self.clone()
        })
    }

    /// `ψ_i(t) = e^{-iH_i t}|GS⟩` for every configuration `i` and every time.
    /// Indexed `[config][time]`.
    pub fn conditional_trajectories(&self, times: &[f64]) -> Result<Vec<Vec<GasState>>> {
        let d = self.model.qubits();
        let psi0: GasState = self.ground.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        parallel::map_range(1 << d, |config| {
            let (h, _) = conditional_hamiltonian(&self.h_bh, &self.basis, config, &self.model.impurities);
            Propagator::new(&h, self.opts.propagation).trajectory(&psi0, times)
        })
        .into_iter()
        .collect()
    }

    /// Reduced qubit state at each of `times` (nondecreasing, ≥ 0).
    pub fn reduced_states(&self, rho0: &QubitState, times: &[f64]) -> Result<Vec<QubitState>> {
        self.reduced_states_with(rho0, times, false)
    }

    /// As [`reduced_states`](Self::reduced_states); with `unitary_only` each gas
    /// overlap keeps its phase but is rescaled to unit modulus.
    pub fn reduced_states_with(&self, rho0: &QubitState, times: &[f64], unitary_only: bool) -> Result<Vec<QubitState>> {
        let d = self.model.qubits();
        if rho0.qubits() != d {
            return Err(Error::Dimension(format!(
                "initial state has {} qubits, model has {d}",
                rho0.qubits()
            )));
        }
        let trajectories = self.conditional_trajectories(times)?;
        let n = 1 << d;
        let energies: Vec<f64> = (0..n)
            .map(|c| qubit_energy(c, d, self.model.impurities.omega0))
            .collect();
        (0..times.len())
            .map(|ti| {
                let t = times[ti];
                let mut m = rho0.matrix().clone();
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let mut overlap: Complex64 = trajectories[j][ti]
                            .iter()
                            .zip(&trajectories[i][ti])
                            .map(|(a, b)| a.conj() * b)
                            .sum();
                        if unitary_only && overlap.norm() > 0.0 {
                            overlap /= overlap.norm();
                        }
                        let phase = Complex64::from_polar(1.0, -(energies[i] - energies[j]) * t);
                        m[(i, j)] *= phase * overlap;
                    }
                }
                QubitState::from_matrix_unchecked(m)
            })
            .collect()
    }

    pub fn reduced_state(&self, rho0: &QubitState, t: f64) -> Result<QubitState> {
        let mut v = self.reduced_states(rho0, &[t])?;
        Ok(v.pop().expect("one time requested"))
    }
}

/// One-shot exact reduced state at time `t`.
pub fn exact_reduced_state(model: &Model, rho0: &QubitState, t: f64) -> Result<QubitState> {
    ExactSolver::new(model, ExactOptions::default())?.reduced_state(rho0, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LatticeConfig;
    use crate::state::trace_distance;

    fn model(eta: f64) -> Model {
        Model::new(
            LatticeConfig::with_un(3, 1.0, 2.0, 6),
            ImpurityConfig::filled(3, 1.0, eta),
        )
        .unwrap()
    }

    #[test]
    fn vacuum_configuration_is_bare_hamiltonian() {
        let m = model(0.3);
        let solver = ExactSolver::new(&m, ExactOptions::default()).unwrap();
        let (h, e) = conditional_hamiltonian(solver.hamiltonian(), solver.basis(), 0, &m.impurities);
        assert_eq!(&h, solver.hamiltonian());
        assert_eq!(e, -1.5);
    }

    #[test]
    fn zero_coupling_leaves_gas_untouched() {
        let m = model(0.0);
        let solver = ExactSolver::new(&m, ExactOptions::default()).unwrap();
        for c in 0..8 {
            let (h, _) = conditional_hamiltonian(solver.hamiltonian(), solver.basis(), c, &m.impurities);
            assert_eq!(&h, solver.hamiltonian());
        }
        let rho0 = QubitState::plus(3);
        let states = solver.reduced_states(&rho0, &[0.0, 1.0, 3.0]).unwrap();
        for s in &states {
            for i in 0..8 {
                for j in 0..8 {
                    assert!((s.get(i, j).norm() - rho0.get(i, j).norm()).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn first_qubit_excited_couples_to_site_one() {
        let m = model(0.25);
        let solver = ExactSolver::new(&m, ExactOptions::default()).unwrap();
        let (h, _) = conditional_hamiltonian(solver.hamiltonian(), solver.basis(), 0b100, &m.impurities);
        let n1 = solver.basis().number_operator(0);
        for (r, (a, b)) in h.diagonal().iter().zip(solver.hamiltonian().diagonal()).enumerate() {
            assert!((a - b - 0.25 * n1[r]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_time_returns_input() {
        let solver = ExactSolver::new(&model(0.2), ExactOptions::default()).unwrap();
        let rho0 = QubitState::plus(3);
        let out = solver.reduced_state(&rho0, 0.0).unwrap();
        assert!(trace_distance(&out, &rho0) < 1e-12);
    }

    #[test]
    fn unitary_only_preserves_coherence_magnitudes() {
        let solver = ExactSolver::new(&model(0.4), ExactOptions::default()).unwrap();
        let rho0 = QubitState::plus(3);
        let s = solver.reduced_states_with(&rho0, &[2.0], true).unwrap().pop().unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert!((s.get(i, j).norm() - 0.125).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn z_eigenstates_are_stationary() {
        let solver = ExactSolver::new(&model(0.4), ExactOptions::default()).unwrap();
        let rho0 = QubitState::basis(3, 0b101);
        for s in solver.reduced_states(&rho0, &[0.5, 2.0, 6.0]).unwrap() {
            assert!(trace_distance(&s, &rho0) < 1e-12);
        }
    }
}
