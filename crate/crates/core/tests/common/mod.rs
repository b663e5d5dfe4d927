//! Dense full-tensor reference evolution of qubits + gas, built directly
//! from Kronecker products without the per-configuration decomposition.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use coldbell::model::Model;
use coldbell::state::QubitState;

/// Occupation vectors of `n` bosons on `m` sites, in no particular order.
pub fn fock_states(m: usize, n: usize) -> Vec<Vec<usize>> {
    if m == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in fock_states(m - 1, n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `-J Σ_j (a†_j a_{j+1} + h.c.) + U/2 Σ_j n_j(n_j - 1)` on a ring, summing
/// the bond term over every site `j` (so a two-site ring counts its bond twice).
pub fn dense_bose_hubbard(states: &[Vec<usize>], hopping: f64, interaction: f64) -> DMatrix<f64> {
    let dim = states.len();
    let m = states[0].len();
    let find = |s: &Vec<usize>| states.iter().position(|x| x == s).unwrap();
    let mut h = DMatrix::zeros(dim, dim);
    for (c, s) in states.iter().enumerate() {
        h[(c, c)] += 0.5 * interaction * s.iter().map(|&n| (n * n.saturating_sub(1)) as f64).sum::<f64>();
        for j in 0..m {
            let k = (j + 1) % m;
            for (to, from) in [(j, k), (k, j)] {
                if s[from] == 0 {
                    continue;
                }
                let mut t = s.clone();
                let amp = ((s[from] as f64) * (s[to] as f64 + 1.0)).sqrt();
                t[from] -= 1;
                t[to] += 1;
                h[(find(&t), c)] -= hopping * amp;
            }
        }
    }
    h
}

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Full Hamiltonian on `(C²)^{⊗d} ⊗ gas`.
pub fn dense_full_hamiltonian(model: &Model, states: &[Vec<usize>]) -> DMatrix<f64> {
    let d = model.qubits();
    let dim = states.len();
    let id2 = DMatrix::<f64>::identity(2, 2);
    let sz = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
    let excited = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
    let on_qubit = |op: &DMatrix<f64>, j: usize| {
        (0..d).fold(DMatrix::<f64>::identity(1, 1), |acc, q| {
            kron(&acc, if q == j { op } else { &id2 })
        })
    };
    let id_gas = DMatrix::<f64>::identity(dim, dim);
    let id_q = DMatrix::<f64>::identity(1 << d, 1 << d);
    let lattice = &model.lattice;
    let mut h = kron(&id_q, &dense_bose_hubbard(states, lattice.hopping, lattice.interaction));
    for j in 0..d {
        h += kron(&on_qubit(&sz, j), &id_gas) * (0.5 * model.impurities.omega0);
        let site = model.impurities.sites[j] - 1;
        let n_site = DMatrix::from_diagonal(&DVector::from_iterator(dim, states.iter().map(|s| s[site] as f64)));
        h += kron(&on_qubit(&excited, j), &n_site) * model.eta();
    }
    h
}

/// Reduced qubit states of `ρ_S(0) ⊗ |GS⟩⟨GS|` evolved with the full Hamiltonian.
pub fn dense_reduced_states(model: &Model, rho0: &QubitState, times: &[f64]) -> Vec<QubitState> {
    let lattice = &model.lattice;
    let states = fock_states(lattice.sites, lattice.bosons);
    let dim = states.len();
    let gas = SymmetricEigen::new(dense_bose_hubbard(&states, lattice.hopping, lattice.interaction));
    let g = gas.eigenvalues.imin();
    let ground = gas.eigenvectors.column(g).map(|v| Complex64::new(v, 0.0));
    let ground_proj = &ground * ground.adjoint();
    let rho_full = rho0.matrix().kronecker(&ground_proj);
    let full = SymmetricEigen::new(dense_full_hamiltonian(model, &states));
    let v = full.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let nq = rho0.dim();
    times
        .iter()
        .map(|&t| {
            let phases = DVector::from_iterator(
                full.eigenvalues.len(),
                full.eigenvalues.iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
            );
            let u = &v * DMatrix::from_diagonal(&phases) * v.adjoint();
            let rt = &u * &rho_full * u.adjoint();
            let reduced = DMatrix::from_fn(nq, nq, |a, b| (0..dim).map(|g| rt[(a * dim + g, b * dim + g)]).sum());
            QubitState::from_matrix_unchecked(reduced).unwrap()
        })
        .collect()
}
