//! Lanczos ground state and short-iterative-Lanczos propagation `e^{-iHt} ψ`
//! for real symmetric sparse Hamiltonians.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseHamiltonian;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EigenOptions {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Bound on `‖Hψ - Eψ‖`.
    pub residual_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            krylov_dim: 80,
            max_restarts: 200,
            residual_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagationOptions {
    pub krylov_dim: usize,
    /// Allowed local error per unit time.
    pub error_per_time: f64,
    /// Allowed `|‖ψ(t)‖ - ‖ψ(0)‖|` over a trajectory.
    pub norm_tol: f64,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            krylov_dim: 30,
            error_per_time: 1e-10,
            norm_tol: 1e-8,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn cnorm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let m = alpha.len();
    DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    })
}

/// Lowest eigenpair of `h` by restarted Lanczos with full reorthogonalisation.
///
/// The start vector is uniform, which lies in the translation-invariant
/// sector holding the Bose-Hubbard ground state.
pub fn ground_state(h: &SparseHamiltonian, opts: &EigenOptions) -> Result<(f64, Vec<f64>)> {
    let n = h.dim();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut hx = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let scale = h.norm_bound().max(1.0);

    for _ in 0..opts.max_restarts {
        let m = opts.krylov_dim.min(n).max(1);
        let mut basis: Vec<Vec<f64>> = vec![x.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        let mut w = vec![0.0; n];
        loop {
            let j = basis.len() - 1;
            h.apply(&basis[j], &mut w);
            alpha.push(dot(&basis[j], &w));
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
                }
            }
            let b = dot(&w, &w).sqrt();
            if alpha.len() == m || b < 1e-13 * scale {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|v| v / b).collect());
        }
        let eig = SymmetricEigen::new(tridiagonal(&alpha, &beta));
        let (lowest, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty spectrum");
        let y = eig.eigenvectors.column(lowest);
        x = vec![0.0; n];
        for (q, &c) in basis.iter().zip(y.iter()) {
            x.iter_mut().zip(q).for_each(|(xi, qi)| *xi += c * qi);
        }
        let norm = dot(&x, &x).sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        h.apply(&x, &mut hx);
        let energy = dot(&x, &hx);
        residual = hx
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - energy * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual < opts.residual_tol {
            return Ok((energy, x));
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_restarts,
        residual,
    })
}

/// One Krylov step `e^{-iH dt} ψ`, returning the new vector and an error estimate.
fn krylov_step(
    h: &SparseHamiltonian,
    psi: &[Complex64],
    dt: f64,
    krylov_dim: usize,
) -> (Vec<Complex64>, f64) {
    let n = psi.len();
    let beta0 = cnorm(psi);
    if beta0 == 0.0 {
        return (psi.to_vec(), 0.0);
    }
    let m = krylov_dim.min(n).max(1);
    let scale = h.norm_bound().max(1.0);
    let mut basis: Vec<Vec<Complex64>> = vec![psi.iter().map(|v| v / beta0).collect()];
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut tail = 0.0;
    loop {
        let j = basis.len() - 1;
        h.apply_complex(&basis[j], &mut w);
        alpha.push(cdot(&basis[j], &w).re);
        for _ in 0..2 {
            for q in &basis {
                let c = cdot(q, &w);
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let b = cnorm(&w);
        if b < 1e-13 * scale {
            break;
        }
        if alpha.len() == m {
            tail = b;
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|v| v / b).collect());
    }

    let k = alpha.len();
    let eig = SymmetricEigen::new(tridiagonal(&alpha, &beta));
    // c = Q e^{-iΛdt} Qᵀ e1
    let coeffs: Vec<Complex64> = (0..k)
        .map(|r| {
            (0..k)
                .map(|s| {
                    let q = eig.eigenvectors[(r, s)] * eig.eigenvectors[(0, s)];
                    Complex64::from_polar(q, -eig.eigenvalues[s] * dt)
                })
                .sum()
        })
        .collect();
    let error = beta0 * tail * coeffs[k - 1].norm();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (q, c) in basis.iter().zip(&coeffs) {
        let c = c * beta0;
        out.iter_mut().zip(q).for_each(|(o, qi)| *o += c * qi);
    }
    (out, error)
}

/// Adaptive Krylov propagator advancing a state through successive times.
pub struct Propagator<'a> {
    h: &'a SparseHamiltonian,
    opts: PropagationOptions,
    dt: f64,
}

impl<'a> Propagator<'a> {
    pub fn new(h: &'a SparseHamiltonian, opts: PropagationOptions) -> Self {
        let dt = (opts.krylov_dim as f64 * 0.5) / h.norm_bound().max(1e-12);
        Self { h, opts, dt }
    }

    /// Advance `psi` by `duration` in place.
    pub fn advance(&mut self, psi: &mut Vec<Complex64>, duration: f64) -> Result<()> {
        if duration < 0.0 {
            return Err(Error::OutOfRange(format!("negative duration {duration}")));
        }
        let mut elapsed = 0.0;
        while elapsed < duration {
            let dt = self.dt.min(duration - elapsed);
            let (next, err) = krylov_step(self.h, psi, dt, self.opts.krylov_dim);
            if err <= self.opts.error_per_time * dt {
                *psi = next;
                elapsed += dt;
                if err < 0.1 * self.opts.error_per_time * dt && dt == self.dt {
                    self.dt *= 1.5;
                }
            } else {
                self.dt = 0.5 * dt;
                if self.dt < 1e-12 * duration.max(1.0) {
                    return Err(Error::StepUnderflow { t: elapsed });
                }
            }
        }
        Ok(())
    }

    /// States at each of `times` (nondecreasing, ≥ 0), starting from `psi0` at t = 0.
    pub fn trajectory(&mut self, psi0: &[Complex64], times: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        let norm0 = cnorm(psi0);
        let mut psi = psi0.to_vec();
        let mut now = 0.0;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            if t < now {
                return Err(Error::OutOfRange(format!(
                    "times must be nondecreasing and >= 0, got {t} after {now}"
                )));
            }
            self.advance(&mut psi, t - now)?;
            now = t;
            let drift = (cnorm(&psi) - norm0).abs();
            if drift > self.opts.norm_tol {
                return Err(Error::NormDrift {
                    drift,
                    tolerance: self.opts.norm_tol,
                });
            }
            out.push(psi.clone());
        }
        Ok(out)
    }
}

/// `e^{-iHt} ψ0`.
pub fn propagate(
    h: &SparseHamiltonian,
    psi0: &[Complex64],
    t: f64,
    opts: &PropagationOptions,
) -> Result<Vec<Complex64>> {
    let mut out = Propagator::new(h, *opts).trajectory(psi0, &[t])?;
    Ok(out.pop().expect("one time requested"))
}
