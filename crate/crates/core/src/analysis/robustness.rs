//! Robustness of nonlocality against white noise.

use serde::{Deserialize, Serialize};

use crate::bell::{horodecki, optimize_bell, optimize_bell_from, BellOptimum, Witness};
use crate::error::{Error, Result};
use crate::optimize::MultistartOptions;
use crate::state::QubitState;

/// `p ρ + (1 - p) I / 2^d`.
pub fn depolarize(rho: &QubitState, p: f64) -> Result<QubitState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("mixing weight p must lie in [0, 1], got {p}")));
    }
    let n = rho.dim();
    let mut m = rho.matrix() * num_complex::Complex64::new(p, 0.0);
    for i in 0..n {
        m[(i, i)] += (1.0 - p) / n as f64;
    }
    QubitState::from_matrix_unchecked(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BisectionOptions {
    pub lower: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for BisectionOptions {
    fn default() -> Self {
        Self {
            lower: 0.01,
            max_iterations: 40,
            tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PStarMethod {
    /// From the linear (or quadratic) scaling of the witness with `p`.
    Scaling,
    Bisection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PStar {
    /// Smallest mixing weight keeping the state nonlocal; `None` when the
    /// undepolarised state shows no violation.
    pub value: Option<f64>,
    /// Witness value at `p = 1`.
    pub violation: f64,
    pub method: PStarMethod,
    /// `false` if any inner optimisation hit its evaluation budget.
    pub converged: bool,
}

/// `p*` via the scaling shortcut: WWZB and CHSH scale linearly in `p`,
/// the Horodecki `M` quadratically. GTNL falls back to bisection.
pub fn pstar(rho: &QubitState, witness: Witness, opts: &MultistartOptions) -> Result<PStar> {
    witness.check_qubits(rho.qubits())?;
    match witness {
        Witness::Horodecki => {
            let h = horodecki(rho)?;
            Ok(PStar {
                value: (h.m > 1.0).then(|| 1.0 / h.m.sqrt()),
                violation: h.b,
                method: PStarMethod::Scaling,
                converged: true,
            })
        }
        Witness::Wwzb | Witness::Chsh => {
            let best = optimize_bell(rho, witness, opts)?;
            Ok(scaling_from_optimum(&best))
        }
        Witness::Gtnl => pstar_bisection(rho, witness, opts, &BisectionOptions::default()),
    }
}

/// Shortcut `p* = threshold / V` for an already optimised linear witness.
pub fn scaling_from_optimum(best: &BellOptimum) -> PStar {
    let bound = match best.witness {
        Witness::Chsh => 2.0,
        _ => 1.0,
    };
    PStar {
        value: best.nonlocal().then(|| bound / best.value),
        violation: best.value,
        method: PStarMethod::Scaling,
        converged: best.converged,
    }
}

/// `p*` by bisection on `p`, re-optimising the settings at every step.
/// Relies on the optimised witness being convex in `p` and local at `p = 0`.
pub fn pstar_bisection(
    rho: &QubitState,
    witness: Witness,
    opts: &MultistartOptions,
    bisection: &BisectionOptions,
) -> Result<PStar> {
    witness.check_qubits(rho.qubits())?;
    if witness == Witness::Horodecki {
        return Err(Error::InvalidConfig("horodecki p* has a closed form; use pstar".into()));
    }
    let top = optimize_bell(rho, witness, opts)?;
    pstar_bisection_from(rho, &top, opts, bisection)
}

/// [`pstar_bisection`] reusing an optimum already found at `p = 1`.
pub fn pstar_bisection_from(
    rho: &QubitState,
    top: &BellOptimum,
    opts: &MultistartOptions,
    bisection: &BisectionOptions,
) -> Result<PStar> {
    let witness = top.witness;
    let mut converged = top.converged;
    if !top.nonlocal() {
        return Ok(PStar {
            value: None,
            violation: top.value,
            method: PStarMethod::Bisection,
            converged,
        });
    }
    let warm: Vec<_> = top.settings.iter().cloned().collect();
    let mut nonlocal_at = |p: f64| -> Result<bool> {
        let best = optimize_bell_from(&depolarize(rho, p)?, witness, opts, &warm)?;
        converged &= best.converged;
        Ok(best.nonlocal())
    };
    let (mut lo, mut hi) = (bisection.lower, 1.0);
    if nonlocal_at(lo)? {
        hi = lo;
    } else {
        for _ in 0..bisection.max_iterations {
            if hi - lo <= bisection.tolerance {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if nonlocal_at(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    Ok(PStar {
        value: Some(hi),
        violation: top.value,
        method: PStarMethod::Bisection,
        converged,
    })
}
