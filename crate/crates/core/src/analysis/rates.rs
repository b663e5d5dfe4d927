//! Sign of the dephasing rate `dγ_ij/dt`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bogoliubov::gamma_finite;
use crate::model::{quasiparticle_energy, single_particle_energy, Model};

/// Central-difference step, in units of `1/J`.
pub const RATE_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSign {
    pub t: f64,
    pub gamma: f64,
    /// Numeric `dγ_ij/dt`.
    pub rate: f64,
    /// `d/dt e^{-γ_ij}`: positive when information flows back into the qubits.
    pub trace_distance_rate: f64,
    /// `sign(sin(ω t))` at `k = 2π/3a`, on a three-site ring only.
    pub analytic_sign: Option<f64>,
}

impl RateSign {
    /// Whether the numeric rate carries the analytic sign; `None` off a
    /// three-site ring or within `zero_tol` of a zero.
    pub fn agrees(&self, zero_tol: f64) -> Option<bool> {
        let s = self.analytic_sign?;
        (self.rate.abs() > zero_tol).then(|| self.rate.signum() == s)
    }
}

/// `ω_k` at `k = 2π/(3a)`.
pub fn three_site_frequency(model: &Model) -> f64 {
    let l = &model.lattice;
    let k = 2.0 * PI / (3.0 * l.spacing);
    quasiparticle_energy(single_particle_energy(l.hopping, k, l.spacing), l.interaction, model.n0)
}

pub fn dephasing_rate_sign(model: &Model, i: usize, j: usize, t: f64) -> RateSign {
    let h = RATE_STEP;
    let gamma = gamma_finite(model, i, j, t);
    let lo = (t - h).max(0.0);
    let rate = (gamma_finite(model, i, j, t + h) - gamma_finite(model, i, j, lo)) / (t + h - lo);
    let analytic_sign = (model.lattice.sites == 3).then(|| {
        let s = (three_site_frequency(model) * t).sin();
        if s == 0.0 {
            0.0
        } else {
            s.signum()
        }
    });
    RateSign {
        t,
        gamma,
        rate,
        trace_distance_rate: -rate * (-gamma).exp(),
        analytic_sign,
    }
}
