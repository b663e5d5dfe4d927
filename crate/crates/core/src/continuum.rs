//! Large-ring dephasing from momentum integrals with a low-momentum cutoff.
//!
//! Mode sums become `Σ_k → 2M ∫_{q0}^{1/2} dq` with `k a = 2πq`, which gives
//!
//! * `γ_ij(t) = 4η²n0 ∫ (ε_q/ω_q³) sin²(ω_q t/2) S_ij(q) dq`,
//!   `S_ij(q) = |Σ_m e^{2πiql_m}(i_m - j_m)|²`
//! * `Γ0(t) = 4η²n0 ∫ (ε_q/ω_q³) sin²(ω_q t/2) dq`
//! * `Γ(t) = 8η²n0 ∫ (ε_q/ω_q³) sin²(ω_q t/2) cos(2πq(l1 - l2)) dq`, `Γ± = 2Γ0 ± Γ`
//! * `c_jm(t) = η²n0 ∫ (ε_q/ω_q³)(sin ω_q t - ω_q t) cos(2πq(l_j - l_m)) dq`
//!
//! The `f_k²` cross phase is odd in `q` and integrates to zero.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dephasing::{Dephasing, DephasingProfile};
use crate::error::{Error, Result};
use crate::model::{quasiparticle_energy, Model};
use crate::parallel;
use crate::quadrature::{integrate, QuadratureOptions};
use crate::state::{bit, QubitState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumConfig {
    /// Atoms per site.
    pub n0: f64,
    #[serde(rename = "U")]
    pub interaction: f64,
    #[serde(rename = "J", default = "one")]
    pub hopping: f64,
    pub eta: f64,
    #[serde(default = "one")]
    pub omega0: f64,
    /// Low-momentum cutoff, `1/M` for an effective ring of `M` sites.
    pub q0: f64,
    #[serde(default)]
    pub quadrature: QuadratureOptions,
}

fn one() -> f64 {
    1.0
}

impl ContinuumConfig {
    pub fn new(n0: f64, interaction: f64, hopping: f64, eta: f64, omega0: f64, q0: f64) -> Result<Self> {
        let cfg = Self {
            n0,
            interaction,
            hopping,
            eta,
            omega0,
            q0,
            quadrature: QuadratureOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same parameters as a finite `model`, with `q0 = 1/M`.
    pub fn from_model(model: &Model) -> Result<Self> {
        Self::new(
            model.n0,
            model.lattice.interaction,
            model.lattice.hopping,
            model.eta(),
            model.impurities.omega0,
            1.0 / model.lattice.sites as f64,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        for (name, v) in [
            ("n0", self.n0),
            ("U", self.interaction),
            ("J", self.hopping),
            ("eta", self.eta),
            ("omega0", self.omega0),
            ("q0", self.q0),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if !(self.q0 > 0.0 && self.q0 < 0.5) {
            return bad(format!("q0 must lie in (0, 1/2), got {}", self.q0));
        }
        if self.n0 <= 0.0 || self.hopping <= 0.0 {
            return bad("n0 and J must be positive".into());
        }
        if self.interaction < 0.0 || self.eta < 0.0 {
            return bad("U and eta must be nonnegative".into());
        }
        let qo = &self.quadrature;
        if !(qo.rel_tol > 0.0 && qo.abs_tol > 0.0) || qo.max_panels == 0 {
            return bad("quadrature tolerances and panel limit must be positive".into());
        }
        Ok(())
    }

    /// Renormalised splitting `ω0 + η n0`.
    pub fn omega0_bar(&self) -> f64 {
        self.omega0 + self.eta * self.n0
    }

    fn epsilon(&self, q: f64) -> f64 {
        let s = (PI * q).sin();
        4.0 * self.hopping * s * s
    }

    /// `(ε_q, ω_q)`.
    pub fn dispersion(&self, q: f64) -> (f64, f64) {
        let e = self.epsilon(q);
        (e, quasiparticle_energy(e, self.interaction, self.n0))
    }

    /// `ε_q/ω_q³ · sin²(ω_q t/2)`.
    fn kernel(&self, q: f64, t: f64) -> f64 {
        let (e, w) = self.dispersion(q);
        let s = (0.5 * w * t).sin();
        e / (w * w * w) * s * s
    }

    /// Initial panel width resolving both the `ω t` oscillation and a
    /// `cos(2πqΔl)` factor.
    fn panel_width(&self, t: f64, max_dl: f64) -> f64 {
        let (_, w_max) = self.dispersion(0.5);
        let mut width = 0.5 - self.q0;
        if t > 0.0 {
            width = width.min(PI / (w_max * t));
        }
        if max_dl > 0.0 {
            width = width.min(0.25 / max_dl);
        }
        width
    }

    fn integrate<F: Fn(f64) -> f64>(&self, f: F, t: f64, max_dl: f64) -> Result<f64> {
        Ok(integrate(f, self.q0, 0.5, self.panel_width(t, max_dl), &self.quadrature)?.value)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("time must be finite and >= 0, got {t}")))
    }
}

/// Continuum `γ_ij(t)` for impurities on `sites` (1-based), integrating
/// `S_ij(q)` directly.
pub fn gamma_continuum(i: usize, j: usize, t: f64, cfg: &ContinuumConfig, sites: &[usize]) -> Result<f64> {
    check_time(t)?;
    let d = sites.len();
    let terms: Vec<(f64, f64)> = (0..d)
        .filter_map(|m| {
            let diff = bit(i, m, d) as f64 - bit(j, m, d) as f64;
            (diff != 0.0).then_some((diff, sites[m] as f64))
        })
        .collect();
    if terms.is_empty() || t == 0.0 || cfg.eta == 0.0 {
        return Ok(0.0);
    }
    let spread = terms.iter().map(|&(_, l)| l).fold(f64::NEG_INFINITY, f64::max)
        - terms.iter().map(|&(_, l)| l).fold(f64::INFINITY, f64::min);
    let pre = 4.0 * cfg.eta * cfg.eta * cfg.n0;
    let integral = cfg.integrate(
        |q| {
            let (re, im) = terms.iter().fold((0.0, 0.0), |(re, im), &(diff, l)| {
                let (s, c) = (2.0 * PI * q * l).sin_cos();
                (re + diff * c, im + diff * s)
            });
            cfg.kernel(q, t) * (re * re + im * im)
        },
        t,
        spread,
    )?;
    Ok(pre * integral)
}

/// Single-impurity rate `Γ0(t)`.
pub fn gamma0(t: f64, cfg: &ContinuumConfig) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 || cfg.eta == 0.0 {
        return Ok(0.0);
    }
    let pre = 4.0 * cfg.eta * cfg.eta * cfg.n0;
    Ok(pre * cfg.integrate(|q| cfg.kernel(q, t), t, 0.0)?)
}

/// Interference term `Γ(t)` between impurities at `l1` and `l2`.
pub fn gamma_cross(t: f64, cfg: &ContinuumConfig, l1: usize, l2: usize) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 || cfg.eta == 0.0 {
        return Ok(0.0);
    }
    let dl = l1 as f64 - l2 as f64;
    let pre = 8.0 * cfg.eta * cfg.eta * cfg.n0;
    Ok(pre * cfg.integrate(|q| cfg.kernel(q, t) * (2.0 * PI * q * dl).cos(), t, dl.abs())?)
}

/// `(Γ+, Γ-) = (2Γ0 + Γ, 2Γ0 - Γ)`.
pub fn gamma_pm(t: f64, cfg: &ContinuumConfig, l1: usize, l2: usize) -> Result<(f64, f64)> {
    let g0 = gamma0(t, cfg)?;
    let g = gamma_cross(t, cfg, l1, l2)?;
    Ok((2.0 * g0 + g, 2.0 * g0 - g))
}

/// Continuum `c_jm(t)` for impurities at `lj`, `lm`.
pub fn c_continuum(t: f64, cfg: &ContinuumConfig, lj: usize, lm: usize) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 || cfg.eta == 0.0 {
        return Ok(0.0);
    }
    let dl = lj as f64 - lm as f64;
    let pre = cfg.eta * cfg.eta * cfg.n0;
    let integral = cfg.integrate(
        |q| {
            let (e, w) = cfg.dispersion(q);
            e / (w * w * w) * ((w * t).sin() - w * t) * (2.0 * PI * q * dl).cos()
        },
        t,
        dl.abs(),
    )?;
    Ok(pre * integral)
}

/// Continuum dephasing map for impurities on `sites`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumSolver {
    cfg: ContinuumConfig,
    sites: Vec<usize>,
}

impl ContinuumSolver {
    pub fn new(cfg: ContinuumConfig, sites: Vec<usize>) -> Result<Self> {
        cfg.validate()?;
        if sites.is_empty() {
            return Err(Error::InvalidConfig("at least one impurity is required".into()));
        }
        for (a, &l) in sites.iter().enumerate() {
            if l == 0 {
                return Err(Error::InvalidConfig("impurity sites are 1-based".into()));
            }
            if sites[..a].contains(&l) {
                return Err(Error::DuplicateSite(l));
            }
        }
        Ok(Self { cfg, sites })
    }

    pub fn config(&self) -> &ContinuumConfig {
        &self.cfg
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    /// `c_jm(t)` for all impurity pairs.
    pub fn c_matrix(&self, t: f64) -> Result<DMatrix<f64>> {
        let d = self.sites.len();
        // c depends only on |l_j - l_m|
        let mut cache: HashMap<usize, f64> = HashMap::new();
        let mut c = DMatrix::zeros(d, d);
        for j in 0..d {
            for m in 0..d {
                let dl = self.sites[j].abs_diff(self.sites[m]);
                let v = match cache.get(&dl) {
                    Some(&v) => v,
                    None => {
                        let v = c_continuum(t, &self.cfg, dl, 0)?;
                        cache.insert(dl, v);
                        v
                    }
                };
                c[(j, m)] = v;
            }
        }
        Ok(c)
    }

    fn phi(&self, c: &DMatrix<f64>, i: usize, j: usize, t: f64) -> f64 {
        let d = self.sites.len();
        let z = |cfg: usize, s: usize| 2.0 * bit(cfg, s, d) as f64 - 1.0;
        let mut acc = 0.0;
        for s in 0..d {
            let w = 0.5 * self.cfg.omega0_bar() * t + c.row(s).sum();
            acc += w * (z(j, s) - z(i, s));
        }
        for r in 0..d {
            for s in 0..r {
                acc += c[(r, s)] * (z(j, r) * z(j, s) - z(i, r) * z(i, s));
            }
        }
        acc
    }
}

/// `i - j` as a sign-normalised key so that `γ_ij = γ_ji` share an entry.
fn difference_key(i: usize, j: usize, d: usize) -> Vec<i8> {
    let mut key: Vec<i8> = (0..d).map(|m| bit(i, m, d) as i8 - bit(j, m, d) as i8).collect();
    if key.iter().find(|&&v| v != 0).is_some_and(|&v| v < 0) {
        key.iter_mut().for_each(|v| *v = -*v);
    }
    key
}

impl Dephasing for ContinuumSolver {
    fn qubits(&self) -> usize {
        self.sites.len()
    }

    fn profile(&self, t: f64) -> Result<DephasingProfile> {
        let d = self.sites.len();
        let n = 1usize << d;
        let mut reps: HashMap<Vec<i8>, (usize, usize)> = HashMap::new();
        for i in 0..n {
            for j in 0..n {
                reps.entry(difference_key(i, j, d)).or_insert((i, j));
            }
        }
        let reps: Vec<(Vec<i8>, (usize, usize))> = reps.into_iter().collect();
        let values = parallel::map(&reps, |(_, (i, j))| gamma_continuum(*i, *j, t, &self.cfg, &self.sites));
        let mut lookup = HashMap::with_capacity(reps.len());
        for ((key, _), v) in reps.iter().zip(values) {
            lookup.insert(key.clone(), v?);
        }
        let gamma = DMatrix::from_fn(n, n, |i, j| lookup[&difference_key(i, j, d)]);
        let c = self.c_matrix(t)?;
        let phi = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { self.phi(&c, i, j, t) });
        Ok(DephasingProfile::new(t, d, gamma, phi))
    }

    fn gamma(&self, i: usize, j: usize, t: f64) -> Result<f64> {
        gamma_continuum(i, j, t, &self.cfg, &self.sites)
    }
}

/// Two-impurity reduced state in the continuum limit.
pub fn reduced_state_two_impurity_continuum(
    rho0: &QubitState,
    t: f64,
    cfg: &ContinuumConfig,
    l1: usize,
    l2: usize,
) -> Result<QubitState> {
    if rho0.qubits() != 2 {
        return Err(Error::Dimension(format!(
            "continuum reduced state needs 2 qubits, got {}",
            rho0.qubits()
        )));
    }
    ContinuumSolver::new(*cfg, vec![l1, l2])?.reduced_state(rho0, t)
}
