//! Physical configuration and the Bogoliubov quasiparticle spectrum of the ring.
//!
//! Units: ħ = 1, energies in units of the hopping `J` unless a different
//! value is supplied, lattice constant `a = 1` by default.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bose-Hubbard ring parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    /// Number of sites `M` on the ring.
    #[serde(rename = "M")]
    pub sites: usize,
    /// Hopping energy `J`.
    #[serde(rename = "J", default = "one")]
    pub hopping: f64,
    /// On-site interaction `U`.
    #[serde(rename = "U")]
    pub interaction: f64,
    /// Total boson number `N`.
    #[serde(rename = "N")]
    pub bosons: usize,
    /// Lattice constant `a`.
    #[serde(rename = "a", default = "one")]
    pub spacing: f64,
    /// Quasicondensate density; `N / M` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0_override: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl LatticeConfig {
    pub fn new(sites: usize, hopping: f64, interaction: f64, bosons: usize) -> Self {
        Self {
            sites,
            hopping,
            interaction,
            bosons,
            spacing: 1.0,
            n0_override: None,
        }
    }

    /// Lattice with the interaction given through the product `U N`.
    pub fn with_un(sites: usize, hopping: f64, un: f64, bosons: usize) -> Self {
        Self::new(sites, hopping, un / bosons as f64, bosons)
    }
}

/// Impurity qubits embedded in the ring, one per listed site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpurityConfig {
    /// Site indices `l_1..l_d`, 1-based.
    pub sites: Vec<usize>,
    /// Bare qubit splitting.
    #[serde(default = "one")]
    pub omega0: f64,
    /// Qubit-gas coupling.
    pub eta: f64,
}

impl ImpurityConfig {
    pub fn new(sites: Vec<usize>, omega0: f64, eta: f64) -> Self {
        Self { sites, omega0, eta }
    }

    /// One impurity on each of the first `d` sites.
    pub fn filled(d: usize, omega0: f64, eta: f64) -> Self {
        Self::new((1..=d).collect(), omega0, eta)
    }

    pub fn qubits(&self) -> usize {
        self.sites.len()
    }
}

/// One quasiparticle mode at quasimomentum `k = 2πm / (M a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BogoliubovMode {
    pub m: usize,
    pub k: f64,
    /// Single-particle energy `4J sin²(ka/2)`.
    pub epsilon: f64,
    /// Quasiparticle energy `sqrt(ε² + 2 U n0 ε)`.
    pub omega: f64,
    /// Qubit-mode coupling `η sqrt(n0 ε / (ω M))`.
    pub xi: f64,
    /// Dephasing weight `2 η² n0 ε / (ω³ M)`.
    pub nu: f64,
}

impl BogoliubovMode {
    /// `f_k(t) = 2 ξ sin(ω t / 2) / ω`.
    pub fn f(&self, t: f64) -> f64 {
        2.0 * self.xi * (0.5 * self.omega * t).sin() / self.omega
    }
}

pub fn single_particle_energy(hopping: f64, k: f64, spacing: f64) -> f64 {
    let s = (0.5 * k * spacing).sin();
    4.0 * hopping * s * s
}

pub fn quasiparticle_energy(epsilon: f64, interaction: f64, n0: f64) -> f64 {
    (epsilon * epsilon + 2.0 * interaction * n0 * epsilon).sqrt()
}

/// Validated lattice + impurity configuration with derived quantities.
#[derive(Debug, Clone, Serialize)]
pub struct Model {
    pub lattice: LatticeConfig,
    pub impurities: ImpurityConfig,
    /// Quasicondensate density.
    pub n0: f64,
    /// Renormalised splitting `ω0 + η n0`.
    pub omega0_bar: f64,
    #[serde(skip)]
    modes: OnceLock<Vec<BogoliubovMode>>,
}

impl Model {
    pub fn new(lattice: LatticeConfig, impurities: ImpurityConfig) -> Result<Self> {
        validate_config(lattice, impurities)
    }

    /// Computed on first use; large continuum-scale rings never build it.
    pub fn modes(&self) -> &[BogoliubovMode] {
        self.modes
            .get_or_init(|| compute_modes(&self.lattice, self.impurities.eta, self.n0))
    }

    pub fn qubits(&self) -> usize {
        self.impurities.sites.len()
    }

    pub fn eta(&self) -> f64 {
        self.impurities.eta
    }

    /// Same physical setup with a different coupling.
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        let mut imp = self.impurities.clone();
        imp.eta = eta;
        Self::new(self.lattice.clone(), imp)
    }

    /// `k a (l_j - l_m)` for mode `k` and impurities `j`, `m` (0-based).
    pub(crate) fn phase_difference(&self, mode: &BogoliubovMode, j: usize, m: usize) -> f64 {
        let lj = self.impurities.sites[j] as f64;
        let lm = self.impurities.sites[m] as f64;
        mode.k * self.lattice.spacing * (lj - lm)
    }

    /// `k a l_j` for impurity `j` (0-based).
    pub(crate) fn phase(&self, mode: &BogoliubovMode, j: usize) -> f64 {
        mode.k * self.lattice.spacing * self.impurities.sites[j] as f64
    }
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice && self.impurities == other.impurities && self.n0 == other.n0
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must be finite, got {v}")))
    }
}

/// Check every invariant and populate `n0` and `ω̄0`.
pub fn validate_config(lattice: LatticeConfig, impurities: ImpurityConfig) -> Result<Model> {
    let m = lattice.sites;
    if m < 2 {
        return Err(Error::InvalidConfig(format!("ring needs M >= 2 sites, got {m}")));
    }
    for (name, v) in [
        ("J", lattice.hopping),
        ("U", lattice.interaction),
        ("a", lattice.spacing),
        ("omega0", impurities.omega0),
        ("eta", impurities.eta),
    ] {
        check_finite(name, v)?;
    }
    if lattice.hopping <= 0.0 {
        return Err(Error::InvalidConfig(format!("J must be > 0, got {}", lattice.hopping)));
    }
    if lattice.interaction < 0.0 {
        return Err(Error::InvalidConfig(format!("U must be >= 0, got {}", lattice.interaction)));
    }
    if lattice.bosons == 0 {
        return Err(Error::InvalidConfig("N must be >= 1".into()));
    }
    if lattice.spacing <= 0.0 {
        return Err(Error::InvalidConfig(format!("a must be > 0, got {}", lattice.spacing)));
    }
    if impurities.eta < 0.0 {
        return Err(Error::InvalidConfig(format!("eta must be >= 0, got {}", impurities.eta)));
    }
    let d = impurities.sites.len();
    if d == 0 {
        return Err(Error::InvalidConfig("at least one impurity is required".into()));
    }
    if d > m {
        return Err(Error::InvalidConfig(format!("d = {d} impurities exceed M = {m} sites")));
    }
    let mut seen = vec![false; m + 1];
    for &l in &impurities.sites {
        if l == 0 || l > m {
            return Err(Error::InvalidConfig(format!("impurity site {l} outside 1..={m}")));
        }
        if seen[l] {
            return Err(Error::DuplicateSite(l));
        }
        seen[l] = true;
    }

    let n0 = match lattice.n0_override {
        Some(v) => {
            check_finite("n0_override", v)?;
            v
        }
        None => lattice.bosons as f64 / m as f64,
    };
    if n0 <= 0.0 {
        return Err(Error::InvalidConfig(format!("n0 must be > 0, got {n0}")));
    }
    let omega0_bar = impurities.omega0 + impurities.eta * n0;
    Ok(Model {
        lattice,
        impurities,
        n0,
        omega0_bar,
        modes: OnceLock::new(),
    })
}

fn compute_modes(lattice: &LatticeConfig, eta: f64, n0: f64) -> Vec<BogoliubovMode> {
    let m_sites = lattice.sites;
    let mf = m_sites as f64;
    (1..m_sites)
        .map(|m| {
            let k = 2.0 * PI * m as f64 / (mf * lattice.spacing);
            let epsilon = single_particle_energy(lattice.hopping, k, lattice.spacing);
            let omega = quasiparticle_energy(epsilon, lattice.interaction, n0);
            let xi = eta * (n0 * epsilon / (omega * mf)).sqrt();
            let nu = 2.0 * eta * eta * n0 * epsilon / (omega.powi(3) * mf);
            BogoliubovMode {
                m,
                k,
                epsilon,
                omega,
                xi,
                nu,
            }
        })
        .collect()
}

/// The `M - 1` quasiparticle modes (`k = 0` excluded).
pub fn bogoliubov_modes(model: &Model) -> &[BogoliubovMode] {
    model.modes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig1() -> Model {
        let lattice = LatticeConfig::new(3, 1.0, 0.02, 100);
        Model::new(lattice, ImpurityConfig::filled(3, 1.0, 0.1)).unwrap()
    }

    #[test]
    fn fig1_config_is_valid() {
        let model = fig1();
        assert_relative_eq!(model.n0, 100.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(model.omega0_bar, 1.0 + 0.1 * 100.0 / 3.0, epsilon = 1e-14);
        assert_eq!(model.modes().len(), 2);
    }

    #[test]
    fn fig2_config_is_valid() {
        let lattice = LatticeConfig::new(5, 1.0, 0.002, 1000);
        assert!(Model::new(lattice, ImpurityConfig::filled(5, 1.0, 0.05)).is_ok());
    }

    #[test]
    fn duplicate_site_rejected() {
        let lattice = LatticeConfig::new(3, 1.0, 0.02, 100);
        let err = Model::new(lattice, ImpurityConfig::new(vec![1, 1, 2], 1.0, 0.1)).unwrap_err();
        assert_eq!(err, Error::DuplicateSite(1));
    }

    #[test]
    fn bad_parameters_rejected() {
        let imp = ImpurityConfig::filled(2, 1.0, 0.1);
        let mut l = LatticeConfig::new(3, 1.0, 0.02, 100);
        l.hopping = 0.0;
        assert!(Model::new(l.clone(), imp.clone()).is_err());
        l.hopping = 1.0;
        l.bosons = 0;
        assert!(Model::new(l.clone(), imp.clone()).is_err());
        l.bosons = 10;
        l.spacing = -1.0;
        assert!(Model::new(l.clone(), imp.clone()).is_err());
        l.spacing = 1.0;
        assert!(Model::new(l.clone(), ImpurityConfig::filled(4, 1.0, 0.1)).is_err());
        assert!(Model::new(l.clone(), ImpurityConfig::new(vec![0, 1], 1.0, 0.1)).is_err());
        assert!(Model::new(l, ImpurityConfig::new(vec![1], 1.0, -0.1)).is_err());
    }

    #[test]
    fn spectrum_at_two_pi_over_three() {
        let model = fig1();
        let mode = model.modes()[0];
        assert_relative_eq!(mode.k, 2.0 * PI / 3.0, epsilon = 1e-14);
        assert_relative_eq!(mode.epsilon, 3.0, epsilon = 1e-12);
        assert_relative_eq!(mode.omega, 13f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn free_gas_dispersion_collapses() {
        let lattice = LatticeConfig::new(7, 1.3, 0.0, 20);
        let model = Model::new(lattice, ImpurityConfig::filled(1, 1.0, 0.1)).unwrap();
        for mode in model.modes() {
            assert_eq!(mode.omega, mode.epsilon);
        }
    }

    #[test]
    fn n0_override_is_used() {
        let mut lattice = LatticeConfig::new(3, 1.0, 0.02, 100);
        lattice.n0_override = Some(30.0);
        let model = Model::new(lattice, ImpurityConfig::filled(1, 1.0, 0.1)).unwrap();
        assert_eq!(model.n0, 30.0);
    }

    #[test]
    fn spectrum_is_reflection_symmetric() {
        let lattice = LatticeConfig::new(8, 1.0, 0.05, 40);
        let model = Model::new(lattice, ImpurityConfig::filled(3, 1.0, 0.2)).unwrap();
        let modes = model.modes();
        let n = modes.len();
        for i in 0..n {
            let (a, b) = (modes[i], modes[n - 1 - i]);
            assert_relative_eq!(a.epsilon, b.epsilon, epsilon = 1e-12);
            assert_relative_eq!(a.omega, b.omega, epsilon = 1e-12);
            assert_relative_eq!(a.nu, b.nu, epsilon = 1e-12);
            assert!(a.nu > 0.0);
            assert!(a.omega >= a.epsilon);
        }
    }
}
