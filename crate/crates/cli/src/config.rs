//! TOML run configuration.

use std::path::Path;

use serde::Deserialize;

use coldbell::analysis::robustness::BisectionOptions;
use coldbell::analysis::{SolverKind, SweepSpec};
use coldbell::bell::Witness;
use coldbell::exact::ExactOptions;
use coldbell::model::{ImpurityConfig, LatticeConfig};
use coldbell::optimize::MultistartOptions;
use coldbell::quadrature::QuadratureOptions;
use coldbell::state::QubitState;
use coldbell::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub lattice: LatticeSection,
    pub impurities: ImpuritySection,
    pub solver: Option<SolverSection>,
    pub state: Option<StateSection>,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub optimizer: MultistartOptions,
    #[serde(default)]
    pub bisection: BisectionOptions,
    #[serde(default)]
    pub exact: ExactOptions,
    #[serde(default)]
    pub quadrature: QuadratureOptions,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub M: usize,
    #[serde(default = "one")]
    pub J: f64,
    pub U: Option<f64>,
    /// Alternative to `U`: the product `U N`.
    pub UN: Option<f64>,
    pub N: usize,
    #[serde(default = "one")]
    pub a: f64,
    pub n0_override: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpuritySection {
    pub d: Option<usize>,
    pub sites: Option<Vec<usize>>,
    #[serde(default = "one")]
    pub omega0: f64,
    #[serde(default)]
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverName {
    Exact,
    Bogoliubov,
    Continuum,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub kind: SolverName,
    /// Continuum cutoff; `1/M` when absent.
    pub q0: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase", tag = "kind")]
pub enum StateSection {
    Plus,
    Ghz,
    Basis { index: usize },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

impl Axis {
    pub fn values(&self) -> Result<Vec<f64>> {
        match *self {
            Axis::List(ref v) => Ok(v.clone()),
            Axis::Range { start, stop, points } => {
                if points == 0 {
                    return Err(Error::InvalidConfig("axis needs at least one point".into()));
                }
                Ok(linspace(start, stop, points))
            }
        }
    }
}

pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    let step = (stop - start) / (points - 1) as f64;
    (0..points).map(|k| start + step * k as f64).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub eta: Option<Axis>,
    pub t: Axis,
    #[serde(default)]
    pub witnesses: Vec<Witness>,
    #[serde(default = "yes")]
    pub pstar: bool,
    #[serde(default)]
    pub unitary_only: bool,
}

fn yes() -> bool {
    true
}

impl LatticeSection {
    pub fn to_lattice(&self) -> Result<LatticeConfig> {
        let interaction = match (self.U, self.UN) {
            (Some(u), None) => u,
            (None, Some(un)) if self.N > 0 => un / self.N as f64,
            (None, Some(_)) => return Err(Error::InvalidConfig("N must be >= 1".into())),
            _ => return Err(Error::InvalidConfig("lattice needs exactly one of U and UN".into())),
        };
        let mut lattice = LatticeConfig::new(self.M, self.J, interaction, self.N);
        lattice.spacing = self.a;
        lattice.n0_override = self.n0_override;
        Ok(lattice)
    }
}

impl ImpuritySection {
    pub fn to_impurities(&self) -> Result<ImpurityConfig> {
        let sites = match (&self.sites, self.d) {
            (Some(s), Some(d)) if s.len() != d => {
                return Err(Error::InvalidConfig(format!("d = {d} but {} sites listed", s.len())))
            }
            (Some(s), _) => s.clone(),
            (None, Some(d)) => (1..=d).collect(),
            (None, None) => return Err(Error::InvalidConfig("impurities need d or sites".into())),
        };
        Ok(ImpurityConfig::new(sites, self.omega0, self.eta))
    }
}

pub fn default_witnesses(d: usize) -> Vec<Witness> {
    match d {
        2 => vec![Witness::Horodecki, Witness::Chsh],
        3 => vec![Witness::Wwzb, Witness::Gtnl],
        _ => vec![Witness::Wwzb],
    }
}

pub fn solver_kind(name: SolverName, q0: Option<f64>, sites: usize) -> SolverKind {
    match name {
        SolverName::Exact => SolverKind::Exact,
        SolverName::Bogoliubov => SolverKind::Bogoliubov,
        SolverName::Continuum => SolverKind::Continuum {
            q0: q0.unwrap_or(1.0 / sites as f64),
        },
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn initial_state(&self, d: usize) -> Result<QubitState> {
        match self.state {
            None | Some(StateSection::Plus) => Ok(QubitState::plus(d)),
            Some(StateSection::Ghz) => Ok(QubitState::ghz(d)),
            Some(StateSection::Basis { index }) if index < 1 << d => Ok(QubitState::basis(d, index)),
            Some(StateSection::Basis { index }) => {
                Err(Error::InvalidConfig(format!("basis index {index} out of range for {d} qubits")))
            }
        }
    }

    /// Sweep spec with the coupling axis defaulting to the single configured `eta`
    /// and the time axis to `{0}` when no `[sweep]` table is present.
    pub fn to_spec(&self) -> Result<SweepSpec> {
        let lattice = self.lattice.to_lattice()?;
        let impurities = self.impurities.to_impurities()?;
        let d = impurities.qubits();
        let solver = self
            .solver
            .as_ref()
            .map(|s| solver_kind(s.kind, s.q0, lattice.sites))
            .unwrap_or(SolverKind::Bogoliubov);
        let (etas, times, witnesses, pstar, unitary_only) = match &self.sweep {
            Some(s) => (
                s.eta.as_ref().map(Axis::values).transpose()?.unwrap_or(vec![impurities.eta]),
                s.t.values()?,
                if s.witnesses.is_empty() { default_witnesses(d) } else { s.witnesses.clone() },
                s.pstar,
                s.unitary_only,
            ),
            None => (vec![impurities.eta], vec![0.0], default_witnesses(d), true, false),
        };
        let initial_state = Some(self.initial_state(d)?);
        let mut spec = SweepSpec::new(lattice, impurities, solver, etas, times, witnesses, self.seed.unwrap_or(0));
        spec.pstar = pstar;
        spec.unitary_only = unitary_only;
        spec.initial_state = initial_state;
        spec.optimizer = self.optimizer;
        spec.bisection = self.bisection;
        spec.exact = self.exact;
        spec.quadrature = self.quadrature;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [lattice]
        M = 3
        UN = 2.0
        N = 20

        [impurities]
        d = 3
        eta = 0.1
    "#;

    #[test]
    fn minimal_config_defaults() {
        let cfg: ConfigFile = toml::from_str(MINIMAL).unwrap();
        let spec = cfg.to_spec().unwrap();
        assert_eq!(spec.lattice.interaction, 0.1);
        assert_eq!(spec.impurities.sites, vec![1, 2, 3]);
        assert_eq!(spec.etas, vec![0.1]);
        assert_eq!(spec.witnesses, vec![Witness::Wwzb, Witness::Gtnl]);
        assert_eq!(spec.solver, SolverKind::Bogoliubov);
    }

    #[test]
    fn axes_accept_lists_and_ranges() {
        let text = format!("{MINIMAL}\n[sweep]\neta = [0.0, 0.2]\nt = {{ start = 0.0, stop = 1.0, points = 5 }}\n");
        let spec = toml::from_str::<ConfigFile>(&text).unwrap().to_spec().unwrap();
        assert_eq!(spec.etas, vec![0.0, 0.2]);
        assert_eq!(spec.times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn rejects_ambiguous_interaction_and_unknown_keys() {
        let both = MINIMAL.replace("UN = 2.0", "UN = 2.0\nU = 0.1");
        assert!(toml::from_str::<ConfigFile>(&both).unwrap().to_spec().is_err());
        let typo = MINIMAL.replace("eta = 0.1", "etta = 0.1");
        assert!(toml::from_str::<ConfigFile>(&typo).is_err());
        let mismatch = MINIMAL.replace("d = 3", "d = 2\nsites = [1, 2, 3]");
        assert!(toml::from_str::<ConfigFile>(&mismatch).unwrap().to_spec().is_err());
    }

    #[test]
    fn continuum_cutoff_defaults_to_inverse_ring_size() {
        let text = format!("{MINIMAL}\n[solver]\nkind = \"continuum\"\n");
        let spec = toml::from_str::<ConfigFile>(&text).unwrap().to_spec().unwrap();
        assert_eq!(spec.solver, SolverKind::Continuum { q0: 1.0 / 3.0 });
    }
}
