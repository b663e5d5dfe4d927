//! Figure presets and `--scale` overrides.

use coldbell::analysis::{SolverKind, SweepSpec};
use coldbell::bell::Witness;
use coldbell::model::{ImpurityConfig, LatticeConfig};
use coldbell::{Error, Result};

use crate::config::linspace;

/// Desk-scale overrides from `--scale K=V`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scale {
    /// Boson number; `U N` is held fixed.
    pub bosons: Option<usize>,
    pub eta_points: Option<usize>,
    pub t_points: Option<usize>,
    pub t_max: Option<f64>,
    pub restarts: Option<usize>,
    /// Largest ring in the lattice-size scan.
    pub max_sites: Option<usize>,
}

impl Scale {
    pub fn parse(pairs: &[String]) -> Result<Self> {
        let mut s = Scale::default();
        for pair in pairs {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("--scale expects K=V, got {pair:?}")))?;
            let bad = || Error::InvalidConfig(format!("--scale {k}: cannot parse {v:?}"));
            match k {
                "N" => s.bosons = Some(v.parse().map_err(|_| bad())?),
                "eta_points" => s.eta_points = Some(v.parse().map_err(|_| bad())?),
                "t_points" => s.t_points = Some(v.parse().map_err(|_| bad())?),
                "t_max" => s.t_max = Some(v.parse().map_err(|_| bad())?),
                "restarts" => s.restarts = Some(v.parse().map_err(|_| bad())?),
                "M" => s.max_sites = Some(v.parse().map_err(|_| bad())?),
                _ => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown --scale key {k:?} (expected N, eta_points, t_points, t_max, restarts, M)"
                    )))
                }
            }
        }
        for (name, v) in [("N", s.bosons), ("eta_points", s.eta_points), ("t_points", s.t_points), ("restarts", s.restarts)] {
            if v == Some(0) {
                return Err(Error::InvalidConfig(format!("--scale {name} must be >= 1")));
            }
        }
        Ok(s)
    }

    /// Apply every override except `M` to `spec`.
    pub fn apply(&self, spec: &mut SweepSpec) -> Result<()> {
        if let Some(n) = self.bosons {
            if matches!(spec.solver, SolverKind::Continuum { .. }) {
                return Err(Error::InvalidConfig("--scale N has no meaning for the continuum solver".into()));
            }
            let un = spec.lattice.interaction * spec.lattice.bosons as f64;
            spec.lattice.bosons = n;
            spec.lattice.interaction = un / n as f64;
        }
        if let Some(p) = self.eta_points {
            spec.etas = resample(&spec.etas, p);
        }
        if let Some(t_max) = self.t_max {
            let t0 = spec.times[0];
            spec.times = linspace(t0, t_max, spec.times.len());
        }
        if let Some(p) = self.t_points {
            spec.times = resample(&spec.times, p);
        }
        if let Some(r) = self.restarts {
            spec.optimizer.restarts = r;
        }
        Ok(())
    }
}

fn resample(axis: &[f64], points: usize) -> Vec<f64> {
    let lo = axis.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = axis.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    linspace(lo, hi, points)
}

/// One output file of a figure command.
#[derive(Debug, Clone)]
pub struct Plan {
    pub name: String,
    pub spec: SweepSpec,
}

fn plan(name: impl Into<String>, spec: SweepSpec) -> Plan {
    Plan { name: name.into(), spec }
}

fn ring(sites: usize, bosons: usize, un: f64) -> LatticeConfig {
    LatticeConfig::with_un(sites, 1.0, un, bosons)
}

/// Three qubits on a three-site ring, `N = 100`, `U N = 2J`, full `(η, t)` grid.
pub fn figure1() -> Vec<Plan> {
    let base = |witness| {
        SweepSpec::new(
            ring(3, 100, 2.0),
            ImpurityConfig::filled(3, 1.0, 0.0),
            SolverKind::Exact,
            linspace(0.0, 0.5, 26),
            linspace(0.0, 12.0, 121),
            vec![witness],
            1,
        )
    };
    vec![plan("figure1a", base(Witness::Wwzb)), plan("figure1b", base(Witness::Gtnl))]
}

/// Five qubits on a five-site ring, `N = 1000`, `U N = 2J`, `η = 0.05J`.
pub fn figure2() -> Vec<Plan> {
    let spec = SweepSpec::new(
        ring(5, 1000, 2.0),
        ImpurityConfig::filled(5, 1.0, 0.05),
        SolverKind::Bogoliubov,
        vec![0.05],
        linspace(0.0, 20.0, 201),
        vec![Witness::Wwzb],
        2,
    );
    vec![plan("figure2", spec)]
}

/// Two qubits on sites 1 and `M` for `M = 2..=10`: `p*` from the unitary part
/// alone (`left`) and the full dynamics with BLP (`right`).
pub fn figure3(max_sites: usize) -> Vec<Plan> {
    (2..=max_sites)
        .flat_map(|m| {
            let full = SweepSpec::new(
                ring(m, 1000, 2.0),
                ImpurityConfig::new(vec![1, m], 1.0, 0.04),
                SolverKind::Bogoliubov,
                vec![0.04],
                linspace(0.0, 20.0, 201),
                vec![Witness::Horodecki],
                3,
            );
            let mut left = full.clone();
            left.unitary_only = true;
            [plan(format!("figure3_left_M{m}"), left), plan(format!("figure3_right_M{m}"), full)]
        })
        .collect()
}

fn large_ring(times: Vec<f64>, seed: u64) -> SweepSpec {
    let mut lattice = LatticeConfig::new(1_000_000, 1.0, 0.04, 1_000_000);
    lattice.n0_override = Some(1.0);
    SweepSpec::new(
        lattice,
        ImpurityConfig::new(vec![1, 2], 1.0, 0.03),
        SolverKind::Continuum { q0: 1e-6 },
        vec![0.03],
        times,
        vec![Witness::Horodecki],
        seed,
    )
}

/// Neighbouring qubits in the continuum limit: `n0 = 1`, `U = 0.04J`, `η = 0.03J`, `q0 = 1e-6`.
pub fn figure4() -> Vec<Plan> {
    vec![plan("figure4", large_ring(linspace(0.0, 1000.0, 201), 4))]
}

/// Same setup as [`figure4`] over a longer window.
pub fn figure5() -> Vec<Plan> {
    vec![plan("figure5", large_ring(linspace(0.0, 3000.0, 301), 5))]
}

pub fn figure(n: u8, scale: &Scale) -> Result<Vec<Plan>> {
    if scale.max_sites.is_some() && n != 3 {
        return Err(Error::InvalidConfig("--scale M only applies to figure3".into()));
    }
    let mut plans = match n {
        1 => figure1(),
        2 => figure2(),
        3 => {
            let m = scale.max_sites.unwrap_or(10);
            if m < 2 {
                return Err(Error::InvalidConfig("--scale M must be >= 2".into()));
            }
            figure3(m)
        }
        4 => figure4(),
        5 => figure5(),
        _ => return Err(Error::InvalidConfig(format!("no figure {n}"))),
    };
    for p in &mut plans {
        scale.apply(&mut p.spec)?;
    }
    Ok(plans)
}
