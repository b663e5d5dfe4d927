//! `(η, t)` grid sweeps and their CSV / JSON output.

use std::io::{BufRead, Write};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::blp::{blp_from_series, BlpResult};
use crate::analysis::robustness::{pstar_bisection_from, scaling_from_optimum, BisectionOptions};
use crate::bell::{horodecki, optimize_bell, Witness};
use crate::bogoliubov::BogoliubovSolver;
use crate::continuum::{ContinuumConfig, ContinuumSolver};
use crate::dephasing::{Dephasing, DephasingProfile};
use crate::error::{Error, Result};
use crate::exact::{ExactOptions, ExactSolver};
use crate::model::{ImpurityConfig, LatticeConfig, Model};
use crate::optimize::MultistartOptions;
use crate::parallel;
use crate::quadrature::QuadratureOptions;
use crate::state::QubitState;

pub const CSV_SCHEMA: u32 = 1;

pub const CSV_COLUMNS: [&str; 11] = [
    "solver",
    "eta",
    "t",
    "wwzb",
    "gtnl",
    "horodecki_B",
    "pstar",
    "blp",
    "gamma0",
    "gamma_plus",
    "gamma_minus",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Bogoliubov,
    /// Momentum integrals with low-momentum cutoff `q0`.
    Continuum { q0: f64 },
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Bogoliubov => "bogoliubov",
            SolverKind::Continuum { .. } => "continuum",
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub lattice: LatticeConfig,
    /// `eta` here is replaced by each value of `etas`.
    pub impurities: ImpurityConfig,
    pub solver: SolverKind,
    pub etas: Vec<f64>,
    pub times: Vec<f64>,
    pub witnesses: Vec<Witness>,
    pub seed: u64,
    /// Drop all `γ_ij`, keeping the phases.
    #[serde(default)]
    pub unitary_only: bool,
    /// Defaults to `|+…+⟩`.
    #[serde(default)]
    pub initial_state: Option<QubitState>,
    /// Compute `p*` for the first witness.
    #[serde(default = "yes")]
    pub pstar: bool,
    /// The seed field is replaced by a per-cell seed.
    #[serde(default)]
    pub optimizer: MultistartOptions,
    #[serde(default)]
    pub bisection: BisectionOptions,
    #[serde(default)]
    pub exact: ExactOptions,
    #[serde(default)]
    pub quadrature: QuadratureOptions,
}

impl SweepSpec {
    pub fn new(
        lattice: LatticeConfig,
        impurities: ImpurityConfig,
        solver: SolverKind,
        etas: Vec<f64>,
        times: Vec<f64>,
        witnesses: Vec<Witness>,
        seed: u64,
    ) -> Self {
        Self {
            lattice,
            impurities,
            solver,
            etas,
            times,
            witnesses,
            seed,
            unitary_only: false,
            initial_state: None,
            pstar: true,
            optimizer: MultistartOptions::default(),
            bisection: BisectionOptions::default(),
            exact: ExactOptions::default(),
            quadrature: QuadratureOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        Model::new(self.lattice.clone(), self.impurities.clone())?;
        let d = self.impurities.qubits();
        if self.etas.is_empty() || self.times.is_empty() {
            return Err(Error::InvalidConfig("sweep axes must be nonempty".into()));
        }
        if self.etas.iter().any(|&e| !(e >= 0.0 && e.is_finite())) {
            return Err(Error::InvalidConfig("eta values must be finite and >= 0".into()));
        }
        if self.times.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
            return Err(Error::InvalidConfig("times must be finite and >= 0".into()));
        }
        if self.times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidConfig("times must be nondecreasing".into()));
        }
        for w in &self.witnesses {
            w.check_qubits(d)?;
        }
        if let Some(rho) = &self.initial_state {
            if rho.qubits() != d {
                return Err(Error::Dimension(format!(
                    "initial state has {} qubits, {d} impurities configured",
                    rho.qubits()
                )));
            }
            rho.validate()?;
        }
        Ok(())
    }

    /// Hex prefix of the SHA-256 of the sweep spec serialised as JSON.
    pub fn config_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("spec serialises");
        Sha256::digest(&bytes)[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    fn initial(&self) -> QubitState {
        self.initial_state
            .clone()
            .unwrap_or_else(|| QubitState::plus(self.impurities.qubits()))
    }
}

/// Seed of grid cell `cell`, drawn from stream `cell` of the master seed.
pub fn cell_seed(master: u64, cell: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(cell as u64);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub eta: f64,
    pub t: f64,
    pub seed: u64,
    pub wwzb: Option<f64>,
    pub gtnl: Option<f64>,
    pub horodecki_b: Option<f64>,
    pub chsh: Option<f64>,
    pub pstar: Option<f64>,
    pub blp: Option<f64>,
    pub gamma0: Option<f64>,
    pub gamma_plus: Option<f64>,
    pub gamma_minus: Option<f64>,
    /// `false` if an optimisation hit its evaluation budget.
    pub converged: bool,
    pub error: Option<String>,
}

impl Cell {
    fn empty(eta: f64, t: f64, seed: u64) -> Self {
        Self {
            eta,
            t,
            seed,
            wwzb: None,
            gtnl: None,
            horodecki_b: None,
            chsh: None,
            pstar: None,
            blp: None,
            gamma0: None,
            gamma_plus: None,
            gamma_minus: None,
            converged: true,
            error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub solver: &'static str,
    pub seed: u64,
    pub config_hash: String,
    pub spec: SweepSpec,
    /// Row-major: all times for `etas[0]`, then `etas[1]`, ...
    pub cells: Vec<Cell>,
    /// Per-pair BLP curves for each `η`, analytic solvers only.
    pub blp: Vec<Option<BlpResult>>,
}

impl SweepResult {
    pub fn all_succeeded(&self) -> bool {
        self.cells.iter().all(|c| c.error.is_none())
    }

    pub fn errors(&self) -> Vec<&Cell> {
        self.cells.iter().filter(|c| c.error.is_some()).collect()
    }

    pub fn cell(&self, eta_index: usize, t_index: usize) -> &Cell {
        &self.cells[eta_index * self.spec.times.len() + t_index]
    }
}

struct Row {
    states: Vec<QubitState>,
    profiles: Option<Vec<DephasingProfile>>,
}

fn dephasing_row(solver: &dyn Dephasing, spec: &SweepSpec, rho0: &QubitState) -> Result<Row> {
    let profiles = parallel::map(&spec.times, |&t| solver.profile(t))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let states = profiles
        .iter()
        .map(|p| p.apply(rho0, spec.unitary_only))
        .collect::<Result<Vec<_>>>()?;
    Ok(Row {
        states,
        profiles: Some(profiles),
    })
}

fn compute_rows(spec: &SweepSpec, rho0: &QubitState) -> Vec<Result<Row>> {
    let model_for = |eta: f64| {
        let mut imp = spec.impurities.clone();
        imp.eta = eta;
        Model::new(spec.lattice.clone(), imp)
    };
    match spec.solver {
        SolverKind::Exact => {
            let base = model_for(spec.etas[0]).and_then(|m| ExactSolver::new(&m, spec.exact));
            let base = match base {
                Ok(b) => b,
                Err(e) => return spec.etas.iter().map(|_| Err(e.clone())).collect(),
            };
            spec.etas
                .iter()
                .map(|&eta| {
                    let solver = base.with_eta(eta)?;
                    Ok(Row {
                        states: solver.reduced_states_with(rho0, &spec.times, spec.unitary_only)?,
                        profiles: None,
                    })
                })
                .collect()
        }
        SolverKind::Bogoliubov => parallel::map(&spec.etas, |&eta| {
            let solver = BogoliubovSolver::new(&model_for(eta)?);
            dephasing_row(&solver, spec, rho0)
        }),
        SolverKind::Continuum { q0 } => parallel::map(&spec.etas, |&eta| {
            let model = model_for(eta)?;
            let mut cfg = ContinuumConfig::from_model(&model)?;
            cfg.q0 = q0;
            cfg.quadrature = spec.quadrature;
            let solver = ContinuumSolver::new(cfg, model.impurities.sites.clone())?;
            dephasing_row(&solver, spec, rho0)
        }),
    }
}

fn blp_row(spec: &SweepSpec, profiles: &[DephasingProfile]) -> Result<BlpResult> {
    let n = 1usize << spec.impurities.qubits();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let series: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&(i, j)| profiles.iter().map(|p| (-p.gamma(i, j)).exp()).collect())
        .collect();
    blp_from_series(&spec.times, pairs, &series)
}

fn evaluate_cell(spec: &SweepSpec, rho: &QubitState, cell: &mut Cell) -> Result<()> {
    let opts = MultistartOptions {
        seed: cell.seed,
        ..spec.optimizer
    };
    for (k, &w) in spec.witnesses.iter().enumerate() {
        let want_pstar = spec.pstar && k == 0;
        if w == Witness::Horodecki {
            let h = horodecki(rho)?;
            cell.horodecki_b = Some(h.b);
            if want_pstar {
                cell.pstar = (h.m > 1.0).then(|| 1.0 / h.m.sqrt());
            }
            continue;
        }
        let best = optimize_bell(rho, w, &opts)?;
        cell.converged &= best.converged;
        match w {
            Witness::Wwzb => cell.wwzb = Some(best.value),
            Witness::Gtnl => cell.gtnl = Some(best.value),
            Witness::Chsh => cell.chsh = Some(best.value),
            Witness::Horodecki => unreachable!(),
        }
        if want_pstar {
            let p = if w == Witness::Gtnl {
                pstar_bisection_from(rho, &best, &opts, &spec.bisection)?
            } else {
                scaling_from_optimum(&best)
            };
            cell.converged &= p.converged;
            cell.pstar = p.value;
        }
    }
    Ok(())
}

/// Run the sweep. Configuration errors abort; failures inside individual
/// cells are recorded on those cells.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let rho0 = spec.initial();
    let rows = compute_rows(spec, &rho0);
    let analytic = spec.solver != SolverKind::Exact && !spec.unitary_only;
    let blp: Vec<Option<BlpResult>> = rows
        .iter()
        .map(|row| match row {
            Ok(Row {
                profiles: Some(p), ..
            }) if analytic => blp_row(spec, p).ok(),
            _ => None,
        })
        .collect();
    let nt = spec.times.len();
    let two_qubits = spec.impurities.qubits() == 2;
    let cells = parallel::map_range(spec.etas.len() * nt, |c| {
        let (ei, ti) = (c / nt, c % nt);
        let mut cell = Cell::empty(spec.etas[ei], spec.times[ti], cell_seed(spec.seed, c));
        let row = match &rows[ei] {
            Ok(row) => row,
            Err(e) => {
                cell.error = Some(e.to_string());
                return cell;
            }
        };
        if let Some(b) = &blp[ei] {
            cell.blp = Some(b.total[ti]);
        }
        if let (true, true, Some(profiles)) = (analytic, two_qubits, &row.profiles) {
            let p = &profiles[ti];
            cell.gamma0 = Some(p.gamma(0b11, 0b10));
            cell.gamma_plus = Some(p.gamma(0b11, 0b00));
            cell.gamma_minus = Some(p.gamma(0b10, 0b01));
        }
        if let Err(e) = evaluate_cell(spec, &row.states[ti], &mut cell) {
            cell.error = Some(e.to_string());
        }
        cell
    });
    Ok(SweepResult {
        solver: spec.solver.name(),
        seed: spec.seed,
        config_hash: spec.config_hash(),
        spec: spec.clone(),
        cells,
        blp,
    })
}

fn fmt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.11e}")).unwrap_or_default()
}

/// One row per cell after a `#` comment line carrying schema, hash, seed and solver.
pub fn write_csv<W: Write>(result: &SweepResult, mut out: W) -> Result<()> {
    writeln!(
        out,
        "# coldbell sweep schema={CSV_SCHEMA} config_hash={} seed={} solver={}",
        result.config_hash, result.seed, result.solver
    )
    .map_err(|e| Error::Csv(e.to_string()))?;
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Csv(e.to_string());
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for c in &result.cells {
        w.write_record([
            result.solver.to_string(),
            format!("{:.11e}", c.eta),
            format!("{:.11e}", c.t),
            fmt(c.wwzb),
            fmt(c.gtnl),
            fmt(c.horodecki_b),
            fmt(c.pstar),
            fmt(c.blp),
            fmt(c.gamma0),
            fmt(c.gamma_plus),
            fmt(c.gamma_minus),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}

pub fn write_json<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, result).map_err(|e| Error::Csv(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub solver: String,
    pub eta: f64,
    pub t: f64,
    pub wwzb: Option<f64>,
    pub gtnl: Option<f64>,
    #[serde(rename = "horodecki_B")]
    pub horodecki_b: Option<f64>,
    pub pstar: Option<f64>,
    pub blp: Option<f64>,
    pub gamma0: Option<f64>,
    pub gamma_plus: Option<f64>,
    pub gamma_minus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub schema: u32,
    pub config_hash: String,
    pub seed: u64,
    pub solver: String,
    pub rows: Vec<CsvRow>,
}

/// Parse a file produced by [`write_csv`].
pub fn read_csv<R: BufRead>(mut input: R) -> Result<CsvTable> {
    let mut first = String::new();
    input.read_line(&mut first).map_err(|e| Error::Csv(e.to_string()))?;
    let meta = first
        .trim()
        .strip_prefix("# coldbell sweep ")
        .ok_or_else(|| Error::Csv(format!("missing sweep header, got {first:?}")))?;
    let field = |key: &str| -> Result<String> {
        meta.split_whitespace()
            .find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
            .map(str::to_string)
            .ok_or_else(|| Error::Csv(format!("header lacks {key}")))
    };
    let parse_err = |e: std::num::ParseIntError| Error::Csv(e.to_string());
    let schema: u32 = field("schema")?.parse().map_err(parse_err)?;
    if schema != CSV_SCHEMA {
        return Err(Error::Csv(format!("unsupported schema {schema}")));
    }
    let rows = csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<Vec<CsvRow>, _>>()
        .map_err(|e| Error::Csv(e.to_string()))?;
    Ok(CsvTable {
        schema,
        config_hash: field("config_hash")?,
        seed: field("seed")?.parse().map_err(parse_err)?,
        solver: field("solver")?,
        rows,
    })
}
