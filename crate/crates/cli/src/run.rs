//! Subcommand implementations.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use coldbell::analysis::sweep::Cell;
use coldbell::analysis::robustness::{pstar_bisection_from, scaling_from_optimum, PStar};
use coldbell::analysis::{sweep, write_csv, write_json, SolverKind, SweepResult, SweepSpec};
use coldbell::bell::{optimize_bell, BellOptimum, Witness};
use coldbell::bogoliubov::BogoliubovSolver;
use coldbell::continuum::{ContinuumConfig, ContinuumSolver};
use coldbell::dephasing::Dephasing;
use coldbell::exact::ExactSolver;
use coldbell::model::Model;
use coldbell::optimize::MultistartOptions;
use coldbell::state::{DensityMatrixRepr, QubitState};
use coldbell::{Error, Result};

use crate::figures::Plan;

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidConfig(format!("{}: {e}", path.display()))
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| io_err(&path, e))?;
    Ok((path, BufWriter::new(file)))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| io_err(path, e))
}

fn write_json_file<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let (path, mut w) = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Csv(e.to_string()))?;
    finish(&path, w)?;
    Ok(path)
}

fn model_of(spec: &SweepSpec, eta: f64) -> Result<Model> {
    let mut imp = spec.impurities.clone();
    imp.eta = eta;
    Model::new(spec.lattice.clone(), imp)
}

/// Reduced states at `times` for coupling `eta` with the sweep's solver.
pub fn evolve_states(spec: &SweepSpec, eta: f64, times: &[f64]) -> Result<Vec<QubitState>> {
    let model = model_of(spec, eta)?;
    let rho0 = spec.initial_state.clone().unwrap_or_else(|| QubitState::plus(model.qubits()));
    let apply = |solver: &dyn Dephasing| -> Result<Vec<QubitState>> {
        times
            .iter()
            .map(|&t| solver.profile(t)?.apply(&rho0, spec.unitary_only))
            .collect()
    };
    match spec.solver {
        SolverKind::Exact => ExactSolver::new(&model, spec.exact)?.reduced_states_with(&rho0, times, spec.unitary_only),
        SolverKind::Bogoliubov => apply(&BogoliubovSolver::new(&model)),
        SolverKind::Continuum { q0 } => {
            let mut cfg = ContinuumConfig::from_model(&model)?;
            cfg.q0 = q0;
            cfg.quadrature = spec.quadrature;
            apply(&ContinuumSolver::new(cfg, model.impurities.sites.clone())?)
        }
    }
}

pub fn spectrum(spec: &SweepSpec, out: &Path) -> Result<String> {
    let model = model_of(spec, spec.etas[0])?;
    let (path, mut w) = create(out, "spectrum.csv")?;
    let e = |err: std::io::Error| io_err(&path, err);
    writeln!(w, "m,k,epsilon,omega,xi,nu").map_err(e)?;
    for mode in model.modes() {
        writeln!(
            w,
            "{},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
            mode.m, mode.k, mode.epsilon, mode.omega, mode.xi, mode.nu
        )
        .map_err(e)?;
    }
    finish(&path, w)?;
    let omegas = model.modes().iter().map(|m| m.omega);
    let lo = omegas.clone().fold(f64::INFINITY, f64::min);
    let hi = omegas.fold(f64::NEG_INFINITY, f64::max);
    Ok(format!(
        "spectrum: {} modes, n0 {:.6}, omega0_bar {:.6}, omega in [{lo:.6}, {hi:.6}] -> {}",
        model.modes().len(),
        model.n0,
        model.omega0_bar,
        path.display()
    ))
}

#[derive(Serialize)]
struct Snapshot {
    t: f64,
    purity: f64,
    state: DensityMatrixRepr,
}

pub fn evolve(spec: &SweepSpec, times: &[f64], out: &Path) -> Result<String> {
    let eta = spec.impurities.eta;
    let states = evolve_states(spec, eta, times)?;
    let snapshots: Vec<Snapshot> = times
        .iter()
        .zip(&states)
        .map(|(&t, rho)| Snapshot {
            t,
            purity: rho.purity(),
            state: DensityMatrixRepr::from(rho),
        })
        .collect();
    let path = write_json_file(out, "evolve.json", &snapshots)?;
    let last = snapshots.last().expect("nonempty time axis");
    Ok(format!(
        "evolve: {} times with {}, final purity {:.6} at t = {} -> {}",
        times.len(),
        spec.solver.name(),
        last.purity,
        last.t,
        path.display()
    ))
}

#[derive(Serialize)]
struct BellRecord {
    t: f64,
    optimum: BellOptimum,
    /// Settings as `(θ, φ)` pairs, two per party.
    angles: Option<Vec<f64>>,
    pstar: PStar,
}

pub fn bell(spec: &SweepSpec, times: &[f64], out: &Path) -> Result<String> {
    let states = evolve_states(spec, spec.impurities.eta, times)?;
    let mut records = Vec::new();
    let mut best: Option<(Witness, f64)> = None;
    let mut min_pstar: Option<f64> = None;
    for (k, (&t, rho)) in times.iter().zip(&states).enumerate() {
        for &w in &spec.witnesses {
            let opts = MultistartOptions {
                seed: spec.seed.wrapping_add(k as u64),
                ..spec.optimizer
            };
            let optimum = optimize_bell(rho, w, &opts)?;
            let pstar = match w {
                Witness::Gtnl => pstar_bisection_from(rho, &optimum, &opts, &spec.bisection)?,
                Witness::Horodecki => coldbell::analysis::pstar(rho, w, &opts)?,
                _ => scaling_from_optimum(&optimum),
            };
            let excess = optimum.value - w.threshold();
            if best.is_none_or(|(_, e)| excess > e) {
                best = Some((w, excess));
            }
            if let Some(p) = pstar.value {
                min_pstar = Some(min_pstar.map_or(p, |m: f64| m.min(p)));
            }
            records.push(BellRecord {
                t,
                angles: optimum.settings.as_ref().map(|s| s.to_angles()),
                optimum,
                pstar,
            });
        }
    }
    let path = write_json_file(out, "bell.json", &records)?;
    let (w, excess) = best.expect("at least one witness and time");
    Ok(format!(
        "bell: {} evaluations, max violation {} {:+.6} over threshold, min p* {} -> {}",
        records.len(),
        w.name(),
        excess,
        min_pstar.map_or("none".into(), |p| format!("{p:.6}")),
        path.display()
    ))
}

/// Run a sweep and write `<name>.csv` and `<name>.json`.
pub fn run_plan(plan: &Plan, out: &Path) -> Result<(SweepResult, String)> {
    let result = sweep(&plan.spec)?;
    let (csv_path, mut w) = create(out, &format!("{}.csv", plan.name))?;
    write_csv(&result, &mut w)?;
    finish(&csv_path, w)?;
    let (json_path, mut w) = create(out, &format!("{}.json", plan.name))?;
    write_json(&result, &mut w)?;
    finish(&json_path, w)?;
    let line = summary(&plan.name, &result, &csv_path);
    Ok((result, line))
}

fn fold_max(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    values.flatten().fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
}

type CellColumn = fn(&Cell) -> Option<f64>;

fn summary(name: &str, r: &SweepResult, path: &Path) -> String {
    let mut parts = vec![format!("{name}: {} cells", r.cells.len())];
    let columns: [(&str, CellColumn); 4] = [
        ("wwzb", |c| c.wwzb),
        ("gtnl", |c| c.gtnl),
        ("chsh", |c| c.chsh),
        ("B", |c| c.horodecki_b),
    ];
    for (label, get) in columns {
        if let Some(v) = fold_max(r.cells.iter().map(get)) {
            parts.push(format!("max {label} {v:.6}"));
        }
    }
    let min_pstar = fold_max(r.cells.iter().map(|c| c.pstar.map(|p| -p))).map(|p| -p);
    parts.push(format!("min p* {}", min_pstar.map_or("none".into(), |p| format!("{p:.6}"))));
    if let Some(n) = fold_max(r.blp.iter().map(|b| b.as_ref().and_then(|b| b.total.last().copied()))) {
        parts.push(format!("final N {n:.6}"));
    }
    parts.push(format!("{} failed", r.errors().len()));
    format!("{} -> {}", parts.join(", "), path.display())
}
