//! `coldbell`: command-line driver for impurity-qubit simulations.

mod config;
mod figures;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use coldbell::analysis::SweepSpec;
use coldbell::bell::Witness;
use coldbell::{Error, Result};

use config::{ConfigFile, SolverName};
use figures::{Plan, Scale};

#[derive(Parser, Debug)]
#[command(name = "coldbell", version, about = "Nonlocality of impurity qubits in a Bose-Hubbard ring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Desk-scale overrides: N, eta_points, t_points, t_max, restarts, M.
    #[arg(long, global = true, num_args = 1.., value_name = "K=V")]
    scale: Vec<String>,
    #[arg(long, global = true, value_enum)]
    solver: Option<SolverName>,
    /// Continuum cutoff used with `--solver continuum`.
    #[arg(long, global = true)]
    q0: Option<f64>,
    /// Drop the decoherence factors, keeping only the phases.
    #[arg(long, global = true)]
    unitary_only: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bogoliubov spectrum of the configured ring.
    Spectrum,
    /// Reduced qubit state at the given times.
    Evolve(Times),
    /// Optimised Bell witnesses and noise robustness at the given times.
    Bell {
        #[command(flatten)]
        times: Times,
        #[arg(long, value_delimiter = ',', value_parser = parse_witness)]
        witness: Vec<Witness>,
    },
    /// (eta, t) grid from the config's [sweep] table.
    Sweep,
    Figure1,
    Figure2,
    Figure3,
    Figure4,
    Figure5,
}

#[derive(Args, Debug)]
struct Times {
    /// Comma-separated times; defaults to the config's sweep axis.
    #[arg(long = "t", value_delimiter = ',', allow_negative_numbers = true)]
    t: Vec<f64>,
}

fn parse_witness(s: &str) -> std::result::Result<Witness, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load_spec(common: &Common) -> Result<SweepSpec> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("this command needs --config".into()))?;
    ConfigFile::load(path)?.to_spec()
}

fn apply_overrides(spec: &mut SweepSpec, common: &Common) {
    if let Some(seed) = common.seed {
        spec.seed = seed;
    }
    if let Some(name) = common.solver {
        spec.solver = config::solver_kind(name, common.q0, spec.lattice.sites);
    } else if let (Some(q0), coldbell::analysis::SolverKind::Continuum { .. }) = (common.q0, spec.solver) {
        spec.solver = coldbell::analysis::SolverKind::Continuum { q0 };
    }
    if common.unitary_only {
        spec.unitary_only = true;
    }
}

fn times_or_axis(times: &Times, spec: &SweepSpec) -> Vec<f64> {
    if times.t.is_empty() {
        spec.times.clone()
    } else {
        times.t.clone()
    }
}

enum Outcome {
    Done(Vec<String>),
    CellFailures(Vec<String>, serde_json::Value),
}

fn run_plans(plans: Vec<Plan>, common: &Common) -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for mut plan in plans {
        apply_overrides(&mut plan.spec, common);
        let (result, line) = run::run_plan(&plan, &common.out)?;
        lines.push(line);
        for cell in result.errors() {
            failures.push(json!({
                "output": plan.name,
                "eta": cell.eta,
                "t": cell.t,
                "message": cell.error,
            }));
        }
    }
    Ok(if failures.is_empty() {
        Outcome::Done(lines)
    } else {
        Outcome::CellFailures(lines, serde_json::Value::Array(failures))
    })
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    if let Ok(v) = std::env::var("COLDBELL_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("COLDBELL_THREADS must be a positive integer, got {v:?}")))?;
        coldbell::parallel::configure_threads(n);
    }
    let common = &cli.common;
    let scale = Scale::parse(&common.scale)?;
    let figure = |n| -> Result<Outcome> {
        if common.config.is_some() {
            return Err(Error::InvalidConfig("figure commands take their parameters from --scale, not --config".into()));
        }
        run_plans(figures::figure(n, &scale)?, common)
    };
    let configured = || -> Result<SweepSpec> {
        let mut spec = load_spec(common)?;
        scale.apply(&mut spec)?;
        apply_overrides(&mut spec, common);
        Ok(spec)
    };
    match &cli.command {
        Command::Spectrum => Ok(Outcome::Done(vec![run::spectrum(&configured()?, &common.out)?])),
        Command::Evolve(times) => {
            let spec = configured()?;
            let t = times_or_axis(times, &spec);
            Ok(Outcome::Done(vec![run::evolve(&spec, &t, &common.out)?]))
        }
        Command::Bell { times, witness } => {
            let mut spec = configured()?;
            if !witness.is_empty() {
                spec.witnesses = witness.clone();
            }
            for w in &spec.witnesses {
                w.check_qubits(spec.impurities.qubits())?;
            }
            let t = times_or_axis(times, &spec);
            Ok(Outcome::Done(vec![run::bell(&spec, &t, &common.out)?]))
        }
        Command::Sweep => {
            let spec = configured()?;
            run_plans(vec![Plan { name: "sweep".into(), spec }], common)
        }
        Command::Figure1 => figure(1),
        Command::Figure2 => figure(2),
        Command::Figure3 => figure(3),
        Command::Figure4 => figure(4),
        Command::Figure5 => figure(5),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidConfig(_) | Error::DuplicateSite(_) | Error::OutOfRange(_) => "config",
        Error::BasisTooLarge { .. } => "basis_too_large",
        Error::NoConvergence { .. } | Error::StepUnderflow { .. } | Error::NormDrift { .. } => "propagation",
        Error::Quadrature { .. } => "quadrature",
        Error::Dimension(_) => "dimension",
        Error::InvalidState(_) => "state",
        Error::Csv(_) => "output",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(Outcome::Done(lines)) => {
            lines.iter().for_each(|l| println!("{l}"));
            ExitCode::SUCCESS
        }
        Ok(Outcome::CellFailures(lines, cells)) => {
            lines.iter().for_each(|l| println!("{l}"));
            eprintln!("{}", json!({ "error": { "kind": "cell_failures", "cells": cells } }));
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } }));
            ExitCode::FAILURE
        }
    }
}
