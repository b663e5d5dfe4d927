//! Bell nonlocality witnesses and their optimisation over measurement settings.

pub mod correlation;
pub mod settings;
pub mod witnesses;

use serde::{Deserialize, Serialize};

pub use correlation::{correlator, walsh_hadamard, CorrelationTensor, PauliTensor};
pub use settings::{bloch, BlochVector, MeasurementSettings};
pub use witnesses::{
    chsh_value, gtnl_value, horodecki, wwzb_value, Horodecki, WWZB_THRESHOLD,
};

use crate::error::{Error, Result};
use crate::optimize::{multistart_from, MultistartOptions};
use correlation::check_parties;
use crate::state::QubitState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    Wwzb,
    Gtnl,
    Chsh,
    Horodecki,
}

impl Witness {
    pub fn name(self) -> &'static str {
        match self {
            Witness::Wwzb => "wwzb",
            Witness::Gtnl => "gtnl",
            Witness::Chsh => "chsh",
            Witness::Horodecki => "horodecki",
        }
    }

    /// Value above which the witness certifies nonlocality.
    pub fn threshold(self) -> f64 {
        match self {
            Witness::Wwzb => WWZB_THRESHOLD,
            Witness::Gtnl => 0.0,
            Witness::Chsh => 2.0,
            Witness::Horodecki => 0.0,
        }
    }

    pub fn check_qubits(self, d: usize) -> Result<()> {
        let ok = match self {
            Witness::Wwzb => d >= 1,
            Witness::Gtnl => d == 3,
            Witness::Chsh | Witness::Horodecki => d == 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Dimension(format!("{} is not defined for {d} qubits", self.name())))
        }
    }
}

impl std::str::FromStr for Witness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wwzb" => Ok(Witness::Wwzb),
            "gtnl" => Ok(Witness::Gtnl),
            "chsh" => Ok(Witness::Chsh),
            "horodecki" => Ok(Witness::Horodecki),
            other => Err(Error::InvalidConfig(format!("unknown witness {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellOptimum {
    pub witness: Witness,
    pub value: f64,
    /// `None` for the closed-form Horodecki witness.
    pub settings: Option<MeasurementSettings>,
    pub converged: bool,
    pub evaluations: usize,
}

impl BellOptimum {
    pub fn nonlocal(&self) -> bool {
        self.value > self.witness.threshold()
    }
}

/// Witness value as a function of the `4d` measurement angles.
pub fn objective(witness: Witness, r: &PauliTensor, angles: &[f64]) -> Result<f64> {
    let s = MeasurementSettings::from_angles(angles)?;
    match witness {
        Witness::Wwzb => witnesses::wwzb_from_pauli(r, &s),
        Witness::Gtnl => witnesses::gtnl_from_pauli(r, &s),
        Witness::Chsh => witnesses::chsh_from_pauli(r, &s),
        Witness::Horodecki => Err(Error::InvalidConfig("horodecki has no settings to optimise".into())),
    }
}

/// Maximise `witness` over all measurement angles with seeded multistart
/// simplex descent. The result is a lower bound on the true maximum.
pub fn optimize_bell(rho: &QubitState, witness: Witness, opts: &MultistartOptions) -> Result<BellOptimum> {
    optimize_bell_from(rho, witness, opts, &[])
}

/// [`optimize_bell`] with additional start settings, e.g. a previous optimum.
pub fn optimize_bell_from(
    rho: &QubitState,
    witness: Witness,
    opts: &MultistartOptions,
    starts: &[MeasurementSettings],
) -> Result<BellOptimum> {
    let d = rho.qubits();
    witness.check_qubits(d)?;
    if witness == Witness::Horodecki {
        return Ok(BellOptimum {
            witness,
            value: horodecki(rho)?.b,
            settings: None,
            converged: true,
            evaluations: 0,
        });
    }
    let r = PauliTensor::from_state(rho);
    let ranges: Vec<(f64, f64)> = (0..2 * d)
        .flat_map(|_| [(0.0, std::f64::consts::PI), (0.0, 2.0 * std::f64::consts::PI)])
        .collect();
    for s in starts {
        check_parties(d, s)?;
    }
    let starts: Vec<Vec<f64>> = starts.iter().map(|s| s.to_angles()).collect();
    let best = multistart_from(
        |x| -objective(witness, &r, x).expect("angle count matches"),
        &ranges,
        opts,
        &starts,
    );
    Ok(BellOptimum {
        witness,
        value: -best.value,
        settings: Some(MeasurementSettings::from_angles(&best.x)?),
        converged: best.converged,
        evaluations: best.evaluations,
    })
}
