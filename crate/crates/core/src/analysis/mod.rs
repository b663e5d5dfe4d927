//! Noise robustness, non-Markovianity, rate signs and grid sweeps.

pub mod blp;
pub mod rates;
pub mod robustness;
pub mod sweep;

pub use blp::{blp_from_series, blp_measure, BlpResult};
pub use rates::{dephasing_rate_sign, RateSign};
pub use robustness::{depolarize, pstar, pstar_bisection, BisectionOptions, PStar, PStarMethod};
pub use sweep::{read_csv, sweep, write_csv, write_json, SolverKind, SweepResult, SweepSpec};
