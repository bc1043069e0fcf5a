//! Reliability and availability of carrier-assisted cold storage.
//!
//! The crate covers the analytic side (state-space enumeration, the
//! hard-error-aware Markov chain and its lower/upper bounds on mean time to
//! data loss), carrier lifetime modelling from field exchange logs, and a
//! Monte Carlo engine that simulates carrier aging explicitly.

// `!(x > 0.0)` is how parameter checks reject NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod carrier;
pub mod config;
pub mod error;
pub mod hard_error;
pub mod ingest;
pub mod markov;
pub mod report;
pub mod sim;
pub mod special;
pub mod states;

pub use carrier::{CarrierState, FitDiagnostics, RateParams, WeibullParams};
pub use config::ConfigFile;
pub use error::{Error, Result};
pub use hard_error::{HardErrorParams, UcerUnit};
pub use markov::{ProbMatrix, RateMatrix, UbMethod};
pub use sim::{SimConfig, SimMode, SimSummary, SweepAxis, TrialOutcome};
pub use special::{HarmonicMode, ProbVector};
pub use states::{StateSpace, SystemState};
