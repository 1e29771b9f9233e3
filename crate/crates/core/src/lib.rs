//! Deterministic simulation of pulse-level crosstalk attacks on a 3-qubit
//! chain `q0 – q1 – q2`, where q0 and q1 belong to an adversary and q2 to the
//! victim.
//!
//! The pipeline runs from drive pulses ([`pulse`]) through closed-system
//! propagation ([`dynamics`]) to the CPTP channel on the victim, which is
//! reconstructed by process tomography ([`tomo`]) and fitted to a one-angle
//! logical model up to Kraus gauge freedom ([`fit`]). [`protocols`] measures
//! the damage to three victim programs, [`analysis`] runs parameter campaigns
//! and [`defense`] evaluates canary detection and reset containment.
//!
//! Numerics are generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! `f64`, which is what every tolerance in the crate is calibrated for.

pub mod analysis;
pub mod dataset;
pub mod defense;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod protocols;
pub mod pulse;
pub mod qcore;
pub mod scalar;
pub mod tomo;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type Complex = scalar::C<f64>;
pub type Matrix = qcore::ComplexMatrix<f64>;
pub type Density = qcore::DensityMatrix<f64>;
pub type Pulse = pulse::PulseSpec<f64>;
pub type Coupling = dynamics::CouplingSpec<f64>;
pub type Attack = dynamics::AttackConfig<f64>;
pub type Channel = tomo::QuantumChannel<f64>;
pub type Chi = tomo::ChiMatrix<f64>;
pub type Kraus = tomo::KrausSet<f64>;
pub type Fit = fit::FitResult<f64>;
pub type Sqqnn = protocols::SqqnnModel<f64>;
pub type Record = analysis::SweepRecord<f64>;
pub type ScanRow = analysis::ScanRecord<f64>;
