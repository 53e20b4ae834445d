//! Early-time dynamics of the atom-optics kicked rotor.
//!
//! The crate covers the one- and two-kick regime: closed-form ensemble
//! energies ([`analytic`]), the classical standard map ([`classical`]),
//! exact quantum evolution with ideal delta kicks or finite rectangular
//! pulses ([`quantum`]), ensemble sampling and calibration ([`ensemble`]),
//! and deterministic parameter sweeps ([`sweep`]).
//!
//! Momenta are in 2-photon recoils (`p / 2ħk_l`) and energies in 2-photon
//! recoil energies, `E = <p²>/2`, unless a name says otherwise.

pub mod analytic;
pub mod bessel;
pub mod classical;
pub mod ensemble;
mod error;
pub mod params;
pub mod quantum;
pub mod stats;
pub mod sweep;

pub use analytic::AnalyticInputs;
pub use classical::ClassicalState;
pub use ensemble::{EnergyRecord, EnsembleSpec, Method, MomentumEnsemble};
pub use error::{Error, Result};
pub use params::{PhysicalConstants, RotorParams};
pub use quantum::{PulseSchedule, QuantumState};
pub use sweep::{Spacing, SweepConfig};
