//! Simulation of opto-mechanical micro-macro entanglement.
//!
//! One mode of a two-mode squeezed (or single-photon entangled) state of
//! light is displaced by a macroscopic amount, stored in a mechanical
//! oscillator, retrieved, and displaced back. The surviving entanglement is
//! measured by the logarithmic negativity in the Gaussian engine
//! ([`gaussian`]) and by the concurrence of a qubit projection in the
//! truncated Fock engine ([`fock`]).
//!
//! [`protocol`] composes the full pipeline, finds entanglement thresholds
//! and evaluates experimental feasibility; [`sweep`] runs parameter sweeps
//! and writes CSV.

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod par;
pub mod protocol;
pub mod selftest;
pub mod sweep;

pub use error::{Error, Result};
