//! Security analysis of the BBM92 entanglement-based QKD protocol when both
//! parties use threshold detectors and discard double clicks.
//!
//! * [`fock`]: multiphoton polarization states and their overlaps.
//! * [`povm`]: joint measurement operators and the double-click/error region.
//! * [`rates`]: privacy-amplification cost and key fraction.
//! * [`attack`]: the controlled-NOT style attack that saturates the region.
//! * [`sim`]: seeded Monte Carlo of the sift-and-discard protocol.
//! * [`selftest`]: quick runtime check of the main invariants.

pub mod attack;
pub mod error;
pub mod fock;
pub mod povm;
pub mod rates;
pub mod selftest;
pub mod sim;

pub use error::{Error, Result};
