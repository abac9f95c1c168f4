//! Simulation of cat-state qubits in a cavity dispersively coupled to a
//! transmon: pulse synthesis, open-system dynamics, gate sequences and
//! phase-space analysis.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod gates;
pub mod hilbert;
pub mod pulses;
pub mod sparse;

pub use error::{Error, Result};
pub use hilbert::{Operator, Parity, State, StateData, SystemParams};
pub use num_complex::Complex64 as C64;
