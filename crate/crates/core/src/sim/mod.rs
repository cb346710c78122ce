//! Dense statevector simulation for small registers.
//!
//! Qubit 0 is the least-significant bit of a basis-state index. Bitstrings
//! rendered from measurement outcomes put the highest qubit first.

mod gate;
mod noise;
mod state;
mod unitary;

pub use gate::{gate_matrix, inverse_circuit, Circuit, GateKind, GateOp, Matrix};
pub use noise::{noisy_sample, NoiseModel};
pub use state::{run_circuit, Counts, StateVector};
pub use unitary::{circuit_unitary, MAX_UNITARY_QUBITS};

use thiserror::Error;

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("qubit count {0} outside 1..={MAX_QUBITS}")]
    InvalidQubitCount(usize),
    #[error("basis state {index} out of range for {n_qubits} qubits")]
    InvalidBasisState { index: usize, n_qubits: usize },
    #[error("shots must be at least 1")]
    ZeroShots,
    #[error("unitary extraction supports at most {MAX_UNITARY_QUBITS} qubits, got {0}")]
    UnsupportedSize(usize),
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("state has no valid probability mass")]
    Unnormalized,
    #[error("circuit has {circuit} qubits but the state has {state}")]
    RegisterMismatch { circuit: usize, state: usize },
}

pub(crate) fn check_qubit_count(n: usize) -> Result<(), SimError> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(SimError::InvalidQubitCount(n))
    }
}
