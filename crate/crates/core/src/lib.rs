//! Quantum-circuit hashing and a reversible-gate chunk cipher on a small statevector simulator.

pub mod bits;
pub mod cipher;
pub mod codec;
pub mod hash;
pub mod metrics;
pub mod sim;
