//! Exact statevector simulation, measurement sampling and state diagnostics.

mod circuit;
mod dense;
mod entropy;
mod frame;
mod gate;
mod sparse;
mod state;

pub use circuit::Circuit;
pub use dense::{fidelity_overlap, run_pure, states_equal_up_to_global_phase, StateVector};
pub use entropy::{entropy, reduced_density, EIGENVALUE_FLOOR};
pub use frame::BasisFrame;
pub use gate::{Gate, GateKind};
pub use sparse::{SparseState, MAX_SPARSE_QUBITS};
pub use state::{measure_sample, Bits, Pauli, QuantumState};

/// Dense simulation limit; the modeled device has 20 qubits.
pub const MAX_DENSE_QUBITS: usize = 24;

#[cfg(test)]
mod tests;
