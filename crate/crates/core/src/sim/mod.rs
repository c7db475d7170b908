//! Dense statevector simulation of few-qubit circuits.

mod circuit;
mod density;
mod gate;
mod measure;
mod state;

pub use circuit::{apply_circuit, Circuit, CircuitBuilder};
pub use density::DensityMatrix;
pub use gate::{Angle, GateKind, GateOp, Matrix2};
pub use measure::{sample_measurement, swap_test_circuit_state, swap_test_estimate, swap_test_p1};
pub use state::{fidelity, subsystem_purity, Statevector};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 16;

/// Tolerance used when checking that a state is normalised.
pub const NORM_TOLERANCE: f64 = 1e-8;
