//! Few-qubit statevector simulation and a variational quantum support vector
//! machine that labels pure states as entangled or separable.
//!
//! The crate is organised bottom-up:
//!
//! - [`sim`]: dense statevectors, gates, circuits, density matrices, shot
//!   sampling and the swap test.
//! - [`ansatz`]: the registry of parameterised benchmark circuits.
//! - [`dataset`]: labelled entangled/separable states for two and three qubits.
//! - [`metrics`]: Meyer-Wallach entangling capability and KL expressibility.
//! - [`qsvm`]: the basis-probability coefficient map, the quantum dual loss,
//!   SPSA training, the decision function and a classical dual oracle.
//!
//! Qubit 0 is the least-significant bit of a basis index everywhere.
//!
//! ```
//! use qsvm_core::sim::{Circuit, GateKind, Statevector};
//!
//! let bell = Circuit::builder(2)
//!     .gate(GateKind::H, &[0])
//!     .gate(GateKind::CNOT, &[0, 1])
//!     .build()
//!     .unwrap();
//! let state = bell.run(&[]).unwrap();
//! assert!((state.subsystem_purity(&[0]).unwrap() - 0.5).abs() < 1e-12);
//! # let _ = Statevector::zero(1);
//! ```

pub mod ansatz;
pub mod dataset;
mod error;
pub mod metrics;
pub mod qsvm;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
