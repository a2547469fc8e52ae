//! Quantum neural network regression toolkit.
//!
//! Everything needed to build and study small QNN regression models on a
//! classical machine: a dense state-vector engine, declarative
//! encoder/ansatz circuit construction, feature scaling and angle maps,
//! a derivative-free Powell optimizer, ansatz expressibility metrics
//! (KL divergence against the Haar fidelity distribution, mean single-qubit
//! entanglement entropy), and a from-scratch sigmoid MLP baseline trained
//! with Adam.
//!
//! Registers stay small (at most 14 qubits) so exact expectation values are
//! always available; nothing here samples shots or models noise.

pub mod circuit;
pub mod error;
pub mod expressibility;
pub mod features;
pub mod mlp;
pub mod powell;
pub mod qnn;
pub mod state;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
