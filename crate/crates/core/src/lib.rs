//! Simulation of passive linear-optical circuits over multimode Fock states.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`] defines occupation vectors, sparse Fock states and the ladder operators.
//! - [`multiport`] builds mode transformations (beam splitters, phase shifters, the
//!   three-mode family used by the nonlinear sign gate) and evolves states through them.
//! - [`encodings`] maps logical qubits onto modes and decomposes single-qubit unitaries
//!   into optical elements.
//! - [`measurement`] implements photon-counting postselection and multi-outcome
//!   postcorrection.
//! - [`gates`] assembles the NS, CS and CNOT constructions and verifies them.
//! - [`search`] explores the postcorrection design space numerically.
//!
//! # Mode convention
//!
//! Mode index `0` is the leftmost slot of a printed ket, so `|k,1,0⟩` puts `k` photons
//! in mode 0. A transform `Λ` acts on creation operators column-wise,
//! `a_j† ↦ Σ_l Λ[l][j] a_l†`, which means a single photon with amplitude vector `v`
//! leaves with amplitude vector `Λ v`.

pub mod encodings;
pub mod error;
pub mod fock;
pub mod gates;
pub mod linalg;
pub mod measurement;
pub mod multiport;
pub mod random;
pub mod search;

pub use encodings::{Encoding, QubitGate, QubitUnitary, Scheme};
pub use error::{Error, Result};
pub use fock::{Complex, FockState, OccupationVector};
pub use gates::{GateCircuit, GateReport};
pub use measurement::{DetectionPattern, OutcomeBranch, PostselectionResult};
pub use multiport::{ElementKind, ElementSpec, ModeTransform};
pub use search::{AngleTriple, FeasibilityReport, Verdict};

/// Absolute tolerance used for equality checks on amplitudes and probabilities.
pub const TOLERANCE: f64 = 1e-9;

/// Amplitudes with smaller magnitude may be dropped from a state.
pub const PRUNE_THRESHOLD: f64 = 1e-12;
