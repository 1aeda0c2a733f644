//! Simulation toolkit for the four-qubit cluster-state Bell inequality.
//!
//! - [`pauli`]: signed Pauli strings, exact phase algebra, stabilizer search.
//! - [`qstate`]: dense pure and mixed states, cluster/GHZ/W constructors.
//! - [`nonlocality`]: the S_C Bell parameter and exhaustive local-realist checks.
//! - [`photonics`]: creation-operator model of the double-pass pair source.
//! - [`expsim`]: polarization analyzers, Poisson coincidence counts, estimators.

pub mod expsim;
pub mod nonlocality;
pub mod pauli;
pub mod photonics;
pub mod qstate;

pub use nonlocality::{bell_parameter, bell_parameter_of_state, CorrelationTerm, LhvStrategy};
pub use pauli::{PauliAxis, PauliString, Phase, Stabilizer};
pub use qstate::QuantumState;
