//! Scenarios, behaviors, Bell functionals and the local and quantum models
//! that generate behaviors.

pub mod io;
pub mod local;
pub mod quantum;
pub mod scenario;
pub mod tensor;

pub use io::{TensorFile, TensorKind};
pub use local::{behavior_from_local, DeterministicLocalPoint, LocalDecomposition, SignedStrategy};
pub use quantum::{behavior_from_quantum, QuantumModel, QuantumState};
pub use scenario::Scenario;
pub use tensor::{
    mix_detector_noise, pad_functional, pair, validate, BellFunctional, Behavior, Provenance,
    ValidationReport,
};
