//! Synthesis and verification of multi-qubit gates built from global
//! entangling operations, with trapped-ion models of those operations.

pub mod angle;
pub mod catalog;
pub mod circuit;
pub mod error;
pub mod gates;
pub mod ion;
pub mod synth;
pub mod tensor;

pub use catalog::TargetGate;
pub use circuit::{Circuit, VerificationReport};
pub use error::{Error, Result};
pub use gates::{Couplings, GateKind, GateOp};
pub use tensor::{phase_aligned_distance, raw_distance, ComplexMatrix, C64};
