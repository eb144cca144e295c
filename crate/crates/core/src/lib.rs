//! Simulation and exhaustive verification of bidirectional teleportation of
//! EPR-type two-qubit states over a channel of two GHZ triples.
//!
//! The crate is layered:
//!
//! * [`qsim`]: a dense state-vector engine over named qubits.
//! * [`ghz`]: the eight-state GHZ basis, GHZ-basis measurement and entanglement swapping.
//! * [`bqt`]: the teleportation protocol itself, branch enumeration and Pauli corrections.
//! * [`parties`]: a two-actor session simulator producing auditable transcripts.
//! * [`verify`]: the end-to-end verification checks used by the command-line tool.
//!
//! Numerics are generic over [`Scalar`]; the `*64` aliases below are the
//! reference instantiation.

pub mod bqt;
pub mod error;
pub mod ghz;
pub mod parties;
pub mod qsim;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Amplitude, Scalar};

pub type Register64 = qsim::Register<f64>;
pub type Register32 = qsim::Register<f32>;
pub type DensityMatrix64 = qsim::DensityMatrix<f64>;
pub type DensityMatrix32 = qsim::DensityMatrix<f32>;
pub type EprInput64 = bqt::EprInput<f64>;
pub type EprInput32 = bqt::EprInput<f32>;
pub type BranchLeaf64 = bqt::BranchLeaf<f64>;
pub type Complex64 = num_complex::Complex<f64>;
