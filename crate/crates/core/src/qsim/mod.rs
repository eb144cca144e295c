//! Dense complex state-vector engine over registers of named qubits.
//!
//! Index bit ordering is most-significant-first: `labels[0]` selects the top
//! bit of the amplitude index. Measurements remove the measured qubits from the
//! register they return.

mod density;
mod gate;
mod label;
mod measure;
mod register;

pub use density::DensityMatrix;
pub use gate::Gate1;
pub use label::{labels, Label};
pub use measure::{Basis, Measurement, Mode};
pub use register::Register;

pub(crate) use measure::{choose, norm_sqr};

/// Largest register the engine will build.
pub const MAX_QUBITS: usize = 12;
