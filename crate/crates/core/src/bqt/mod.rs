//! Bidirectional teleportation of `c0|00⟩ + c1|11⟩` states over two GHZ triples.
//!
//! Qubits: the channel (a1,b1,b2 | a2,a3,b3), Alice's input (A1,A2) and Bob's
//! input (B1,B2). Alice owns a1,a2,a3,A1,A2; Bob owns b1,b2,b3,B1,B2.
//!
//! 1. Prepare `|Ψ0⟩_{a1b1b2} ⊗ |Ψ0⟩_{a2a3b3}` and attach both inputs.
//! 2. CNOT(A1 → a1), CNOT(B1 → b3).
//! 3. Z on a1 and b3, X on A2 and B2; results are exchanged.
//! 4. X on A1 and B1; results are exchanged.
//! 5. Pauli corrections: Alice's state appears on (b1,b2), Bob's on (a2,a3).
//!
//! Every one of the 16 first-round and 64 full branches is equally likely,
//! independent of the inputs.

mod branches;
mod collapse_table;
mod correction;
mod protocol;
mod types;

pub use branches::{
    enumerate_branches, enumerate_branches_with, enumerate_step3, noncooperation_fidelity,
    noncooperation_fidelity_with, received_mixture, BranchLeaf, Withheld,
};
pub use collapse_table::{
    check_published_rows, check_worked_factorization, CollapseTableReport, Row, Term,
    PUBLISHED_ROWS, RECOVERED_ORDER,
};
pub use correction::{
    correct, published_rule, CorrectionRule, CorrectionTable, Pauli, PauliPair, TableRecord,
};
pub use protocol::*;
pub use types::{EprInput, LeafKey, Sign, Step3, Step4};
