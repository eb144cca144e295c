use rand::RngCore;

use super::types::{EprInput, Sign, Step3, Step4};
use crate::error::Result;
use crate::ghz::{ghz_state, GhzIndex};
use crate::qsim::{labels, Basis, Label, Mode, Register};
use crate::scalar::Scalar;

pub const CH_A1: &str = "a1";
pub const CH_A2: &str = "a2";
pub const CH_A3: &str = "a3";
pub const CH_B1: &str = "b1";
pub const CH_B2: &str = "b2";
pub const CH_B3: &str = "b3";
pub const IN_A1: &str = "A1";
pub const IN_A2: &str = "A2";
pub const IN_B1: &str = "B1";
pub const IN_B2: &str = "B2";

/// Channel qubit order: the first GHZ triple is (a1,b1,b2), the second (a2,a3,b3).
pub const CHANNEL_ORDER: [&str; 6] = [CH_A1, CH_B1, CH_B2, CH_A2, CH_A3, CH_B3];
/// Ten-qubit order after attaching both inputs.
pub const FULL_ORDER: [&str; 10] = [
    CH_A1, CH_B1, CH_B2, CH_A2, CH_A3, CH_B3, IN_A1, IN_A2, IN_B1, IN_B2,
];
/// Qubits left after the first round of measurements.
pub const REMAINDER_ORDER: [&str; 6] = [CH_B1, CH_B2, CH_A2, CH_A3, IN_A1, IN_B1];
/// Qubits left after the second round.
pub const PAYLOAD_ORDER: [&str; 4] = [CH_B1, CH_B2, CH_A2, CH_A3];
/// Where Alice's state ends up (Bob's side).
pub const BOB_TARGET: [&str; 2] = [CH_B1, CH_B2];
/// Where Bob's state ends up (Alice's side).
pub const ALICE_TARGET: [&str; 2] = [CH_A2, CH_A3];

pub const ALICE_QUBITS: [&str; 5] = [CH_A1, CH_A2, CH_A3, IN_A1, IN_A2];
pub const BOB_QUBITS: [&str; 5] = [CH_B1, CH_B2, CH_B3, IN_B1, IN_B2];

/// The shared channel: `|Ψ0⟩_{a1 b1 b2} ⊗ |Ψ0⟩_{a2 a3 b3}`.
pub fn prepare_channel<T: Scalar>() -> Register<T> {
    let g = GhzIndex::new(0).expect("index 0 is valid");
    let first = ghz_state::<T, _>(g, [CH_A1, CH_B1, CH_B2]).expect("distinct labels");
    let second = ghz_state::<T, _>(g, [CH_A2, CH_A3, CH_B3]).expect("distinct labels");
    first.tensor(&second).expect("disjoint triples")
}

/// Channel ⊗ Alice's input on (A1,A2) ⊗ Bob's input on (B1,B2).
pub fn initial_state<T: Scalar>(alice: &EprInput<T>, bob: &EprInput<T>) -> Result<Register<T>> {
    prepare_channel::<T>()
        .tensor(&alice.register([IN_A1, IN_A2])?)?
        .tensor(&bob.register([IN_B1, IN_B2])?)
}

/// CNOT(A1 → a1) followed by CNOT(B1 → b3).
pub fn encode<T: Scalar>(full: &Register<T>) -> Result<Register<T>> {
    full.clone().cnot(IN_A1, CH_A1)?.cnot(IN_B1, CH_B3)
}

/// How the protocol's measurement outcomes are chosen.
pub enum Drive<'a, O> {
    /// Draw each outcome from the Born distribution, one draw per qubit.
    Sample(&'a mut dyn RngCore),
    Force(O),
}

impl<O: Copy> Drive<'_, O> {
    fn mode(&mut self, pick: impl Fn(O) -> u8) -> Mode<'_> {
        match self {
            Drive::Sample(rng) => Mode::Sample(&mut **rng),
            Drive::Force(o) => Mode::Force(pick(*o)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step3Result<T: Scalar> {
    pub outcomes: Step3,
    /// Joint probability of the four outcomes.
    pub probability: T,
    /// State of (b1,b2,a2,a3,A1,B1).
    pub remainder: Register<T>,
}

/// Z on a1 and b3, X on A2 and B2. Measured in the order a1, A2, b3, B2.
pub fn step3_measure<T: Scalar>(
    encoded: &Register<T>,
    mut drive: Drive<'_, Step3>,
) -> Result<Step3Result<T>> {
    let m_a1 = encoded.measure(&CH_A1.into(), Basis::Z, drive.mode(|o| o.a1))?;
    let m_ax = m_a1
        .collapsed
        .measure(&IN_A2.into(), Basis::X, drive.mode(|o| o.alice_x.bit()))?;
    let m_b3 = m_ax
        .collapsed
        .measure(&CH_B3.into(), Basis::Z, drive.mode(|o| o.b3))?;
    let m_bx = m_b3
        .collapsed
        .measure(&IN_B2.into(), Basis::X, drive.mode(|o| o.bob_x.bit()))?;
    Ok(Step3Result {
        outcomes: Step3 {
            a1: m_a1.outcome,
            alice_x: Sign::from_bit(m_ax.outcome),
            b3: m_b3.outcome,
            bob_x: Sign::from_bit(m_bx.outcome),
        },
        probability: m_a1.probability * m_ax.probability * m_b3.probability * m_bx.probability,
        remainder: m_bx.collapsed,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step4Result<T: Scalar> {
    pub outcomes: Step4,
    /// Probability conditional on the step-3 branch.
    pub probability: T,
    /// State of (b1,b2,a2,a3).
    pub payload: Register<T>,
}

/// X on A1 then X on B1.
pub fn step4_measure<T: Scalar>(
    remainder: &Register<T>,
    mut drive: Drive<'_, Step4>,
) -> Result<Step4Result<T>> {
    let m_a = remainder.measure(&IN_A1.into(), Basis::X, drive.mode(|o| o.alice.bit()))?;
    let m_b = m_a
        .collapsed
        .measure(&IN_B1.into(), Basis::X, drive.mode(|o| o.bob.bit()))?;
    Ok(Step4Result {
        outcomes: Step4 {
            alice: Sign::from_bit(m_a.outcome),
            bob: Sign::from_bit(m_b.outcome),
        },
        probability: m_a.probability * m_b.probability,
        payload: m_b.collapsed,
    })
}

/// Label list for a fixed-order constant.
pub fn order(names: &[&str]) -> Vec<Label> {
    labels(names.iter().copied())
}
