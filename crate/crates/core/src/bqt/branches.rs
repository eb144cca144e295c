use super::correction::{correct, CorrectionTable};
use super::protocol::{
    encode, initial_state, step3_measure, step4_measure, Drive, Step3Result, ALICE_TARGET,
    BOB_TARGET,
};
use super::types::{EprInput, LeafKey, Sign, Step3};
use crate::error::Result;
use crate::qsim::{DensityMatrix, Register};
use crate::scalar::Scalar;

/// One complete measurement history with its exact probability.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchLeaf<T: Scalar> {
    pub key: LeafKey,
    pub probability: T,
    /// Uncorrected state of (b1,b2,a2,a3).
    pub post_state: Register<T>,
    /// State of (b1,b2,a2,a3) after both parties' corrections.
    pub corrected: Register<T>,
    /// Fidelity of Bob's (b1,b2) with Alice's input.
    pub fidelity_to_bob: T,
    /// Fidelity of Alice's (a2,a3) with Bob's input.
    pub fidelity_to_alice: T,
}

/// All 16 first-round branches with their joint probabilities and remainders.
pub fn enumerate_step3<T: Scalar>(
    alice: &EprInput<T>,
    bob: &EprInput<T>,
) -> Result<Vec<Step3Result<T>>> {
    let enc = encode(&initial_state(alice, bob)?)?;
    Step3::all()
        .map(|s| step3_measure(&enc, Drive::Force(s)))
        .collect()
}

/// Exhaustive enumeration of all 64 leaves using the bundled correction table.
pub fn enumerate_branches<T: Scalar>(
    alice: &EprInput<T>,
    bob: &EprInput<T>,
) -> Result<Vec<BranchLeaf<T>>> {
    enumerate_branches_with(alice, bob, CorrectionTable::builtin())
}

/// Exhaustive enumeration using an explicit correction table.
///
/// Leaves come back in [`LeafKey::all`] order.
pub fn enumerate_branches_with<T: Scalar>(
    alice: &EprInput<T>,
    bob: &EprInput<T>,
    table: &CorrectionTable,
) -> Result<Vec<BranchLeaf<T>>> {
    let to_bob = alice.register(BOB_TARGET)?;
    let to_alice = bob.register(ALICE_TARGET)?;
    let mut leaves = Vec::with_capacity(LeafKey::COUNT);
    for s3 in enumerate_step3(alice, bob)? {
        for key in LeafKey::all().filter(|k| k.step3 == s3.outcomes) {
            let s4 = step4_measure(&s3.remainder, Drive::Force(key.step4))?;
            let corrected = correct(table, &s4.payload, &key)?;
            leaves.push(BranchLeaf {
                key,
                probability: s3.probability * s4.probability,
                fidelity_to_bob: corrected.fidelity_on(&to_bob)?,
                fidelity_to_alice: corrected.fidelity_on(&to_alice)?,
                post_state: s4.payload,
                corrected,
            });
        }
    }
    Ok(leaves)
}

/// Which second-round announcement is withheld.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Withheld {
    /// Alice keeps A1 to herself; Bob cannot finish.
    AliceA1,
    /// Bob keeps B1 to himself; Alice cannot finish.
    BobB1,
}

impl Withheld {
    /// The key the deprived receiver acts on: the withheld sign replaced by `+`.
    pub fn guess(self, key: &LeafKey) -> LeafKey {
        let mut k = *key;
        match self {
            Withheld::AliceA1 => k.step4.alice = Sign::Plus,
            Withheld::BobB1 => k.step4.bob = Sign::Plus,
        }
        k
    }
}

/// Expected fidelity of the deprived receiver when one second-round result is withheld.
///
/// `sent` is the input of the party who withholds. The receiver corrects with
/// everything it did learn and treats the missing sign as `+`; its state is
/// averaged over all leaves as a density matrix and compared with `sent`.
pub fn noncooperation_fidelity<T: Scalar>(sent: &EprInput<T>, withheld: Withheld) -> Result<T> {
    noncooperation_fidelity_with(sent, withheld, CorrectionTable::builtin())
}

pub fn noncooperation_fidelity_with<T: Scalar>(
    sent: &EprInput<T>,
    withheld: Withheld,
    table: &CorrectionTable,
) -> Result<T> {
    // The receiver's own input does not influence its received pair.
    let other = EprInput::from_angles(T::lit(0.3), T::lit(0.2));
    let (alice, bob, target) = match withheld {
        Withheld::AliceA1 => (*sent, other, BOB_TARGET),
        Withheld::BobB1 => (other, *sent, ALICE_TARGET),
    };
    let rho = received_mixture(&alice, &bob, withheld, table, target)?;
    rho.fidelity_pure(&sent.register(target)?)
}

/// Density matrix of the deprived receiver's pair, averaged over all leaves.
pub fn received_mixture<T: Scalar>(
    alice: &EprInput<T>,
    bob: &EprInput<T>,
    withheld: Withheld,
    table: &CorrectionTable,
    target: [&str; 2],
) -> Result<DensityMatrix<T>> {
    let enc = encode(&initial_state(alice, bob)?)?;
    let mut parts = Vec::with_capacity(LeafKey::COUNT);
    for key in LeafKey::all() {
        let s3 = step3_measure(&enc, Drive::Force(key.step3))?;
        let s4 = step4_measure(&s3.remainder, Drive::Force(key.step4))?;
        let corrected = correct(table, &s4.payload, &withheld.guess(&key))?;
        parts.push((
            s3.probability * s4.probability,
            corrected.reduced_density(target)?,
        ));
    }
    DensityMatrix::mixture(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixty_four_uniform_leaves() {
        let a = EprInput::<f64>::real(0.6, 0.8).unwrap();
        let b = EprInput::<f64>::real(0.8, 0.6).unwrap();
        let leaves = enumerate_branches(&a, &b).unwrap();
        assert_eq!(leaves.len(), 64);
        let total: f64 = leaves.iter().map(|l| l.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for (i, l) in leaves.iter().enumerate() {
            assert_eq!(l.key.index(), i);
            assert!((l.probability - 1.0 / 64.0).abs() < 1e-12);
            assert!((l.fidelity_to_bob - 1.0).abs() < 1e-12, "{}", l.key);
            assert!((l.fidelity_to_alice - 1.0).abs() < 1e-12, "{}", l.key);
        }
    }

    #[test]
    fn noncooperation_examples() {
        let one = EprInput::<f64>::real(1.0, 0.0).unwrap();
        assert!((noncooperation_fidelity(&one, Withheld::AliceA1).unwrap() - 1.0).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bal = EprInput::<f64>::real(h, h).unwrap();
        assert!((noncooperation_fidelity(&bal, Withheld::AliceA1).unwrap() - 0.5).abs() < 1e-12);
        let e = EprInput::<f64>::real(0.6, 0.8).unwrap();
        assert!((noncooperation_fidelity(&e, Withheld::BobB1).unwrap() - 0.5392).abs() < 1e-12);
    }
}
