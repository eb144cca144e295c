//! The eight-state GHZ basis, projective measurement onto it, and entanglement
//! swapping between two GHZ triples.
//!
//! Basis ordering:
//!
//! | idx | state                    |
//! |-----|--------------------------|
//! | 0   | (\|000⟩ + \|111⟩)/√2     |
//! | 1   | (\|000⟩ − \|111⟩)/√2     |
//! | 2   | (\|100⟩ + \|011⟩)/√2     |
//! | 3   | (\|100⟩ − \|011⟩)/√2     |
//! | 4   | (\|010⟩ + \|101⟩)/√2     |
//! | 5   | (\|010⟩ − \|101⟩)/√2     |
//! | 6   | (\|110⟩ + \|001⟩)/√2     |
//! | 7   | (\|110⟩ − \|001⟩)/√2     |

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{choose, norm_sqr, Label, Mode, Register};
use crate::scalar::{czero, frac_1_sqrt_2, Scalar};

/// Index into the GHZ basis, `0..8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct GhzIndex(u8);

impl GhzIndex {
    pub const COUNT: usize = 8;

    pub fn new(idx: usize) -> Result<Self> {
        if idx < Self::COUNT {
            Ok(GhzIndex(idx as u8))
        } else {
            Err(Error::GhzIndex(idx))
        }
    }

    pub fn all() -> impl Iterator<Item = GhzIndex> {
        (0..Self::COUNT as u8).map(GhzIndex)
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// The leading basis string and the relative sign of its bitwise complement.
    pub fn components(self) -> (u8, bool) {
        const LEAD: [u8; 4] = [0b000, 0b100, 0b010, 0b110];
        (LEAD[self.get() / 2], self.get() % 2 == 1)
    }

    /// Amplitudes of the basis state over 3 qubits, most-significant-first.
    pub fn vector<T: Scalar>(self) -> [Complex<T>; 8] {
        let (lead, negative) = self.components();
        let h = frac_1_sqrt_2::<T>();
        let mut v = [czero(); 8];
        v[lead as usize] = Complex::new(h, T::zero());
        v[(!lead & 0b111) as usize] = Complex::new(if negative { -h } else { h }, T::zero());
        v
    }
}

impl TryFrom<u8> for GhzIndex {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        GhzIndex::new(v as usize)
    }
}

impl From<GhzIndex> for u8 {
    fn from(g: GhzIndex) -> u8 {
        g.0
    }
}

impl fmt::Display for GhzIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ψ{}", self.0)
    }
}

fn triple<L: Into<Label>>(labels: [L; 3]) -> [Label; 3] {
    labels.map(Into::into)
}

/// The `i`-th GHZ basis state on three named qubits.
pub fn ghz_state<T: Scalar, L: Into<Label>>(i: GhzIndex, labels: [L; 3]) -> Result<Register<T>> {
    Register::from_amplitudes(triple(labels), i.vector::<T>().to_vec())
}

/// Outcome of a GHZ-basis measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct GhzMeasurement<T: Scalar> {
    pub outcome: GhzIndex,
    pub probability: T,
    /// Remaining qubits in their original relative order.
    pub collapsed: Register<T>,
}

/// Unnormalized projections of the remainder for each of the eight outcomes.
fn ghz_projections<T: Scalar>(
    reg: &Register<T>,
    triple: &[Label; 3],
) -> Result<(Vec<Vec<Complex<T>>>, Vec<Label>)> {
    let (front, rest) = reg.bring_to_front(triple)?;
    let a = front.amplitudes();
    let r = a.len() / 8;
    let projs = GhzIndex::all()
        .map(|g| {
            let v = g.vector::<T>();
            (0..r)
                .map(|k| (0..8).fold(czero(), |acc, b| acc + v[b].conj() * a[b * r + k]))
                .collect()
        })
        .collect();
    Ok((projs, rest))
}

/// Born probabilities of the eight GHZ outcomes on `triple`.
pub fn ghz_probabilities<T: Scalar, L: Into<Label>>(
    reg: &Register<T>,
    triple: [L; 3],
) -> Result<[T; 8]> {
    let (projs, _) = ghz_projections(reg, &self::triple(triple))?;
    let mut p = [T::zero(); 8];
    for (pi, v) in p.iter_mut().zip(&projs) {
        *pi = norm_sqr(v);
    }
    Ok(p)
}

/// Projects `triple` onto the GHZ basis and removes those three qubits.
///
/// Sampling consumes one uniform draw.
pub fn ghz_basis_measure<T: Scalar, L: Into<Label>>(
    reg: &Register<T>,
    triple: [L; 3],
    mode: Mode<'_>,
) -> Result<GhzMeasurement<T>> {
    let (mut projs, rest) = ghz_projections(reg, &self::triple(triple))?;
    let probs: Vec<T> = projs.iter().map(|v| norm_sqr(v)).collect();
    let o = choose(&probs, mode)?;
    let mut collapsed = Register::from_parts(rest, projs.swap_remove(o));
    collapsed.normalize()?;
    Ok(GhzMeasurement {
        outcome: GhzIndex(o as u8),
        probability: probs[o],
        collapsed,
    })
}

/// The GHZ basis state `reg` equals up to global phase, if any.
pub fn classify<T: Scalar>(reg: &Register<T>) -> Option<GhzIndex> {
    if reg.num_qubits() != 3 {
        return None;
    }
    GhzIndex::all().find(|&g| {
        let basis = Register::from_parts(reg.labels().to_vec(), g.vector::<T>().to_vec());
        reg.equal_up_to_global_phase(&basis, T::PSD_TOL)
            .unwrap_or(false)
    })
}

/// One nonzero branch of an entanglement swap.
#[derive(Clone, Debug, PartialEq)]
pub struct SwapOutcome<T: Scalar> {
    /// Result of the GHZ measurement on qubits (1,3,5).
    pub outcome: GhzIndex,
    pub probability: T,
    /// State of qubits (2,4,6).
    pub remainder: Register<T>,
    /// GHZ basis state the remainder equals up to phase.
    pub matched: Option<GhzIndex>,
}

/// Qubits measured during a swap.
pub const SWAP_MEASURED: [&str; 3] = ["1", "3", "5"];
/// Qubits left entangled after a swap.
pub const SWAP_REMAINING: [&str; 3] = ["2", "4", "6"];

/// Entanglement swapping between `|Ψi⟩₁₂₃` and `|Ψj⟩₄₅₆`.
///
/// A GHZ measurement on (1,3,5) is enumerated exhaustively; every outcome
/// with nonzero probability is returned in index order with its remainder on
/// (2,4,6) classified against the GHZ basis.
pub fn entanglement_swap<T: Scalar>(i: GhzIndex, j: GhzIndex) -> Result<Vec<SwapOutcome<T>>> {
    let state = ghz_state::<T, _>(i, ["1", "2", "3"])?.tensor(&ghz_state(j, ["4", "5", "6"])?)?;
    let probs = ghz_probabilities(&state, SWAP_MEASURED)?;
    let mut out = Vec::with_capacity(4);
    for g in GhzIndex::all() {
        if probs[g.get()] < T::MIN_PROB {
            continue;
        }
        let m = ghz_basis_measure(&state, SWAP_MEASURED, Mode::Force(g.0))?;
        let matched = classify(&m.collapsed);
        out.push(SwapOutcome {
            outcome: m.outcome,
            probability: m.probability,
            remainder: m.collapsed,
            matched,
        });
    }
    Ok(out)
}
