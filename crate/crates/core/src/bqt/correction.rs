//! Pauli corrections keyed by the six announced measurement outcomes.
//!
//! Only the worked step-3 branch has published rules ([`published_rule`]). The
//! full 64-entry [`CorrectionTable`] is derived by exhaustive search and
//! shipped as a JSON asset (`assets/corrections.json`); see
//! `docs/schemas.md` for the wire format.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::protocol::{
    encode, initial_state, step3_measure, step4_measure, Drive, ALICE_TARGET, BOB_TARGET,
};
use super::types::{EprInput, LeafKey, Sign, Step3, Step4};
use crate::error::{Error, Result};
use crate::qsim::{Gate1, Label, Register};
use crate::scalar::Scalar;

/// Single-qubit correction. `XZ` is the product X·Z (Z applied first),
/// which equals Y up to a global phase; on the wire it is written `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    Z,
    X,
    XZ,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::Z, Pauli::X, Pauli::XZ];

    /// Search preference: Z before X before XZ. Identity ranks last so that,
    /// position by position, acting on an earlier qubit is preferred.
    fn rank(self) -> u8 {
        match self {
            Pauli::Z => 1,
            Pauli::X => 2,
            Pauli::XZ => 3,
            Pauli::I => 4,
        }
    }

    pub fn code(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::Z => 'Z',
            Pauli::X => 'X',
            Pauli::XZ => 'Y',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        Some(match c {
            'I' => Pauli::I,
            'Z' => Pauli::Z,
            'X' => Pauli::X,
            'Y' => Pauli::XZ,
            _ => return None,
        })
    }

    /// Gates in application order.
    pub fn gates(self) -> &'static [Gate1] {
        match self {
            Pauli::I => &[],
            Pauli::Z => &[Gate1::Z],
            Pauli::X => &[Gate1::X],
            Pauli::XZ => &[Gate1::Z, Gate1::X],
        }
    }
}

/// A Pauli string on an ordered pair of qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliPair(pub [Pauli; 2]);

impl PauliPair {
    pub const IDENTITY: PauliPair = PauliPair([Pauli::I, Pauli::I]);

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|p| **p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    pub fn apply<T: Scalar>(&self, reg: &mut Register<T>, qubits: [&str; 2]) -> Result<()> {
        for (p, q) in self.0.iter().zip(qubits) {
            let q = Label::from(q);
            for g in p.gates() {
                reg.apply_gate1(&q, *g)?;
            }
        }
        Ok(())
    }

    /// All 16 strings, most preferred first: fewer non-identity factors,
    /// then Z over X over XZ, then acting on the earlier qubit.
    pub fn by_preference() -> Vec<PauliPair> {
        let mut all: Vec<PauliPair> = Pauli::ALL
            .iter()
            .flat_map(|&p| Pauli::ALL.iter().map(move |&q| PauliPair([p, q])))
            .collect();
        all.sort_by_key(|pp| {
            let mut ranks: Vec<u8> =
                pp.0.iter()
                    .filter(|p| **p != Pauli::I)
                    .map(|p| p.rank())
                    .collect();
            ranks.sort_unstable();
            (pp.weight(), ranks, [pp.0[0].rank(), pp.0[1].rank()])
        });
        all
    }
}

impl fmt::Display for PauliPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0[0].code(), self.0[1].code())
    }
}

impl FromStr for PauliPair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<Pauli> = s
            .chars()
            .map(Pauli::from_code)
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Table(format!("invalid Pauli string `{s}`")))?;
        match v[..] {
            [a, b] => Ok(PauliPair([a, b])),
            _ => Err(Error::Table(format!(
                "Pauli string `{s}` must have two factors"
            ))),
        }
    }
}

impl Serialize for PauliPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Operations each party applies to the pair it received.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CorrectionRule {
    /// Applied by Bob to (b1,b2).
    pub bob_ops: PauliPair,
    /// Applied by Alice to (a2,a3).
    pub alice_ops: PauliPair,
}

impl CorrectionRule {
    pub fn apply<T: Scalar>(&self, payload: &mut Register<T>) -> Result<()> {
        self.bob_ops.apply(payload, BOB_TARGET)?;
        self.alice_ops.apply(payload, ALICE_TARGET)
    }
}

/// The published rules for the worked step-3 branch, keyed by (A1, B1).
pub fn published_rule(step4: Step4) -> CorrectionRule {
    use Pauli::{I, Z};
    let (bob, alice) = match (step4.alice, step4.bob) {
        (Sign::Plus, Sign::Plus) => ([I, I], [I, I]),
        (Sign::Plus, Sign::Minus) => ([Z, Z], [I, Z]),
        (Sign::Minus, Sign::Plus) => ([I, Z], [Z, Z]),
        (Sign::Minus, Sign::Minus) => ([Z, I], [Z, I]),
    };
    CorrectionRule {
        bob_ops: PauliPair(bob),
        alice_ops: PauliPair(alice),
    }
}

/// One row of the persisted table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRecord {
    pub a1: u8,
    #[serde(rename = "A2")]
    pub alice_x2: Sign,
    pub b3: u8,
    #[serde(rename = "B2")]
    pub bob_x2: Sign,
    #[serde(rename = "A1")]
    pub alice_x1: Sign,
    #[serde(rename = "B1")]
    pub bob_x1: Sign,
    pub bob_ops: PauliPair,
    pub alice_ops: PauliPair,
}

impl TableRecord {
    pub fn key(&self) -> LeafKey {
        LeafKey {
            step3: Step3 {
                a1: self.a1,
                alice_x: self.alice_x2,
                b3: self.b3,
                bob_x: self.bob_x2,
            },
            step4: Step4 {
                alice: self.alice_x1,
                bob: self.bob_x1,
            },
        }
    }

    pub fn rule(&self) -> CorrectionRule {
        CorrectionRule {
            bob_ops: self.bob_ops,
            alice_ops: self.alice_ops,
        }
    }

    fn new(key: LeafKey, rule: CorrectionRule) -> Self {
        TableRecord {
            a1: key.step3.a1,
            alice_x2: key.step3.alice_x,
            b3: key.step3.b3,
            bob_x2: key.step3.bob_x,
            alice_x1: key.step4.alice,
            bob_x1: key.step4.bob,
            bob_ops: rule.bob_ops,
            alice_ops: rule.alice_ops,
        }
    }
}

/// Complete map from the 64 outcome assignments to corrections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionTable {
    rules: Vec<CorrectionRule>,
}

const BUILTIN_JSON: &str = include_str!("../../assets/corrections.json");

/// Fidelity a correction must reach on the probe inputs to be accepted.
const SEARCH_THRESHOLD: f64 = 1.0 - 1e-10;

fn probe_inputs() -> [(EprInput<f64>, EprInput<f64>); 2] {
    [
        (
            EprInput::from_angles(0.4, 1.1),
            EprInput::from_angles(1.0, -0.3),
        ),
        (
            EprInput::from_angles(1.2, 2.5).with_global_phase(0.9),
            EprInput::from_angles(0.7, 0.2).with_global_phase(-1.3),
        ),
    ]
}

impl CorrectionTable {
    /// The table shipped with the crate, parsed once.
    pub fn builtin() -> &'static Self {
        static TABLE: OnceLock<CorrectionTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            Self::from_json(BUILTIN_JSON).expect("bundled correction table is valid")
        })
    }

    /// Searches, for every leaf, the most preferred Pauli string per party
    /// that maps the received pair back to the sender's input.
    pub fn derive() -> Self {
        let probes: Vec<_> = probe_inputs()
            .iter()
            .map(|(a, b)| {
                let enc = encode(&initial_state(a, b).expect("valid probe"))
                    .expect("protocol labels present");
                (*a, *b, enc)
            })
            .collect();
        let candidates = PauliPair::by_preference();
        let mut rules = Vec::with_capacity(LeafKey::COUNT);
        for key in LeafKey::all() {
            let payloads: Vec<_> = probes
                .iter()
                .map(|(a, b, enc)| {
                    let s3 = step3_measure(enc, Drive::Force(key.step3))
                        .expect("every branch is reachable");
                    let s4 = step4_measure(&s3.remainder, Drive::Force(key.step4))
                        .expect("every branch is reachable");
                    (*a, *b, s4.payload)
                })
                .collect();
            let find = |target: [&str; 2],
                        sent: fn(
                &(EprInput<f64>, EprInput<f64>, Register<f64>),
            ) -> EprInput<f64>| {
                candidates
                    .iter()
                    .copied()
                    .find(|ops| {
                        payloads.iter().all(|p| {
                            let mut reg = p.2.clone();
                            ops.apply(&mut reg, target).expect("payload labels present");
                            let want = sent(p).register(target).expect("distinct labels");
                            reg.fidelity_on(&want).expect("labels align") >= SEARCH_THRESHOLD
                        })
                    })
                    .expect("some Pauli string corrects every branch")
            };
            rules.push(CorrectionRule {
                bob_ops: find(BOB_TARGET, |p| p.0),
                alice_ops: find(ALICE_TARGET, |p| p.1),
            });
        }
        CorrectionTable { rules }
    }

    pub fn from_records(records: &[TableRecord]) -> Result<Self> {
        if records.len() != LeafKey::COUNT {
            return Err(Error::Table(format!(
                "expected {} records, found {}",
                LeafKey::COUNT,
                records.len()
            )));
        }
        let mut rules: Vec<Option<CorrectionRule>> = vec![None; LeafKey::COUNT];
        for r in records {
            if r.a1 > 1 || r.b3 > 1 {
                return Err(Error::Table(format!("Z outcome out of range in {r:?}")));
            }
            let slot = &mut rules[r.key().index()];
            if slot.is_some() {
                return Err(Error::Table(format!("duplicate record for {}", r.key())));
            }
            *slot = Some(r.rule());
        }
        Ok(CorrectionTable {
            rules: rules
                .into_iter()
                .map(|r| r.expect("64 distinct keys fill every slot"))
                .collect(),
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let records: Vec<TableRecord> =
            serde_json::from_str(s).map_err(|e| Error::Table(e.to_string()))?;
        Self::from_records(&records)
    }

    pub fn records(&self) -> Vec<TableRecord> {
        LeafKey::all()
            .zip(&self.rules)
            .map(|(k, r)| TableRecord::new(k, *r))
            .collect()
    }

    /// Pretty-printed JSON with a trailing newline, as stored in the asset.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.records()).expect("records serialize");
        s.push('\n');
        s
    }

    pub fn rule(&self, key: &LeafKey) -> CorrectionRule {
        self.rules[key.index()]
    }

    pub fn set_rule(&mut self, key: &LeafKey, rule: CorrectionRule) {
        self.rules[key.index()] = rule;
    }
}

/// Applies both parties' corrections for `key` to a payload over (b1,b2,a2,a3).
pub fn correct<T: Scalar>(
    table: &CorrectionTable,
    payload: &Register<T>,
    key: &LeafKey,
) -> Result<Register<T>> {
    let mut out = payload.clone();
    table.rule(key).apply(&mut out)?;
    Ok(out)
}
