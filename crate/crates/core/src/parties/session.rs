use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::transcript::{Actor, Announcement, Event, EventKind, Message, Transcript};
use crate::bqt::{
    initial_state, noncooperation_fidelity_with, CorrectionTable, EprInput, LeafKey, PauliPair,
    Sign, Step3, Step4, Withheld, ALICE_TARGET, BOB_TARGET, CHANNEL_ORDER, CH_A1, CH_B3, IN_A1,
    IN_A2, IN_B1, IN_B2,
};
use crate::error::{Error, Result};
use crate::qsim::{labels, Basis, Label, Mode, Register};

/// Whether both second-round announcements are made.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cooperation {
    #[default]
    #[serde(rename = "full")]
    Full,
    #[serde(rename = "withhold-a1")]
    AliceWithholdsA1,
    #[serde(rename = "withhold-b1")]
    BobWithholdsB1,
}

impl Cooperation {
    pub fn withheld(self) -> Option<Withheld> {
        match self {
            Cooperation::Full => None,
            Cooperation::AliceWithholdsA1 => Some(Withheld::AliceA1),
            Cooperation::BobWithholdsB1 => Some(Withheld::BobB1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Cooperation::Full => "full",
            Cooperation::AliceWithholdsA1 => "withhold-a1",
            Cooperation::BobWithholdsB1 => "withhold-b1",
        }
    }
}

impl fmt::Display for Cooperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Cooperation {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(Cooperation::Full),
            "withhold-a1" => Ok(Cooperation::AliceWithholdsA1),
            "withhold-b1" => Ok(Cooperation::BobWithholdsB1),
            _ => Err(format!(
                "unknown cooperation mode `{s}` (full|withhold-a1|withhold-b1)"
            )),
        }
    }
}

/// Seed of trial `index` in a batch started from `base`.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index)
}

fn outcome_text(basis: Basis, bit: u8) -> String {
    match (basis, bit) {
        (Basis::Z, b) => b.to_string(),
        (Basis::X, 0) => "+".to_owned(),
        (Basis::X, _) => "-".to_owned(),
    }
}

fn outcome_bit(text: &str) -> u8 {
    match text {
        "1" | "-" => 1,
        _ => 0,
    }
}

/// One of the two protocol participants.
#[derive(Clone, Debug)]
pub struct Party {
    pub name: Actor,
    pub owned: BTreeSet<Label>,
    pub input: EprInput<f64>,
    pub received: Vec<Message>,
    results: BTreeMap<Label, Announcement>,
}

impl Party {
    pub fn new(name: Actor, input: EprInput<f64>) -> Self {
        Party {
            name,
            owned: name.owned(),
            input,
            received: Vec::new(),
            results: BTreeMap::new(),
        }
    }

    fn ensure_owned(&self, qubits: &[&str]) -> Result<Vec<Label>> {
        qubits
            .iter()
            .map(|q| {
                let l = Label::from(*q);
                if self.owned.contains(&l) {
                    Ok(l)
                } else {
                    Err(Error::Ownership(format!("{} does not own {q}", self.name)))
                }
            })
            .collect()
    }

    fn cnot(
        &self,
        reg: &mut Register<f64>,
        control: &str,
        target: &str,
        log: &mut Transcript,
    ) -> Result<()> {
        let qs = self.ensure_owned(&[control, target])?;
        reg.apply_cnot(&qs[0], &qs[1])?;
        log.push(Event::new(2, self.name, EventKind::Cnot, qs));
        Ok(())
    }

    fn measure(
        &mut self,
        reg: &mut Register<f64>,
        q: &str,
        basis: Basis,
        step: u8,
        rng: &mut dyn RngCore,
        log: &mut Transcript,
    ) -> Result<u8> {
        let q = self.ensure_owned(&[q])?.remove(0);
        let m = reg.measure(&q, basis, Mode::Sample(rng))?;
        *reg = m.collapsed;
        let outcome = outcome_text(basis, m.outcome);
        let mut e = Event::new(step, self.name, EventKind::Measure, vec![q.clone()]);
        e.basis = Some(basis);
        e.outcome = Some(outcome.clone());
        e.probability = Some(m.probability);
        log.push(e);
        self.results.insert(
            q.clone(),
            Announcement {
                qubit: q,
                basis,
                outcome,
            },
        );
        Ok(m.outcome)
    }

    fn announce(
        &self,
        round: u32,
        qubits: &[&str],
        step: u8,
        log: &mut Transcript,
    ) -> Result<Message> {
        let qs = self.ensure_owned(qubits)?;
        let payload = qs
            .iter()
            .map(|q| {
                self.results.get(q).cloned().ok_or_else(|| {
                    Error::Ownership(format!("{} announces unmeasured {q}", self.name))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut e = Event::new(step, self.name, EventKind::Announce, qs);
        e.message_round = Some(round);
        e.payload = Some(payload.clone());
        log.push(e);
        Ok(Message {
            sender: self.name,
            round,
            payload,
        })
    }

    pub fn receive(&mut self, msg: Message) {
        self.received.push(msg);
    }

    fn known(&self, q: &str) -> Option<&Announcement> {
        let l = Label::from(q);
        self.results.get(&l).or_else(|| {
            self.received
                .iter()
                .flat_map(|m| m.payload.iter())
                .find(|a| a.qubit == l)
        })
    }

    /// Correction from what this party knows; unknown signs are taken as `+`.
    /// Returns the Pauli string and the qubits whose results went into it.
    pub fn correction(&self, table: &CorrectionTable) -> (PauliPair, Vec<Label>) {
        let mut uses = Vec::new();
        let mut bit = |q: &str| match self.known(q) {
            Some(a) => {
                uses.push(Label::from(q));
                outcome_bit(&a.outcome)
            }
            None => 0,
        };
        let key = LeafKey {
            step3: Step3 {
                a1: bit(CH_A1),
                alice_x: Sign::from_bit(bit(IN_A2)),
                b3: bit(CH_B3),
                bob_x: Sign::from_bit(bit(IN_B2)),
            },
            step4: Step4 {
                alice: Sign::from_bit(bit(IN_A1)),
                bob: Sign::from_bit(bit(IN_B1)),
            },
        };
        let rule = table.rule(&key);
        let ops = match self.name {
            Actor::Bob => rule.bob_ops,
            _ => rule.alice_ops,
        };
        (ops, uses)
    }

    fn target(&self) -> [&'static str; 2] {
        match self.name {
            Actor::Bob => BOB_TARGET,
            _ => ALICE_TARGET,
        }
    }

    fn correct(
        &self,
        reg: &mut Register<f64>,
        table: &CorrectionTable,
        log: &mut Transcript,
    ) -> Result<()> {
        let target = self.target();
        let qs = self.ensure_owned(&target)?;
        let (ops, uses) = self.correction(table);
        ops.apply(reg, target)?;
        let mut e = Event::new(5, self.name, EventKind::Correct, qs);
        e.ops = Some(ops.to_string());
        e.uses = Some(uses);
        log.push(e);
        Ok(())
    }
}

/// Result of one sampled run.
#[derive(Clone, Debug, PartialEq)]
pub struct Session {
    pub transcript: Transcript,
    pub leaf: LeafKey,
    /// Fidelity of Bob's (b1,b2) with Alice's input.
    pub fidelity_alice_to_bob: f64,
    /// Fidelity of Alice's (a2,a3) with Bob's input.
    pub fidelity_bob_to_alice: f64,
    /// Branch-averaged fidelity of the same, given the cooperation mode.
    pub expected_alice_to_bob: f64,
    pub expected_bob_to_alice: f64,
}

/// Runs the protocol once with outcomes sampled from `ChaCha8Rng::seed_from_u64(seed)`.
///
/// Six draws are consumed, one per measurement, in the order a1, A2, b3, B2, A1, B1.
pub fn run_session(
    alice: EprInput<f64>,
    bob: EprInput<f64>,
    seed: u64,
    cooperation: Cooperation,
) -> Result<Session> {
    run_session_with(alice, bob, seed, cooperation, CorrectionTable::builtin())
}

pub fn run_session_with(
    alice_in: EprInput<f64>,
    bob_in: EprInput<f64>,
    seed: u64,
    cooperation: Cooperation,
    table: &CorrectionTable,
) -> Result<Session> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = Transcript::new();
    let mut alice = Party::new(Actor::Alice, alice_in);
    let mut bob = Party::new(Actor::Bob, bob_in);

    // Step 1: channel and inputs.
    let mut reg = initial_state(&alice_in, &bob_in)?;
    log.push(Event::new(
        1,
        Actor::Source,
        EventKind::Prepare,
        labels(CHANNEL_ORDER),
    ));
    log.push(Event::new(
        1,
        Actor::Alice,
        EventKind::Prepare,
        alice.ensure_owned(&[IN_A1, IN_A2])?,
    ));
    log.push(Event::new(
        1,
        Actor::Bob,
        EventKind::Prepare,
        bob.ensure_owned(&[IN_B1, IN_B2])?,
    ));

    // Step 2.
    alice.cnot(&mut reg, IN_A1, CH_A1, &mut log)?;
    bob.cnot(&mut reg, IN_B1, CH_B3, &mut log)?;

    // Step 3, then the first exchange (Alice's message first).
    let a1 = alice.measure(&mut reg, CH_A1, Basis::Z, 3, &mut rng, &mut log)?;
    let ax = alice.measure(&mut reg, IN_A2, Basis::X, 3, &mut rng, &mut log)?;
    let b3 = bob.measure(&mut reg, CH_B3, Basis::Z, 3, &mut rng, &mut log)?;
    let bx = bob.measure(&mut reg, IN_B2, Basis::X, 3, &mut rng, &mut log)?;
    let from_alice = alice.announce(1, &[CH_A1, IN_A2], 3, &mut log)?;
    let from_bob = bob.announce(1, &[CH_B3, IN_B2], 3, &mut log)?;
    bob.receive(from_alice);
    alice.receive(from_bob);

    // Step 4, then the second exchange.
    let ax1 = alice.measure(&mut reg, IN_A1, Basis::X, 4, &mut rng, &mut log)?;
    let bx1 = bob.measure(&mut reg, IN_B1, Basis::X, 4, &mut rng, &mut log)?;
    if cooperation != Cooperation::AliceWithholdsA1 {
        let m = alice.announce(2, &[IN_A1], 4, &mut log)?;
        bob.receive(m);
    }
    if cooperation != Cooperation::BobWithholdsB1 {
        let m = bob.announce(2, &[IN_B1], 4, &mut log)?;
        alice.receive(m);
    }

    // Corrections.
    bob.correct(&mut reg, table, &mut log)?;
    alice.correct(&mut reg, table, &mut log)?;

    let to_bob = reg.fidelity_on(&alice_in.register(BOB_TARGET)?)?;
    let to_alice = reg.fidelity_on(&bob_in.register(ALICE_TARGET)?)?;
    let (exp_bob, exp_alice) = match cooperation.withheld() {
        None => (1.0, 1.0),
        Some(w @ Withheld::AliceA1) => (noncooperation_fidelity_with(&alice_in, w, table)?, 1.0),
        Some(w @ Withheld::BobB1) => (1.0, noncooperation_fidelity_with(&bob_in, w, table)?),
    };
    for (actor, qs, value, expected) in [
        (Actor::Bob, BOB_TARGET, to_bob, exp_bob),
        (Actor::Alice, ALICE_TARGET, to_alice, exp_alice),
    ] {
        let mut e = Event::new(6, actor, EventKind::Fidelity, labels(qs));
        e.value = Some(value);
        e.expected = Some(expected);
        log.push(e);
    }

    Ok(Session {
        transcript: log,
        leaf: LeafKey {
            step3: Step3 {
                a1,
                alice_x: Sign::from_bit(ax),
                b3,
                bob_x: Sign::from_bit(bx),
            },
            step4: Step4 {
                alice: Sign::from_bit(ax1),
                bob: Sign::from_bit(bx1),
            },
        },
        fidelity_alice_to_bob: to_bob,
        fidelity_bob_to_alice: to_alice,
        expected_alice_to_bob: exp_bob,
        expected_bob_to_alice: exp_alice,
    })
}

/// Recomputes a party's correction from the transcript alone: its own
/// measurement events plus the peer's announcements.
pub fn replay_correction(
    transcript: &Transcript,
    actor: Actor,
    table: &CorrectionTable,
) -> PauliPair {
    let mut party = Party::new(actor, EprInput::from_angles(0.0, 0.0));
    for e in &transcript.events {
        match e.kind {
            EventKind::Measure if e.actor == actor => {
                if let (Some(q), Some(basis), Some(outcome)) =
                    (e.qubits.first(), e.basis, &e.outcome)
                {
                    party.results.insert(
                        q.clone(),
                        Announcement {
                            qubit: q.clone(),
                            basis,
                            outcome: outcome.clone(),
                        },
                    );
                }
            }
            EventKind::Announce if Some(e.actor) == actor.peer() => party.receive(Message {
                sender: e.actor,
                round: e.message_round.unwrap_or(0),
                payload: e.payload.clone().unwrap_or_default(),
            }),
            _ => {}
        }
    }
    party.correction(table).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bqt::CH_A2;
    use crate::parties::ownership_check;

    fn inputs() -> (EprInput<f64>, EprInput<f64>) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        (
            EprInput::real(0.6, 0.8).unwrap(),
            EprInput::real(h, h).unwrap(),
        )
    }

    #[test]
    fn full_cooperation_reconstructs_both_ways() {
        let (a, b) = inputs();
        for seed in 0..32 {
            let s = run_session(a, b, seed, Cooperation::Full).unwrap();
            assert!(s.fidelity_alice_to_bob >= 1.0 - 1e-10, "seed {seed}");
            assert!(s.fidelity_bob_to_alice >= 1.0 - 1e-10, "seed {seed}");
            assert_eq!(s.transcript.count(EventKind::Cnot), 2);
            assert_eq!(s.transcript.count(EventKind::Measure), 6);
            assert_eq!(s.transcript.count(EventKind::Announce), 4);
            assert!(ownership_check(&s.transcript));
            assert!(s.transcript.respects_protocol_order());
        }
    }

    #[test]
    fn withholding_reports_expected_fidelity() {
        let (a, b) = inputs();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = run_session(
            EprInput::real(h, h).unwrap(),
            b,
            3,
            Cooperation::AliceWithholdsA1,
        )
        .unwrap();
        assert!((s.expected_alice_to_bob - 0.5).abs() < 1e-12);
        assert!(s.fidelity_bob_to_alice >= 1.0 - 1e-10);
        assert_eq!(s.transcript.count(EventKind::Announce), 3);
        assert!(ownership_check(&s.transcript));
        let s = run_session(
            a,
            EprInput::real(0.6, 0.8).unwrap(),
            3,
            Cooperation::BobWithholdsB1,
        )
        .unwrap();
        assert!((s.expected_bob_to_alice - 0.5392).abs() < 1e-12);
    }

    #[test]
    fn identical_seeds_identical_transcripts() {
        let (a, b) = inputs();
        let x = run_session(a, b, 42, Cooperation::Full).unwrap();
        let y = run_session(a, b, 42, Cooperation::Full).unwrap();
        assert_eq!(x.transcript.to_json(), y.transcript.to_json());
    }

    #[test]
    fn cooperation_parsing() {
        for c in [
            Cooperation::Full,
            Cooperation::AliceWithholdsA1,
            Cooperation::BobWithholdsB1,
        ] {
            assert_eq!(c.as_str().parse::<Cooperation>().unwrap(), c);
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{c}\""));
        }
        assert!("none".parse::<Cooperation>().is_err());
    }

    #[test]
    fn party_refuses_foreign_qubit() {
        let (a, b) = inputs();
        let mut bob = Party::new(Actor::Bob, b);
        let mut reg = initial_state(&a, &b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut log = Transcript::new();
        let err = bob
            .measure(&mut reg, CH_A2, Basis::Z, 3, &mut rng, &mut log)
            .unwrap_err();
        assert!(matches!(err, Error::Ownership(_)));
        assert!(log.events.is_empty());
    }
}
