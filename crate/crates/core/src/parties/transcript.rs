use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bqt::{ALICE_QUBITS, BOB_QUBITS, CHANNEL_ORDER};
use crate::qsim::{Basis, Label};

/// Schema tag embedded in every serialized transcript.
pub const TRANSCRIPT_SCHEMA: &str = "bqt.transcript/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actor {
    /// Distributes the channel before the parties act.
    Source,
    Alice,
    Bob,
}

impl Actor {
    /// Qubits the actor may touch.
    pub fn owned(self) -> BTreeSet<Label> {
        let names: &[&str] = match self {
            Actor::Source => &CHANNEL_ORDER,
            Actor::Alice => &ALICE_QUBITS,
            Actor::Bob => &BOB_QUBITS,
        };
        names.iter().map(|n| Label::from(*n)).collect()
    }

    pub fn peer(self) -> Option<Actor> {
        match self {
            Actor::Alice => Some(Actor::Bob),
            Actor::Bob => Some(Actor::Alice),
            Actor::Source => None,
        }
    }
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Actor::Source => "source",
            Actor::Alice => "alice",
            Actor::Bob => "bob",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Prepare,
    Cnot,
    Measure,
    Announce,
    Correct,
    Fidelity,
}

/// One announced measurement result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Announcement {
    pub qubit: Label,
    pub basis: Basis,
    /// `0`/`1` for Z, `+`/`-` for X.
    pub outcome: String,
}

/// A classical message between the parties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub sender: Actor,
    pub round: u32,
    pub payload: Vec<Announcement>,
}

/// A transcript entry. The first eight fields are always serialized (as
/// `null` when not applicable); the rest only when present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub step: u8,
    pub actor: Actor,
    pub kind: EventKind,
    pub qubits: Vec<Label>,
    pub basis: Option<Basis>,
    pub outcome: Option<String>,
    pub probability: Option<f64>,
    pub message_round: Option<u32>,
    /// Announced results, for `announce` events.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<Vec<Announcement>>,
    /// Pauli string applied, for `correct` events.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ops: Option<String>,
    /// Qubits whose results the correction was computed from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uses: Option<Vec<Label>>,
    /// Realized fidelity, for `fidelity` events.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Expected fidelity over all branches, for `fidelity` events.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
}

impl Event {
    pub fn new(step: u8, actor: Actor, kind: EventKind, qubits: Vec<Label>) -> Self {
        Event {
            step,
            actor,
            kind,
            qubits,
            basis: None,
            outcome: None,
            probability: None,
            message_round: None,
            payload: None,
            ops: None,
            uses: None,
            value: None,
            expected: None,
        }
    }
}

/// Ordered record of everything that happened in one session.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub schema: String,
    pub events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript {
            schema: TRANSCRIPT_SCHEMA.to_owned(),
            events: Vec::new(),
        }
    }

    pub fn push(&mut self, e: Event) {
        self.events.push(e);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    /// Messages in the order they were sent.
    pub fn messages(&self) -> Vec<Message> {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::Announce)
            .map(|e| Message {
                sender: e.actor,
                round: e.message_round.unwrap_or(0),
                payload: e.payload.clone().unwrap_or_default(),
            })
            .collect()
    }

    /// Steps never go backwards, and within the two measurement steps every
    /// measurement precedes every announcement.
    pub fn respects_protocol_order(&self) -> bool {
        let phase = |e: &Event| -> (u8, u8) {
            let sub = match e.kind {
                EventKind::Announce => 1,
                _ => 0,
            };
            (e.step, sub)
        };
        self.events.windows(2).all(|w| phase(&w[0]) <= phase(&w[1]))
    }
}

/// True iff no party touches a qubit it does not own, every announcement
/// reports the sender's own earlier measurements with per-sender rounds
/// strictly increasing, and every correction is computed only from the
/// actor's own results plus results announced to it beforehand.
pub fn ownership_check(transcript: &Transcript) -> bool {
    let mut measured: BTreeMap<Actor, BTreeSet<Label>> = BTreeMap::new();
    let mut learned: BTreeMap<Actor, BTreeSet<Label>> = BTreeMap::new();
    let mut last_round: BTreeMap<Actor, u32> = BTreeMap::new();
    for e in &transcript.events {
        let owned = e.actor.owned();
        if !e.qubits.iter().all(|q| owned.contains(q)) {
            return false;
        }
        match e.kind {
            EventKind::Prepare => {}
            EventKind::Cnot | EventKind::Measure | EventKind::Correct | EventKind::Fidelity
                if e.actor == Actor::Source =>
            {
                return false;
            }
            EventKind::Measure => {
                measured
                    .entry(e.actor)
                    .or_default()
                    .extend(e.qubits.iter().cloned());
            }
            EventKind::Announce => {
                let Some(peer) = e.actor.peer() else {
                    return false;
                };
                let Some(round) = e.message_round else {
                    return false;
                };
                if last_round.get(&e.actor).is_some_and(|&r| round <= r) {
                    return false;
                }
                last_round.insert(e.actor, round);
                let own = measured.get(&e.actor);
                for a in e.payload.iter().flatten() {
                    if !owned.contains(&a.qubit) || !own.is_some_and(|m| m.contains(&a.qubit)) {
                        return false;
                    }
                    learned.entry(peer).or_default().insert(a.qubit.clone());
                }
            }
            EventKind::Correct => {
                let own = measured.get(&e.actor);
                let heard = learned.get(&e.actor);
                for q in e.uses.iter().flatten() {
                    let known =
                        own.is_some_and(|m| m.contains(q)) || heard.is_some_and(|h| h.contains(q));
                    if !known {
                        return false;
                    }
                }
            }
            EventKind::Cnot | EventKind::Fidelity => {}
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn event_serializes_required_fields_as_null() {
        let e = Event::new(
            2,
            Actor::Alice,
            EventKind::Cnot,
            crate::qsim::labels(["A1", "a1"]),
        );
        let v: serde_json::Value = serde_json::to_value(&e).unwrap();
        for k in [
            "step",
            "actor",
            "kind",
            "qubits",
            "basis",
            "outcome",
            "probability",
            "message_round",
        ] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert!(v.get("ops").is_none());
        assert_eq!(v["actor"], "alice");
        assert_eq!(v["kind"], "cnot");
    }

    #[test]
    fn source_may_only_prepare() {
        let mut t = Transcript::new();
        t.push(Event::new(
            1,
            Actor::Source,
            EventKind::Prepare,
            crate::qsim::labels(CHANNEL_ORDER),
        ));
        assert!(ownership_check(&t));
        t.push(Event::new(
            3,
            Actor::Source,
            EventKind::Measure,
            crate::qsim::labels(["a1"]),
        ));
        assert!(!ownership_check(&t));
    }
}
