use ghz_bqt::bqt::{CorrectionTable, EprInput, LeafKey};
use ghz_bqt::parties::{
    ownership_check, replay_correction, run_session, trial_seed, Actor, Announcement, Cooperation,
    Event, EventKind, Transcript,
};
use ghz_bqt::qsim::{labels, Basis, Label};

fn inputs() -> (EprInput<f64>, EprInput<f64>) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (
        EprInput::real(0.6, 0.8).unwrap(),
        EprInput::real(h, h).unwrap(),
    )
}

fn measure(step: u8, actor: Actor, q: &str, basis: Basis, outcome: &str) -> Event {
    let mut e = Event::new(step, actor, EventKind::Measure, labels([q]));
    e.basis = Some(basis);
    e.outcome = Some(outcome.to_owned());
    e.probability = Some(0.5);
    e
}

#[test]
fn session_transcripts_pass_ownership() {
    let (a, b) = inputs();
    for coop in [
        Cooperation::Full,
        Cooperation::AliceWithholdsA1,
        Cooperation::BobWithholdsB1,
    ] {
        for seed in 0..16 {
            let s = run_session(a, b, seed, coop).unwrap();
            assert!(ownership_check(&s.transcript));
            assert!(s.transcript.respects_protocol_order());
            assert_eq!(s.transcript.count(EventKind::Cnot), 2);
            assert_eq!(s.transcript.count(EventKind::Measure), 6);
            for actor in [Actor::Alice, Actor::Bob] {
                let sent = s
                    .transcript
                    .messages()
                    .iter()
                    .filter(|m| m.sender == actor)
                    .count();
                assert!(sent <= 2);
            }
        }
    }
}

#[test]
fn bob_measuring_a2_is_rejected() {
    let mut t = Transcript::new();
    t.push(measure(3, Actor::Bob, "a2", Basis::Z, "0"));
    assert!(!ownership_check(&t));
}

#[test]
fn correction_without_a1_message_is_rejected() {
    let (a, b) = inputs();
    let s = run_session(a, b, 5, Cooperation::AliceWithholdsA1).unwrap();
    assert!(ownership_check(&s.transcript));
    let mut forged = s.transcript.clone();
    for e in &mut forged.events {
        if e.kind == EventKind::Correct && e.actor == Actor::Bob {
            e.uses.as_mut().unwrap().push(Label::from("A1"));
        }
    }
    assert!(!ownership_check(&forged));
}

#[test]
fn announcing_foreign_or_unmeasured_qubits_is_rejected() {
    let mut t = Transcript::new();
    t.push(measure(3, Actor::Alice, "a1", Basis::Z, "1"));
    let mut e = Event::new(3, Actor::Alice, EventKind::Announce, labels(["A2"]));
    e.message_round = Some(1);
    e.payload = Some(vec![Announcement {
        qubit: "A2".into(),
        basis: Basis::X,
        outcome: "+".into(),
    }]);
    t.push(e);
    assert!(!ownership_check(&t));
}

#[test]
fn repeated_round_is_rejected() {
    let mut t = Transcript::new();
    t.push(measure(3, Actor::Alice, "a1", Basis::Z, "1"));
    for _ in 0..2 {
        let mut e = Event::new(3, Actor::Alice, EventKind::Announce, labels(["a1"]));
        e.message_round = Some(1);
        e.payload = Some(vec![Announcement {
            qubit: "a1".into(),
            basis: Basis::Z,
            outcome: "1".into(),
        }]);
        t.push(e);
    }
    assert!(!ownership_check(&t));
}

#[test]
fn corrections_replay_from_messages() {
    let (a, b) = inputs();
    let table = CorrectionTable::builtin();
    for seed in 0..64 {
        let s = run_session(a, b, seed, Cooperation::Full).unwrap();
        for actor in [Actor::Alice, Actor::Bob] {
            let logged = s
                .transcript
                .events
                .iter()
                .find(|e| e.kind == EventKind::Correct && e.actor == actor)
                .and_then(|e| e.ops.clone())
                .unwrap();
            assert_eq!(
                replay_correction(&s.transcript, actor, table).to_string(),
                logged
            );
        }
    }
}

#[test]
fn transcript_json_round_trip() {
    let (a, b) = inputs();
    let s = run_session(a, b, 11, Cooperation::Full).unwrap();
    let json = s.transcript.to_json();
    assert_eq!(Transcript::from_json(&json).unwrap(), s.transcript);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["schema"], "bqt.transcript/1");
    for e in v["events"].as_array().unwrap() {
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
            assert!(e.get(k).is_some());
        }
    }
}

#[test]
fn sampled_leaves_are_uniform() {
    let (a, b) = inputs();
    let n = 4096;
    let mut counts = [0usize; LeafKey::COUNT];
    for i in 0..n {
        counts[run_session(a, b, trial_seed(1, i), Cooperation::Full)
            .unwrap()
            .leaf
            .index()] += 1;
    }
    let p = 1.0 / 64.0;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    for c in counts {
        assert!((c as f64 / n as f64 - p).abs() <= 4.0 * sigma);
    }
}

#[test]
fn withholding_expected_fidelity() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bal = EprInput::real(h, h).unwrap();
    let s = run_session(bal, bal, 2, Cooperation::AliceWithholdsA1).unwrap();
    assert!((s.expected_alice_to_bob - 0.5).abs() < 1e-12);
    assert!((s.expected_bob_to_alice - 1.0).abs() < 1e-12);
    assert!(s.fidelity_bob_to_alice >= 1.0 - 1e-10);
}
