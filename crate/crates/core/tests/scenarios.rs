use std::collections::BTreeSet;

use acshare_core::bench::{expected_memory, measure_memory, recount_rate, genuine_detection_rate};
use acshare_core::entities::{AdversaryAction, PrincipalOutcome};
use acshare_core::primitives::mod_reduce;
use acshare_core::protocol::{derive_data_key, unwrap_ciphertext};
use acshare_core::{
    execute, run_scenario, AdversaryClass, AgentPhase, ByteString, Channel, Credentials, Error,
    KeyLength, MessageKind, Outcome, Phase, Role, ScenarioConfig, Simulation, Transcript,
};

fn payloads() -> Vec<ByteString> {
    (0..7)
        .map(|i| ByteString::from(format!("record number {i} with some body").as_str()))
        .collect()
}

fn mixed(seed: u64) -> ScenarioConfig {
    ScenarioConfig::honest(6, KeyLength::Bits128, seed)
        .with_adversary(AdversaryClass::WrongPassword, 3)
        .with_adversary(AdversaryClass::ForgedPrivateKey, 3)
        .with_adversary(AdversaryClass::TamperValidation, 3)
        .with_adversary(AdversaryClass::TamperCiphertext, 3)
        .with_adversary(AdversaryClass::ReplayQuery, 2)
}

fn outcome_of(t: &Transcript, class: AdversaryClass) -> Vec<&PrincipalOutcome> {
    t.outcomes.iter().filter(|o| o.class == class).collect()
}

#[test]
fn ten_honest_users_all_accepted() {
    let (t, summary) = run_scenario(&ScenarioConfig::honest(10, KeyLength::Bits256, 1), &payloads()).unwrap();
    assert_eq!(summary.genuine().accepted, 10);
    assert_eq!(summary.to_string(), "NONE: ACCEPTED 10/10 REJECTED 0/10 INTEGRITY_FAILURE 0/10\n");
    assert!(t.outcomes.iter().all(|o| o.furthest == AgentPhase::Complete));
}

#[test]
fn honest_users_recover_exact_payloads() {
    let p = payloads();
    let run = execute(&ScenarioConfig::honest(9, KeyLength::Bits512, 4), &p).unwrap();
    for (i, user) in run.users.iter().enumerate() {
        assert_eq!(user.as_ref().unwrap().recovered().unwrap(), &p[i % p.len()]);
    }
}

#[test]
fn wrong_password_is_rejected_at_setup() {
    let config = ScenarioConfig::honest(10, KeyLength::Bits64, 2)
        .with_adversary(AdversaryClass::WrongPassword, 5);
    let (_, summary) = run_scenario(&config, &payloads()).unwrap();
    assert_eq!(summary.genuine().accepted, 10);
    let wp = summary.get(AdversaryClass::WrongPassword);
    assert_eq!((wp.total, wp.rejected), (5, 5));
}

#[test]
fn outcomes_partition_by_class() {
    let (t, summary) = run_scenario(&mixed(3), &payloads()).unwrap();
    for (class, counts) in &summary.classes {
        assert_eq!(counts.accepted + counts.rejected + counts.integrity_failure, counts.total, "{class}");
    }
    let expect = |class, phase| {
        for o in outcome_of(&t, class) {
            match &o.outcome {
                Outcome::Rejected { phase: p, .. } => assert_eq!(*p, phase, "{class}"),
                other => panic!("{class}: {other}"),
            }
        }
    };
    expect(AdversaryClass::WrongPassword, Phase::Setup);
    expect(AdversaryClass::ForgedPrivateKey, Phase::AccessControl);
    expect(AdversaryClass::TamperValidation, Phase::Validation);
    expect(AdversaryClass::ReplayQuery, Phase::Validation);
    for o in outcome_of(&t, AdversaryClass::TamperCiphertext) {
        assert_eq!(o.outcome, Outcome::IntegrityFailure);
    }
    assert_eq!(summary.genuine().accepted, 6);
}

#[test]
fn steps_are_strictly_increasing_and_phases_never_go_back() {
    let t = execute(&mixed(5), &payloads()).unwrap().transcript;
    for pair in t.messages.windows(2) {
        assert!(pair[0].step < pair[1].step);
        assert!(pair[0].phase <= pair[1].phase, "{} after {}", pair[1].phase, pair[0].phase);
    }
    assert_eq!(t.phases_seen(), Phase::ALL.to_vec());
}

#[test]
fn adversary_never_touches_private_messages() {
    let t = execute(&mixed(6), &payloads()).unwrap().transcript;
    let annotated: Vec<_> = t.messages.iter().filter(|m| m.annotation.is_some()).collect();
    assert!(!annotated.is_empty());
    assert!(annotated.iter().all(|m| m.channel == Channel::Public));
}

#[test]
fn stored_values_equal_transmitted_values() {
    let run = execute(&ScenarioConfig::honest(4, KeyLength::Bits128, 7), &payloads()).unwrap();
    let store = run.cloud.store();
    for m in &run.transcript.messages {
        if m.to != Role::Cloud {
            continue;
        }
        let id = m.field("U_ID");
        match m.kind {
            MessageKind::Credentials => {
                let c = store.principals[id.unwrap()].credentials.as_ref().unwrap();
                assert_eq!(&c.password, m.field("U_ps").unwrap());
            }
            MessageKind::PrivateKey => {
                let p = &store.principals[id.unwrap()];
                assert_eq!(p.private_key.as_ref(), m.field("U_pk"));
                assert_eq!(p.attribute.as_ref(), m.field("a"));
            }
            MessageKind::SessionKey => {
                assert_eq!(store.principals[id.unwrap()].session_key.as_ref(), m.field("U_sk"));
            }
            MessageKind::CiphertextUpload => {
                let c = &store.ciphertexts[id.unwrap()];
                assert_eq!(Some(&c.wrapped), m.field("D_C"));
                assert_eq!(Some(&c.payload_digest), m.field("digest"));
            }
            MessageKind::Params => {
                let (s, mm) = store.params.as_ref().unwrap();
                assert_eq!(Some(s), m.field("s"));
                assert_eq!(Some(mm), m.field("m"));
            }
            _ => {}
        }
    }
    // user and cloud hold the same U_pk
    for user in run.users.iter().flatten() {
        let stored = &store.principals[user.id()];
        assert_eq!(stored.private_key.as_ref(), Some(&user.keys().unwrap().private_key));
    }
}

#[test]
fn rejections_are_recheckable_from_the_transcript() {
    let t = execute(&mixed(8), &payloads()).unwrap().transcript;
    let pairs = [
        (MessageKind::RegistrationRejected, "M", "M_tilde"),
        (MessageKind::AccessRejected, "q_tilde", "q"),
        (MessageKind::ValidationRejected, "v1_tilde", "v1"),
    ];
    let mut seen = 0;
    for m in &t.messages {
        for (kind, ours, theirs) in pairs {
            if m.kind == kind {
                seen += 1;
                let differs = m.field(ours) != m.field(theirs)
                    || (kind == MessageKind::ValidationRejected && m.field("v2_tilde") != m.field("v2"));
                assert!(differs, "{kind} without a mismatching pair");
            }
        }
    }
    assert_eq!(seen, 9);
}

#[test]
fn replayed_query_is_accepted_and_annotated() {
    let config = ScenarioConfig::honest(3, KeyLength::Bits64, 9).with_adversary(AdversaryClass::ReplayQuery, 2);
    let t = execute(&config, &payloads()).unwrap().transcript;
    let replays: Vec<_> = t
        .messages
        .iter()
        .filter(|m| m.annotation.as_ref().is_some_and(|a| a.action == AdversaryAction::Replayed))
        .collect();
    assert_eq!(replays.len(), 2);
    for r in &replays {
        let src = r.annotation.as_ref().unwrap().source_step.unwrap();
        let original = t.messages.iter().find(|m| m.step == src).unwrap();
        assert_eq!(original.kind, MessageKind::AccessQuery);
        assert_eq!(original.fields, r.fields);
        let reply = t.messages.iter().find(|m| m.step == r.step + 1).unwrap();
        assert_eq!(reply.kind, MessageKind::AccessAccepted);
    }
    for o in outcome_of(&t, AdversaryClass::ReplayQuery) {
        assert_eq!(o.furthest, AgentPhase::AccessGranted);
    }
    // the eavesdropped users still complete
    assert!(outcome_of(&t, AdversaryClass::None).iter().all(|o| o.outcome == Outcome::Accepted));
}

#[test]
fn replay_needs_a_genuine_user() {
    let config = ScenarioConfig::honest(0, KeyLength::Bits64, 0).with_adversary(AdversaryClass::ReplayQuery, 1);
    assert!(matches!(execute(&config, &payloads()), Err(Error::Config(_))));
}

#[test]
fn stale_session_key_fails_validation() {
    let mut config = ScenarioConfig::honest(10, KeyLength::Bits256, 11);
    config.stale_session_keys = 1;
    let (t, summary) = run_scenario(&config, &payloads()).unwrap();
    assert_eq!(genuine_detection_rate(&summary).unwrap(), 0.9);
    assert_eq!(recount_rate(&t).unwrap(), 0.9);
    assert!(matches!(
        &t.outcomes[0].outcome,
        Outcome::Rejected { phase: Phase::Validation, .. }
    ));
}

#[test]
fn ciphertext_tampered_at_rest_is_detected() {
    let mut sim = Simulation::new(KeyLength::Bits128, 12);
    let p = sim.add_user(Credentials::new("alice", "secret").unwrap(), AdversaryClass::None);
    sim.setup_phase(p).unwrap();
    sim.keygen_phase(p).unwrap();
    sim.encryption_phase(p, b"clinical record").unwrap();
    sim.access_control_phase(p).unwrap();
    sim.validation_phase(p).unwrap();
    let stored = sim
        .cloud_mut()
        .store_mut()
        .ciphertexts
        .get_mut(&ByteString::from("alice"))
        .unwrap();
    stored.wrapped.flip_byte(6);
    assert_eq!(sim.data_sharing_phase(p).unwrap(), None);
    let run = sim.finish();
    assert_eq!(run.transcript.outcomes[0].outcome, Outcome::IntegrityFailure);
    assert_eq!(run.transcript.messages.last().unwrap().kind, MessageKind::IntegrityFailure);
}

#[test]
fn every_tamper_offset_in_the_payload_region_is_caught() {
    // exhaustive over one ciphertext: each byte of len || D^E flipped in turn
    let run = execute(&ScenarioConfig::honest(1, KeyLength::Bits64, 13), &payloads()).unwrap();
    let (s, m) = run.cloud.store().params.clone().unwrap();
    let key = derive_data_key(&m, &s);
    let stored = run.cloud.store().ciphertexts.values().next().unwrap().clone();
    let region = stored.wrapped.width() - 8 - 4;
    for i in 0..region {
        let mut w = stored.wrapped.clone();
        w.flip_byte(i);
        let recovered = unwrap_ciphertext(&w, &key)
            .and_then(|(e, _)| acshare_core::protocol::decrypt_data(&e, &s, &m));
        if let Ok(d) = recovered {
            assert_ne!(acshare_core::primitives::hash(&d), stored.payload_digest, "offset {i}");
        }
    }
}

#[test]
fn private_key_collisions_only_when_unreduced() {
    // U_pk = m mod (..) leaves m untouched whenever the modulus exceeds m, so
    // equal keys can only be copies of m itself
    let mut unreduced = 0;
    let mut total = 0;
    for seed in 0..20 {
        let run = execute(&ScenarioConfig::honest(8, KeyLength::Bits64, seed), &payloads()).unwrap();
        let m = run.kgc.params().m.clone();
        let public: BTreeSet<_> = run.kgc.registry().values().map(|k| k.public_key.clone()).collect();
        assert_eq!(public.len(), 9);
        let keys: Vec<_> = run
            .users
            .iter()
            .flatten()
            .map(|u| u.keys().unwrap().private_key.clone())
            .collect();
        for (i, a) in keys.iter().enumerate() {
            total += 1;
            if *a == m {
                unreduced += 1;
            }
            for b in &keys[i + 1..] {
                if a == b {
                    assert_eq!(a, &m, "seed {seed}");
                }
            }
        }
    }
    assert!(unreduced > 0 && unreduced < total, "{unreduced}/{total}");
}

#[test]
fn same_seed_same_transcript() {
    let a = execute(&mixed(21), &payloads()).unwrap().transcript;
    let b = execute(&mixed(21), &payloads()).unwrap().transcript;
    assert_eq!(a.to_json_lines(), b.to_json_lines());
    assert_eq!(a.digest(), b.digest());
    let c = execute(&mixed(22), &payloads()).unwrap().transcript;
    assert_ne!(a.digest(), c.digest());
}

#[test]
fn memory_closed_form_on_mixed_populations() {
    for seed in 0..6 {
        for k in KeyLength::ALL {
            let mut config = mixed(seed);
            config.key_length_bits = k;
            let run = execute(&config, &payloads()).unwrap();
            assert_eq!(measure_memory(&run), expected_memory(&config, &payloads()));
        }
    }
}

#[test]
fn validation_uses_nonce_as_modulus() {
    // v1 always lies below the effective nonce modulus
    let run = execute(&ScenarioConfig::honest(3, KeyLength::Bits64, 30), &payloads()).unwrap();
    let t = &run.transcript;
    for v in t.messages.iter().filter(|m| m.kind == MessageKind::Validation) {
        let nonce = t
            .messages
            .iter()
            .find(|m| m.kind == MessageKind::ValidationNonce && m.field("U_ID") == v.field("U_ID"))
            .unwrap()
            .field("r")
            .unwrap();
        let v1 = v.field("v1").unwrap();
        assert_eq!(&mod_reduce(v1, nonce).unwrap(), v1);
    }
}
