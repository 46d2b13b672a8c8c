use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entities::{AdversaryAction, Annotation, Message, MessageKind, PASSWORD_WIDTH};
use crate::error::{Error, Result};
use crate::primitives::{ByteString, Rng};
use crate::protocol::{access_query, registration_digest, RegistrationDigest};

/// Behaviour attached to one principal's session.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AdversaryClass {
    #[default]
    None,
    WrongPassword,
    ForgedPrivateKey,
    TamperValidation,
    TamperCiphertext,
    ReplayQuery,
}

impl AdversaryClass {
    pub const ALL: [AdversaryClass; 6] = [
        AdversaryClass::None,
        AdversaryClass::WrongPassword,
        AdversaryClass::ForgedPrivateKey,
        AdversaryClass::TamperValidation,
        AdversaryClass::TamperCiphertext,
        AdversaryClass::ReplayQuery,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AdversaryClass::None => "NONE",
            AdversaryClass::WrongPassword => "WRONG_PASSWORD",
            AdversaryClass::ForgedPrivateKey => "FORGED_PRIVATE_KEY",
            AdversaryClass::TamperValidation => "TAMPER_VALIDATION",
            AdversaryClass::TamperCiphertext => "TAMPER_CIPHERTEXT",
            AdversaryClass::ReplayQuery => "REPLAY_QUERY",
        }
    }

    /// Public message kind this class intercepts. Replay injects rather than
    /// intercepts, and `None` touches nothing.
    pub fn target(self) -> Option<MessageKind> {
        match self {
            AdversaryClass::WrongPassword => Some(MessageKind::Registration),
            AdversaryClass::ForgedPrivateKey => Some(MessageKind::AccessQuery),
            AdversaryClass::TamperValidation => Some(MessageKind::Validation),
            AdversaryClass::TamperCiphertext => Some(MessageKind::Ciphertext),
            AdversaryClass::None | AdversaryClass::ReplayQuery => None,
        }
    }

    pub fn is_genuine(self) -> bool {
        self == AdversaryClass::None
    }
}

impl fmt::Display for AdversaryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdversaryClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_uppercase().replace('-', "_");
        AdversaryClass::ALL
            .into_iter()
            .find(|c| c.as_str() == wanted)
            .ok_or_else(|| Error::Config(format!("unknown adversary class {s:?}")))
    }
}

/// What the adversary has learnt so far: every public message it has seen,
/// plus the security parameter `s` (an insider that knows `s` but not the
/// victim's password).
#[derive(Debug, Clone, Default)]
pub struct Knowledge {
    pub insider_s: Option<ByteString>,
    pub width: usize,
    pub observed: Vec<Message>,
}

impl Knowledge {
    fn observed_digest(&self, user_id: &ByteString) -> Option<RegistrationDigest> {
        self.observed
            .iter()
            .rev()
            .filter(|m| m.kind == MessageKind::Registration)
            .filter(|m| m.field("U_ID") == Some(user_id))
            .find_map(|m| m.field("M_tilde").cloned().map(RegistrationDigest))
    }

    /// Genuine access queries seen on the wire, in observation order.
    pub fn replayable_queries(&self) -> impl Iterator<Item = &Message> {
        self.observed
            .iter()
            .filter(|m| m.kind == MessageKind::AccessQuery && m.annotation.is_none())
    }
}

fn flip_distinct(targets: &mut [&mut ByteString], count: usize, rng: &mut Rng) {
    let total: usize = targets.iter().map(|t| t.width()).sum();
    let mut chosen: Vec<usize> = Vec::with_capacity(count);
    while chosen.len() < count.min(total) {
        let i = rng.below(total);
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    for mut i in chosen {
        for t in targets.iter_mut() {
            if i < t.width() {
                t.flip_byte(i);
                break;
            }
            i -= t.width();
        }
    }
}

/// Altered copy of `message` for `class`, or `None` when the class leaves
/// it alone. Only public messages are ever altered.
///
/// * `WRONG_PASSWORD` replaces `M~` with the digest of a guessed password.
/// * `FORGED_PRIVATE_KEY` recomputes `q` from the observed `M~` and a random
///   `U_pk`.
/// * `TAMPER_VALIDATION` flips bytes of `v1 || v2`.
/// * `TAMPER_CIPHERTEXT` flips bytes of `D^C` inside the framed `D^E`
///   region, so every flip corrupts the recovered payload.
pub fn apply_adversary(
    class: AdversaryClass,
    message: &Message,
    knowledge: &Knowledge,
    rng: &mut Rng,
    tamper_bytes: usize,
) -> Result<Option<Message>> {
    if message.channel != super::Channel::Public || class.target() != Some(message.kind) {
        return Ok(None);
    }
    let width = knowledge.width;
    let mut copy = message.clone();
    copy.annotation = None;
    match class {
        AdversaryClass::WrongPassword => {
            let s = knowledge
                .insider_s
                .as_ref()
                .ok_or_else(|| Error::Config("adversary lacks the security parameter".into()))?;
            let user_id = message.require("U_ID")?.clone();
            let guess = rng.random_bytes(PASSWORD_WIDTH);
            let forged = registration_digest(&user_id, &guess, s, width)?;
            *copy.field_mut("M_tilde").expect("registration carries M_tilde") = forged.0;
        }
        AdversaryClass::ForgedPrivateKey => {
            let user_id = message.require("U_ID")?.clone();
            let forged_key = rng.random_bytes(width);
            let q = match knowledge.observed_digest(&user_id) {
                Some(digest) => access_query(&digest, &user_id, &forged_key, width)?.0,
                None => rng.random_bytes(width),
            };
            *copy.field_mut("q").expect("query carries q") = q;
        }
        AdversaryClass::TamperValidation => {
            let mut v1 = message.require("v1")?.clone();
            let mut v2 = message.require("v2")?.clone();
            flip_distinct(&mut [&mut v1, &mut v2], tamper_bytes, rng);
            *copy.field_mut("v1").expect("present") = v1;
            *copy.field_mut("v2").expect("present") = v2;
        }
        AdversaryClass::TamperCiphertext => {
            let wrapped = copy.field_mut("D_C").expect("ciphertext carries D_C");
            // D^C = E(len || D^E || len || O_pk) with |O_pk| = L
            let region = wrapped.width().saturating_sub(width + 4).max(1).min(wrapped.width());
            let mut head = ByteString::from(&wrapped[..region]);
            flip_distinct(&mut [&mut head], tamper_bytes, rng);
            let mut bytes = head.into_vec();
            bytes.extend_from_slice(&wrapped[region..]);
            *wrapped = ByteString::new(bytes);
        }
        AdversaryClass::None | AdversaryClass::ReplayQuery => return Ok(None),
    }
    Ok(Some(copy))
}

/// Re-injection of a previously observed query, annotated with the step it
/// was copied from.
pub fn replay_of(original: &Message, session: usize) -> Message {
    let mut copy = original.clone();
    copy.annotation = Some(Annotation {
        class: AdversaryClass::ReplayQuery,
        action: AdversaryAction::Replayed,
        source_step: Some(original.step),
    });
    copy.session = Some(session);
    copy
}
