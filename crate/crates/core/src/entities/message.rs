use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::netsim::{AdversaryClass, Channel};
use crate::primitives::{hash, ByteString};

use super::{AgentPhase, Role};

/// Protocol phase a message belongs to, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Setup,
    Keygen,
    Encryption,
    AccessControl,
    Validation,
    DataSharing,
}

impl Phase {
    pub const ALL: [Phase; 6] = [
        Phase::Setup,
        Phase::Keygen,
        Phase::Encryption,
        Phase::AccessControl,
        Phase::Validation,
        Phase::DataSharing,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Phase::Setup => "setup",
            Phase::Keygen => "keygen",
            Phase::Encryption => "encryption",
            Phase::AccessControl => "access_control",
            Phase::Validation => "validation",
            Phase::DataSharing => "data_sharing",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MessageKind {
    Credentials,
    Params,
    Registration,
    RegistrationAccepted,
    RegistrationRejected,
    PrivateKey,
    CiphertextUpload,
    CiphertextStored,
    AccessQuery,
    AccessAccepted,
    AccessRejected,
    SessionKeyRequest,
    SessionKey,
    SessionKeyRotated,
    Validation,
    ValidationNonce,
    ValidationAccepted,
    ValidationRejected,
    Ciphertext,
    DataReceived,
    IntegrityFailure,
}

impl MessageKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MessageKind::Credentials => "CREDENTIALS",
            MessageKind::Params => "PARAMS",
            MessageKind::Registration => "REGISTRATION",
            MessageKind::RegistrationAccepted => "REGISTRATION_ACCEPTED",
            MessageKind::RegistrationRejected => "REGISTRATION_REJECTED",
            MessageKind::PrivateKey => "PRIVATE_KEY",
            MessageKind::CiphertextUpload => "CIPHERTEXT_UPLOAD",
            MessageKind::CiphertextStored => "CIPHERTEXT_STORED",
            MessageKind::AccessQuery => "ACCESS_QUERY",
            MessageKind::AccessAccepted => "ACCESS_ACCEPTED",
            MessageKind::AccessRejected => "ACCESS_REJECTED",
            MessageKind::SessionKeyRequest => "SESSION_KEY_REQUEST",
            MessageKind::SessionKey => "SESSION_KEY",
            MessageKind::SessionKeyRotated => "SESSION_KEY_ROTATED",
            MessageKind::Validation => "VALIDATION",
            MessageKind::ValidationNonce => "VALIDATION_NONCE",
            MessageKind::ValidationAccepted => "VALIDATION_ACCEPTED",
            MessageKind::ValidationRejected => "VALIDATION_REJECTED",
            MessageKind::Ciphertext => "CIPHERTEXT",
            MessageKind::DataReceived => "DATA_RECEIVED",
            MessageKind::IntegrityFailure => "INTEGRITY_FAILURE",
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AdversaryAction {
    /// The original as sent; an altered copy follows it.
    Intercepted,
    /// Altered copy actually delivered.
    Substituted,
    /// Previously observed message injected again.
    Replayed,
}

/// Marks transcript entries touched by an adversary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Annotation {
    pub class: AdversaryClass,
    pub action: AdversaryAction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_step: Option<u64>,
}

/// One protocol message. Steps are assigned when the network logs the
/// message; after that it is never modified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub step: u64,
    pub phase: Phase,
    pub from: Role,
    pub to: Role,
    pub channel: Channel,
    pub kind: MessageKind,
    pub fields: Vec<(&'static str, ByteString)>,
    pub annotation: Option<Annotation>,
    pub(crate) session: Option<usize>,
}

impl Message {
    pub fn new(phase: Phase, from: Role, to: Role, channel: Channel, kind: MessageKind) -> Self {
        Message {
            step: 0,
            phase,
            from,
            to,
            channel,
            kind,
            fields: Vec::new(),
            annotation: None,
            session: None,
        }
    }

    pub fn with(mut self, name: &'static str, value: impl Into<ByteString>) -> Self {
        self.fields.push((name, value.into()));
        self
    }

    pub fn field(&self, name: &str) -> Option<&ByteString> {
        self.fields.iter().find(|(n, _)| *n == name).map(|(_, v)| v)
    }

    pub fn field_mut(&mut self, name: &str) -> Option<&mut ByteString> {
        self.fields.iter_mut().find(|(n, _)| *n == name).map(|(_, v)| v)
    }

    pub(crate) fn require(&self, name: &str) -> Result<&ByteString> {
        self.field(name).ok_or_else(|| {
            Error::Framing(format!("{} message lacks field {name}", self.kind))
        })
    }

    /// Session (principal index) this message belongs to, if any.
    pub fn session(&self) -> Option<usize> {
        self.session
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("message serialises")
    }
}

struct HexFields<'a>(&'a [(&'static str, ByteString)]);

impl Serialize for HexFields<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (name, value) in self.0 {
            map.serialize_entry(name, &value.to_hex())?;
        }
        map.end()
    }
}

impl Serialize for Message {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let len = 7 + self.annotation.is_some() as usize;
        let mut map = serializer.serialize_map(Some(len))?;
        map.serialize_entry("step", &self.step)?;
        map.serialize_entry("phase", &self.phase)?;
        map.serialize_entry("from", &self.from)?;
        map.serialize_entry("to", &self.to)?;
        map.serialize_entry("channel", &self.channel)?;
        map.serialize_entry("kind", &self.kind)?;
        map.serialize_entry("fields", &HexFields(&self.fields))?;
        if let Some(annotation) = &self.annotation {
            map.serialize_entry("adversary", annotation)?;
        }
        map.end()
    }
}

/// Final state of one principal's run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Completed all six phases with the original payload recovered.
    Accepted,
    Rejected { phase: Phase, reason: String },
    /// Data sharing delivered a ciphertext that failed the integrity check.
    IntegrityFailure,
}

impl Outcome {
    pub fn token(&self) -> &'static str {
        match self {
            Outcome::Accepted => "ACCEPTED",
            Outcome::Rejected { .. } => "REJECTED",
            Outcome::IntegrityFailure => "INTEGRITY_FAILURE",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Rejected { phase, reason } => write!(f, "REJECTED at {phase} ({reason})"),
            other => f.write_str(other.token()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalOutcome {
    pub index: usize,
    pub class: AdversaryClass,
    pub user_id: ByteString,
    pub outcome: Outcome,
    /// Furthest agent phase reached before the run ended.
    pub furthest: AgentPhase,
}

/// Ordered message log of a run plus the outcome of every principal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    pub messages: Vec<Message>,
    pub outcomes: Vec<PrincipalOutcome>,
}

impl Transcript {
    /// One JSON object per message, LF-terminated.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for message in &self.messages {
            out.push_str(&message.to_json());
            out.push('\n');
        }
        out
    }

    pub fn write_json_lines(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(self.to_json_lines().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    /// SHA-256 of the JSON-lines rendering.
    pub fn digest(&self) -> ByteString {
        hash(self.to_json_lines().as_bytes())
    }

    pub fn phases_seen(&self) -> Vec<Phase> {
        let mut seen: Vec<Phase> = Vec::new();
        for m in &self.messages {
            if !seen.contains(&m.phase) {
                seen.push(m.phase);
            }
        }
        seen
    }
}
