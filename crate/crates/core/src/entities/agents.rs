use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::netsim::Channel;
use crate::primitives::{hash, ByteString, Rng};
use crate::protocol::{
    access_query, decrypt_data, derive_data_key, derive_private_key, derive_session_key,
    registration_digest, unwrap_ciphertext, validation_messages, CipherBundle, Credentials,
    KeyMaterial, RegistrationDigest, SystemParams, ValidationInputs,
};

use super::message::{Message, MessageKind, Phase};
use super::{AgentPhase, Role};

/// Identity under which the data owner's key is issued and stored.
pub const OWNER_ID: &str = "data-owner";

fn lossy(id: &[u8]) -> String {
    String::from_utf8_lossy(id).into_owned()
}

fn out_of_order(role: Role, expected: AgentPhase, actual: AgentPhase) -> Error {
    Error::OutOfOrder {
        role,
        expected,
        actual,
    }
}

fn expect_kind(message: &Message, kinds: &[MessageKind]) -> Result<()> {
    if kinds.contains(&message.kind) {
        Ok(())
    } else {
        Err(Error::Framing(format!("unexpected {} message", message.kind)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub phase: Phase,
    pub reason: String,
}

/// Requesting user. Holds its own credentials, the provisioned `(s, m)`, the
/// digest `M~` and the key material issued to it.
#[derive(Debug, Clone)]
pub struct User {
    credentials: Credentials,
    width: usize,
    phase: AgentPhase,
    furthest: AgentPhase,
    params: Option<SystemParams>,
    digest: Option<RegistrationDigest>,
    keys: Option<KeyMaterial>,
    recovered: Option<ByteString>,
    rejection: Option<Rejection>,
    integrity_failure: bool,
}

impl User {
    pub fn new(credentials: Credentials, width: usize) -> Self {
        User {
            credentials,
            width,
            phase: AgentPhase::Init,
            furthest: AgentPhase::Init,
            params: None,
            digest: None,
            keys: None,
            recovered: None,
            rejection: None,
            integrity_failure: false,
        }
    }

    pub fn id(&self) -> &ByteString {
        &self.credentials.user_id
    }

    pub fn credentials(&self) -> &Credentials {
        &self.credentials
    }

    pub fn phase(&self) -> AgentPhase {
        self.phase
    }

    pub fn furthest(&self) -> AgentPhase {
        self.furthest
    }

    pub fn keys(&self) -> Option<&KeyMaterial> {
        self.keys.as_ref()
    }

    pub fn recovered(&self) -> Option<&ByteString> {
        self.recovered.as_ref()
    }

    pub fn rejection(&self) -> Option<&Rejection> {
        self.rejection.as_ref()
    }

    pub fn integrity_failed(&self) -> bool {
        self.integrity_failure
    }

    pub(crate) fn require_phase(&self, expected: AgentPhase) -> Result<()> {
        if self.phase == expected {
            Ok(())
        } else {
            Err(out_of_order(Role::User, expected, self.phase))
        }
    }

    fn advance(&mut self, to: AgentPhase) -> Result<()> {
        if self.phase.next() != Some(to) {
            return Err(out_of_order(Role::User, to, self.phase));
        }
        self.phase = to;
        self.furthest = to;
        Ok(())
    }

    fn reject(&mut self, phase: Phase, reason: &str) {
        if !self.phase.is_terminal() {
            self.phase = AgentPhase::Rejected;
            self.rejection = Some(Rejection {
                phase,
                reason: reason.to_string(),
            });
        }
    }

    fn params(&self) -> Result<&SystemParams> {
        self.params
            .as_ref()
            .ok_or_else(|| Error::Config("user has not been provisioned with (s, m)".into()))
    }

    pub fn credentials_message(&self) -> Message {
        Message::new(
            Phase::Setup,
            Role::User,
            Role::Cloud,
            Channel::Private,
            MessageKind::Credentials,
        )
        .with("U_ID", self.credentials.user_id.clone())
        .with("U_ps", self.credentials.password.clone())
    }

    pub fn receive_params(&mut self, message: &Message) -> Result<()> {
        expect_kind(message, &[MessageKind::Params])?;
        self.params = Some(SystemParams {
            s: message.require("s")?.clone(),
            m: message.require("m")?.clone(),
            width: self.width,
        });
        Ok(())
    }

    /// Computes `M~` and the public registration message carrying it.
    pub fn registration_message(&mut self) -> Result<Message> {
        self.require_phase(AgentPhase::Init)?;
        let digest = registration_digest(
            &self.credentials.user_id,
            &self.credentials.password,
            &self.params()?.s,
            self.width,
        )?;
        let message = Message::new(
            Phase::Setup,
            Role::User,
            Role::Cloud,
            Channel::Public,
            MessageKind::Registration,
        )
        .with("U_ID", self.credentials.user_id.clone())
        .with("M_tilde", digest.0.clone());
        self.digest = Some(digest);
        Ok(message)
    }

    pub fn receive_registration_result(&mut self, message: &Message) -> Result<()> {
        self.require_phase(AgentPhase::Init)?;
        match message.kind {
            MessageKind::RegistrationAccepted => self.advance(AgentPhase::Registered),
            MessageKind::RegistrationRejected => {
                self.reject(Phase::Setup, "registration digest mismatch");
                Ok(())
            }
            _ => expect_kind(message, &[MessageKind::RegistrationAccepted]),
        }
    }

    pub fn receive_private_key(&mut self, message: &Message) -> Result<()> {
        expect_kind(message, &[MessageKind::PrivateKey])?;
        self.require_phase(AgentPhase::Registered)?;
        self.keys = Some(KeyMaterial {
            public_key: message.require("U_P")?.clone(),
            attribute: message.require("a")?.clone(),
            private_key: message.require("U_pk")?.clone(),
            session_key: None,
        });
        self.advance(AgentPhase::Keyed)
    }

    pub fn receive_ciphertext_stored(&mut self, message: &Message) -> Result<()> {
        expect_kind(message, &[MessageKind::CiphertextStored])?;
        self.advance(AgentPhase::Encrypted)
    }

    /// `q = M~ * h(U_ID || U_pk)`.
    pub fn access_query_message(&self) -> Result<Message> {
        self.require_phase(AgentPhase::Encrypted)?;
        let digest = self
            .digest
            .as_ref()
            .ok_or_else(|| Error::Config("user holds no registration digest".into()))?;
        let keys = self.keys.as_ref().expect("keyed user holds keys");
        let q = access_query(digest, &self.credentials.user_id, &keys.private_key, self.width)?;
        Ok(Message::new(
            Phase::AccessControl,
            Role::User,
            Role::Cloud,
            Channel::Public,
            MessageKind::AccessQuery,
        )
        .with("U_ID", self.credentials.user_id.clone())
        .with("q", q.0))
    }

    /// Replies to queries this user did not send (a replay) are ignored.
    pub fn receive_access_result(&mut self, message: &Message) -> Result<()> {
        if self.phase != AgentPhase::Encrypted {
            return Ok(());
        }
        match message.kind {
            MessageKind::AccessAccepted => self.advance(AgentPhase::AccessGranted),
            MessageKind::AccessRejected => {
                self.reject(Phase::AccessControl, "access query mismatch");
                Ok(())
            }
            _ => expect_kind(message, &[MessageKind::AccessAccepted]),
        }
    }

    pub fn receive_session_key(&mut self, message: &Message) -> Result<()> {
        expect_kind(message, &[MessageKind::SessionKey])?;
        let key = message.require("U_sk")?.clone();
        match self.keys.as_mut() {
            Some(keys) => {
                keys.session_key = Some(key);
                Ok(())
            }
            None => Err(out_of_order(Role::User, AgentPhase::Keyed, self.phase)),
        }
    }

    /// Public `(v1, v2)` message and the private nonce message.
    pub fn validation_messages(&self, nonce: ByteString) -> Result<(Message, Message)> {
        self.require_phase(AgentPhase::AccessGranted)?;
        let params = self.params()?;
        let keys = self.keys.as_ref().expect("granted user holds keys");
        let session_key = keys
            .session_key
            .as_ref()
            .ok_or_else(|| Error::Config("access granted but no session key received".into()))?;
        let pair = validation_messages(
            &ValidationInputs {
                user_id: &self.credentials.user_id,
                session_key,
                s: &params.s,
                nonce: &nonce,
                private_key: &keys.private_key,
                m: &params.m,
                attribute: &keys.attribute,
            },
            self.width,
        )?;
        let public = Message::new(
            Phase::Validation,
            Role::User,
            Role::Cloud,
            Channel::Public,
            MessageKind::Validation,
        )
        .with("U_ID", self.credentials.user_id.clone())
        .with("v1", pair.v1)
        .with("v2", pair.v2);
        let private = Message::new(
            Phase::Validation,
            Role::User,
            Role::Cloud,
            Channel::Private,
            MessageKind::ValidationNonce,
        )
        .with("U_ID", self.credentials.user_id.clone())
        .with("r", pair.nonce);
        Ok((public, private))
    }

    pub fn receive_validation_result(&mut self, message: &Message) -> Result<()> {
        self.require_phase(AgentPhase::AccessGranted)?;
        match message.kind {
            MessageKind::ValidationAccepted => self.advance(AgentPhase::Verified),
            MessageKind::ValidationRejected => {
                self.reject(Phase::Validation, "validation message mismatch");
                Ok(())
            }
            _ => expect_kind(message, &[MessageKind::ValidationAccepted]),
        }
    }

    /// Unwraps and decrypts the shared ciphertext, checks it against the
    /// payload digest and returns the receipt for the cloud.
    pub fn receive_ciphertext(&mut self, message: &Message) -> Result<Message> {
        expect_kind(message, &[MessageKind::Ciphertext])?;
        self.require_phase(AgentPhase::Verified)?;
        let params = self.params()?.clone();
        let wrapped = message.require("D_C")?;
        let expected = message.require("digest")?.clone();
        let data_key = derive_data_key(&params.m, &params.s);
        let recovered = unwrap_ciphertext(wrapped, &data_key)
            .and_then(|(encrypted, _owner_key)| decrypt_data(&encrypted, &params.s, &params.m));
        let user_id = self.credentials.user_id.clone();
        let receipt = |kind| {
            Message::new(
                Phase::DataSharing,
                Role::User,
                Role::Cloud,
                Channel::Public,
                kind,
            )
            .with("U_ID", user_id.clone())
            .with("digest", expected.clone())
        };
        match recovered {
            Ok(payload) if hash(&payload) == expected => {
                let reply = receipt(MessageKind::DataReceived).with("recovered_digest", hash(&payload));
                self.recovered = Some(payload);
                self.advance(AgentPhase::Complete)?;
                Ok(reply)
            }
            Ok(payload) => {
                let reply =
                    receipt(MessageKind::IntegrityFailure).with("recovered_digest", hash(&payload));
                self.integrity_failure = true;
                self.reject(Phase::DataSharing, "payload digest mismatch");
                Ok(reply)
            }
            Err(e) => {
                self.integrity_failure = true;
                self.reject(Phase::DataSharing, &format!("ciphertext unwrap failed: {e}"));
                Ok(receipt(MessageKind::IntegrityFailure))
            }
        }
    }
}

/// Data owner: encrypts payloads under `(s, m)` and its private key `O_pk`.
#[derive(Debug, Clone)]
pub struct DataOwner {
    id: ByteString,
    width: usize,
    phase: AgentPhase,
    params: Option<SystemParams>,
    keys: Option<KeyMaterial>,
}

impl DataOwner {
    pub fn new(width: usize) -> Self {
        DataOwner {
            id: ByteString::from(OWNER_ID),
            width,
            phase: AgentPhase::Init,
            params: None,
            keys: None,
        }
    }

    pub fn id(&self) -> &ByteString {
        &self.id
    }

    pub fn phase(&self) -> AgentPhase {
        self.phase
    }

    pub fn keys(&self) -> Option<&KeyMaterial> {
        self.keys.as_ref()
    }

    pub fn is_keyed(&self) -> bool {
        matches!(self.phase, AgentPhase::Keyed | AgentPhase::Encrypted)
    }

    pub fn receive_params(&mut self, message: &Message) -> Result<()> {
        expect_kind(message, &[MessageKind::Params])?;
        if self.phase != AgentPhase::Init {
            return Err(out_of_order(Role::Owner, AgentPhase::Init, self.phase));
        }
        self.params = Some(SystemParams {
            s: message.require("s")?.clone(),
            m: message.require("m")?.clone(),
            width: self.width,
        });
        self.phase = AgentPhase::Registered;
        Ok(())
    }

    pub fn receive_private_key(&mut self, message: &Message) -> Result<()> {
        expect_kind(message, &[MessageKind::PrivateKey])?;
        if self.phase != AgentPhase::Registered {
            return Err(out_of_order(Role::Owner, AgentPhase::Registered, self.phase));
        }
        self.keys = Some(KeyMaterial {
            public_key: message.require("U_P")?.clone(),
            attribute: message.require("a")?.clone(),
            private_key: message.require("U_pk")?.clone(),
            session_key: None,
        });
        self.phase = AgentPhase::Keyed;
        Ok(())
    }

    /// Seals `payload` for `recipient` and builds the upload message.
    pub fn upload_message(&mut self, recipient: &ByteString, payload: &[u8]) -> Result<(Message, CipherBundle)> {
        if !self.is_keyed() {
            return Err(out_of_order(Role::Owner, AgentPhase::Keyed, self.phase));
        }
        let params = self.params.as_ref().expect("keyed owner holds params");
        let keys = self.keys.as_ref().expect("keyed owner holds keys");
        let bundle = CipherBundle::seal(payload, params, &keys.private_key)?;
        self.phase = AgentPhase::Encrypted;
        let message = Message::new(
            Phase::Encryption,
            Role::Owner,
            Role::Cloud,
            Channel::Private,
            MessageKind::CiphertextUpload,
        )
        .with("U_ID", recipient.clone())
        .with("D_C", bundle.wrapped.clone())
        .with("digest", bundle.payload_digest.clone());
        Ok((message, bundle))
    }
}

/// Per-principal entry in the cloud store (starred values).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StoredPrincipal {
    pub credentials: Option<Credentials>,
    pub private_key: Option<ByteString>,
    pub attribute: Option<ByteString>,
    pub session_key: Option<ByteString>,
}

impl StoredPrincipal {
    fn stored_bytes(&self) -> u64 {
        let creds = self
            .credentials
            .as_ref()
            .map_or(0, |c| c.user_id.width() + c.password.width());
        let opt = |v: &Option<ByteString>| v.as_ref().map_or(0, ByteString::width);
        (creds + opt(&self.private_key) + opt(&self.attribute) + opt(&self.session_key)) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredCiphertext {
    pub wrapped: ByteString,
    pub payload_digest: ByteString,
}

/// Everything the cloud server persists.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CloudStore {
    pub params: Option<(ByteString, ByteString)>,
    pub principals: BTreeMap<ByteString, StoredPrincipal>,
    pub ciphertexts: BTreeMap<ByteString, StoredCiphertext>,
}

impl CloudStore {
    /// Sum of the lengths of every stored byte string.
    pub fn stored_bytes(&self) -> u64 {
        let params = self
            .params
            .as_ref()
            .map_or(0, |(s, m)| (s.width() + m.width()) as u64);
        let principals: u64 = self.principals.values().map(StoredPrincipal::stored_bytes).sum();
        let ciphertexts: u64 = self
            .ciphertexts
            .values()
            .map(|c| (c.wrapped.width() + c.payload_digest.width()) as u64)
            .sum();
        params + principals + ciphertexts
    }
}

#[derive(Debug, Clone)]
pub struct CloudServer {
    width: usize,
    store: CloudStore,
    pending_validation: BTreeMap<ByteString, (ByteString, ByteString)>,
    pending_nonce: BTreeMap<ByteString, ByteString>,
}

impl CloudServer {
    pub fn new(width: usize) -> Self {
        CloudServer {
            width,
            store: CloudStore::default(),
            pending_validation: BTreeMap::new(),
            pending_nonce: BTreeMap::new(),
        }
    }

    pub fn store(&self) -> &CloudStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut CloudStore {
        &mut self.store
    }

    pub fn is_provisioned(&self) -> bool {
        self.store.params.is_some()
    }

    fn params(&self) -> Result<(&ByteString, &ByteString)> {
        self.store
            .params
            .as_ref()
            .map(|(s, m)| (s, m))
            .ok_or_else(|| Error::Config("cloud server has not been provisioned".into()))
    }

    fn principal(&self, id: &ByteString) -> Result<&StoredPrincipal> {
        self.store
            .principals
            .get(id)
            .ok_or_else(|| Error::UnknownPrincipal(lossy(id)))
    }

    fn reply(&self, phase: Phase, kind: MessageKind, id: &ByteString) -> Message {
        Message::new(phase, Role::Cloud, Role::User, Channel::Public, kind).with("U_ID", id.clone())
    }

    /// Stores `U_ID*` and `U_ps*`. Each identity may enrol once.
    pub fn receive_credentials(&mut self, message: &Message) -> Result<()> {
        expect_kind(message, &[MessageKind::Credentials])?;
        let creds = Credentials::new(message.require("U_ID")?.clone(), message.require("U_ps")?.clone())?;
        if self.store.principals.contains_key(&creds.user_id) {
            return Err(Error::DuplicateIdentity(lossy(&creds.user_id)));
        }
        self.store.principals.insert(
            creds.user_id.clone(),
            StoredPrincipal {
                credentials: Some(creds),
                ..StoredPrincipal::default()
            },
        );
        Ok(())
    }

    pub fn receive_params(&mut self, message: &Message) -> Result<()> {
        expect_kind(message, &[MessageKind::Params])?;
        self.store.params = Some((message.require("s")?.clone(), message.require("m")?.clone()));
        Ok(())
    }

    fn stored_digest(&self, id: &ByteString) -> Result<Option<RegistrationDigest>> {
        let (s, _) = self.params()?;
        match self.store.principals.get(id).and_then(|p| p.credentials.as_ref()) {
            Some(c) => Ok(Some(registration_digest(&c.user_id, &c.password, s, self.width)?)),
            None => Ok(None),
        }
    }

    /// Recomputes `M` from `(U_ID*, U_ps*)` and compares it with `M~`.
    pub fn handle_registration(&mut self, message: &Message) -> Result<Message> {
        expect_kind(message, &[MessageKind::Registration])?;
        let id = message.require("U_ID")?.clone();
        let claimed = message.require("M_tilde")?.clone();
        let reply = match self.stored_digest(&id)? {
            Some(m) if m.0 == claimed => self
                .reply(Phase::Setup, MessageKind::RegistrationAccepted, &id)
                .with("M", m.0),
            Some(m) => self
                .reply(Phase::Setup, MessageKind::RegistrationRejected, &id)
                .with("M", m.0),
            None => self.reply(Phase::Setup, MessageKind::RegistrationRejected, &id),
        };
        Ok(reply.with("M_tilde", claimed))
    }

    pub fn receive_private_key(&mut self, message: &Message) -> Result<()> {
        expect_kind(message, &[MessageKind::PrivateKey])?;
        let id = message.require("U_ID")?.clone();
        let entry = self.store.principals.entry(id).or_default();
        entry.private_key = Some(message.require("U_pk")?.clone());
        entry.attribute = Some(message.require("a")?.clone());
        Ok(())
    }

    /// Stores `D^C*` and tells the recipient its data is available.
    pub fn receive_upload(&mut self, message: &Message) -> Result<Message> {
        expect_kind(message, &[MessageKind::CiphertextUpload])?;
        let id = message.require("U_ID")?.clone();
        self.store.ciphertexts.insert(
            id.clone(),
            StoredCiphertext {
                wrapped: message.require("D_C")?.clone(),
                payload_digest: message.require("digest")?.clone(),
            },
        );
        Ok(self.reply(Phase::Encryption, MessageKind::CiphertextStored, &id))
    }

    /// Computes `q~ = M * h(U_ID* || U_pk*)`; returns the reply and whether
    /// the query matched.
    pub fn handle_access_query(&mut self, message: &Message) -> Result<(Message, bool)> {
        expect_kind(message, &[MessageKind::AccessQuery])?;
        let id = message.require("U_ID")?.clone();
        let q = message.require("q")?.clone();
        let stored_key = self
            .principal(&id)?
            .private_key
            .clone()
            .ok_or_else(|| Error::UnknownPrincipal(lossy(&id)))?;
        let digest = self
            .stored_digest(&id)?
            .ok_or_else(|| Error::UnknownPrincipal(lossy(&id)))?;
        let q_tilde = access_query(&digest, &id, &stored_key, self.width)?.0;
        let accepted = q_tilde == q;
        let kind = if accepted {
            MessageKind::AccessAccepted
        } else {
            MessageKind::AccessRejected
        };
        let reply = self
            .reply(Phase::AccessControl, kind, &id)
            .with("q", q)
            .with("q_tilde", q_tilde);
        Ok((reply, accepted))
    }

    pub fn session_key_request(&self, id: &ByteString) -> Message {
        Message::new(
            Phase::AccessControl,
            Role::Cloud,
            Role::Kgc,
            Channel::Private,
            MessageKind::SessionKeyRequest,
        )
        .with("U_ID", id.clone())
    }

    /// Stores `U_sk*`, replacing any earlier session key.
    pub fn receive_session_key(&mut self, message: &Message) -> Result<()> {
        expect_kind(message, &[MessageKind::SessionKey, MessageKind::SessionKeyRotated])?;
        let id = message.require("U_ID")?.clone();
        let key = message.require("U_sk")?.clone();
        match self.store.principals.get_mut(&id) {
            Some(p) => {
                p.session_key = Some(key);
                Ok(())
            }
            None => Err(Error::UnknownPrincipal(lossy(&id))),
        }
    }

    pub fn receive_validation(&mut self, message: &Message) -> Result<()> {
        expect_kind(message, &[MessageKind::Validation])?;
        self.pending_validation.insert(
            message.require("U_ID")?.clone(),
            (message.require("v1")?.clone(), message.require("v2")?.clone()),
        );
        Ok(())
    }

    pub fn receive_nonce(&mut self, message: &Message) -> Result<()> {
        expect_kind(message, &[MessageKind::ValidationNonce])?;
        self.pending_nonce
            .insert(message.require("U_ID")?.clone(), message.require("r")?.clone());
        Ok(())
    }

    /// Recomputes `(v1~, v2~)` from stored values and the received nonce.
    pub fn handle_validation(&mut self, id: &ByteString) -> Result<Message> {
        let (v1, v2) = self
            .pending_validation
            .remove(id)
            .ok_or_else(|| Error::Config(format!("no validation message from {}", lossy(id))))?;
        let nonce = self.pending_nonce.remove(id);
        let reject = |me: &Self| {
            me.reply(Phase::Validation, MessageKind::ValidationRejected, id)
                .with("v1", v1.clone())
                .with("v2", v2.clone())
        };
        let Some(nonce) = nonce else {
            return Ok(reject(self));
        };
        let (s, m) = self.params()?;
        let stored = self.principal(id)?;
        let (Some(session_key), Some(private_key), Some(attribute)) =
            (&stored.session_key, &stored.private_key, &stored.attribute)
        else {
            return Ok(reject(self));
        };
        let expected = validation_messages(
            &ValidationInputs {
                user_id: id,
                session_key,
                s,
                nonce: &nonce,
                private_key,
                m,
                attribute,
            },
            self.width,
        )?;
        let kind = if expected.v1 == v1 && expected.v2 == v2 {
            MessageKind::ValidationAccepted
        } else {
            MessageKind::ValidationRejected
        };
        Ok(self
            .reply(Phase::Validation, kind, id)
            .with("v1", v1)
            .with("v2", v2)
            .with("v1_tilde", expected.v1)
            .with("v2_tilde", expected.v2))
    }

    /// Public message carrying `D^C*` and its payload digest.
    pub fn share_message(&self, id: &ByteString) -> Result<Message> {
        let stored = self
            .store
            .ciphertexts
            .get(id)
            .ok_or_else(|| Error::UnknownPrincipal(lossy(id)))?;
        Ok(self
            .reply(Phase::DataSharing, MessageKind::Ciphertext, id)
            .with("D_C", stored.wrapped.clone())
            .with("digest", stored.payload_digest.clone()))
    }
}

/// Public key and attribute the KGC issued to a principal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssuedKey {
    pub public_key: ByteString,
    pub attribute: ByteString,
}

/// Key generation center: owns `(s, m)` and issues private and session keys.
#[derive(Debug, Clone)]
pub struct Kgc {
    params: SystemParams,
    registry: BTreeMap<ByteString, IssuedKey>,
}

impl Kgc {
    pub fn new(params: SystemParams) -> Self {
        Kgc {
            params,
            registry: BTreeMap::new(),
        }
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn registry(&self) -> &BTreeMap<ByteString, IssuedKey> {
        &self.registry
    }

    pub fn stored_bytes(&self) -> u64 {
        let issued: usize = self
            .registry
            .values()
            .map(|k| k.public_key.width() + k.attribute.width())
            .sum();
        (self.params.s.width() + self.params.m.width() + issued) as u64
    }

    pub fn params_message(&self, phase: Phase, to: Role) -> Message {
        Message::new(phase, Role::Kgc, to, Channel::Private, MessageKind::Params)
            .with("s", self.params.s.clone())
            .with("m", self.params.m.clone())
    }

    /// Samples `U^P` and `a`, derives `U_pk`, and returns the messages for
    /// the principal and for the cloud.
    pub fn issue_private_key(
        &mut self,
        id: &ByteString,
        to: Role,
        rng: &mut Rng,
    ) -> Result<(Message, Message)> {
        let width = self.params.width;
        let public_key = rng.random_bytes(width);
        let attribute = rng.random_bytes(width);
        let private_key =
            derive_private_key(&self.params.m, &public_key, &self.params.s, &attribute, width)?;
        self.registry.insert(
            id.clone(),
            IssuedKey {
                public_key: public_key.clone(),
                attribute: attribute.clone(),
            },
        );
        let to_principal = Message::new(Phase::Keygen, Role::Kgc, to, Channel::Private, MessageKind::PrivateKey)
            .with("U_ID", id.clone())
            .with("U_P", public_key)
            .with("a", attribute.clone())
            .with("U_pk", private_key.clone());
        let to_cloud = Message::new(
            Phase::Keygen,
            Role::Kgc,
            Role::Cloud,
            Channel::Private,
            MessageKind::PrivateKey,
        )
        .with("U_ID", id.clone())
        .with("a", attribute)
        .with("U_pk", private_key);
        Ok((to_principal, to_cloud))
    }

    /// `U_sk = E(U^P || h(m || a))`, addressed to the user and the cloud.
    pub fn handle_session_key_request(&self, message: &Message) -> Result<(Message, Message)> {
        expect_kind(message, &[MessageKind::SessionKeyRequest])?;
        let id = message.require("U_ID")?.clone();
        let issued = self
            .registry
            .get(&id)
            .ok_or_else(|| Error::UnknownPrincipal(lossy(&id)))?;
        let session_key = derive_session_key(
            &issued.public_key,
            &self.params.m,
            &issued.attribute,
            self.params.width,
        )?;
        let build = |to| {
            Message::new(Phase::AccessControl, Role::Kgc, to, Channel::Private, MessageKind::SessionKey)
                .with("U_ID", id.clone())
                .with("U_sk", session_key.clone())
        };
        Ok((build(Role::User), build(Role::Cloud)))
    }

    /// Replacement session key sent to the cloud only, leaving the user's
    /// copy stale.
    pub fn rotated_session_key(&self, id: &ByteString, rng: &mut Rng) -> Result<Message> {
        if !self.registry.contains_key(id) {
            return Err(Error::UnknownPrincipal(lossy(id)));
        }
        Ok(Message::new(
            Phase::AccessControl,
            Role::Kgc,
            Role::Cloud,
            Channel::Private,
            MessageKind::SessionKeyRotated,
        )
        .with("U_ID", id.clone())
        .with("U_sk", rng.random_bytes(self.params.width)))
    }
}
