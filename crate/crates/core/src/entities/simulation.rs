use crate::error::{Error, Result};
use crate::netsim::{AdversaryClass, Network, ScenarioConfig};
use crate::primitives::{ByteString, Rng};
use crate::protocol::{Credentials, KeyLength, SystemParams};

use super::agents::{CloudServer, DataOwner, Kgc, User};
use super::message::{Message, Outcome, Phase, PrincipalOutcome, Transcript};
use super::{AgentPhase, Role};

/// Length of generated passwords.
pub const PASSWORD_WIDTH: usize = 16;

/// Identity of the `index`-th principal of a scenario.
pub fn user_id_for(index: usize) -> ByteString {
    ByteString::from(format!("user-{index:04}").as_str())
}

#[derive(Debug, Clone)]
struct Principal {
    class: AdversaryClass,
    user_id: ByteString,
    /// `None` for a replayer, which never enrols.
    user: Option<User>,
    replay: ReplayState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ReplayState {
    NotApplicable,
    Pending,
    Granted,
    Refused,
}

/// Final agent state after a run.
#[derive(Debug, Clone)]
pub struct Run {
    pub transcript: Transcript,
    pub cloud: CloudServer,
    pub kgc: Kgc,
    pub owner: DataOwner,
    pub users: Vec<Option<User>>,
}

/// One protocol run: the four agents, the network between them and the
/// principals taking part. Each phase method acts on one principal and
/// checks that it is in the right state.
#[derive(Debug)]
pub struct Simulation {
    width: usize,
    rng: Rng,
    net: Network,
    kgc: Kgc,
    cloud: CloudServer,
    owner: DataOwner,
    principals: Vec<Principal>,
}

impl Simulation {
    /// The KGC draws `(s, m)` from the run stream seeded by `seed`; the
    /// adversary draws from an independent stream derived from it.
    pub fn new(key_length: KeyLength, seed: u64) -> Self {
        let width = key_length.width();
        let mut rng = Rng::new(seed);
        let params = SystemParams::generate(&mut rng, key_length);
        let mut net = Network::new(
            [Role::User, Role::Owner, Role::Cloud, Role::Kgc],
            width,
            Rng::derive(seed, u64::MAX),
        );
        net.set_insider_s(params.s.clone());
        Simulation {
            width,
            rng,
            net,
            kgc: Kgc::new(params),
            cloud: CloudServer::new(width),
            owner: DataOwner::new(width),
            principals: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn set_tamper_bytes(&mut self, n: usize) {
        self.net.set_tamper_bytes(n);
    }

    pub fn kgc(&self) -> &Kgc {
        &self.kgc
    }

    pub fn cloud(&self) -> &CloudServer {
        &self.cloud
    }

    /// Direct access to the server, e.g. to corrupt stored ciphertext.
    pub fn cloud_mut(&mut self) -> &mut CloudServer {
        &mut self.cloud
    }

    pub fn owner(&self) -> &DataOwner {
        &self.owner
    }

    pub fn user(&self, p: usize) -> Option<&User> {
        self.principals.get(p).and_then(|x| x.user.as_ref())
    }

    pub fn principal_count(&self) -> usize {
        self.principals.len()
    }

    pub fn messages(&self) -> &[Message] {
        self.net.log()
    }

    /// Adds a principal and returns its index (which is also its session).
    pub fn add_user(&mut self, credentials: Credentials, class: AdversaryClass) -> usize {
        let index = self.principals.len();
        let (user, replay) = if class == AdversaryClass::ReplayQuery {
            (None, ReplayState::Pending)
        } else {
            (
                Some(User::new(credentials.clone(), self.width)),
                ReplayState::NotApplicable,
            )
        };
        self.principals.push(Principal {
            class,
            user_id: credentials.user_id,
            user,
            replay,
        });
        self.net.attack(index, class);
        index
    }

    /// Adds `user-NNNN` with a random password.
    pub fn add_generated_user(&mut self, class: AdversaryClass) -> usize {
        let id = user_id_for(self.principals.len());
        let password = self.rng.random_bytes(PASSWORD_WIDTH);
        let creds = Credentials::new(id, password).expect("non-empty generated credentials");
        self.add_user(creds, class)
    }

    fn send(&mut self, p: Option<usize>, mut message: Message) -> Result<Message> {
        message.session = p;
        self.net.transmit(message)
    }

    fn user_mut(&mut self, p: usize) -> Result<&mut User> {
        let principal = self
            .principals
            .get_mut(p)
            .ok_or_else(|| Error::UnknownPrincipal(format!("index {p}")))?;
        let id = principal.user_id.clone();
        principal
            .user
            .as_mut()
            .ok_or_else(|| Error::UnknownPrincipal(String::from_utf8_lossy(&id).into_owned()))
    }

    fn user_index(&self, id: &ByteString) -> Option<usize> {
        self.principals
            .iter()
            .position(|x| x.user.is_some() && &x.user_id == id)
    }

    /// Enrols credentials, provisions `(s, m)` and compares `M~` with `M`.
    pub fn setup_phase(&mut self, p: usize) -> Result<()> {
        self.user_mut(p)?.require_phase(AgentPhase::Init)?;
        let creds = self.user_mut(p)?.credentials_message();
        let delivered = self.send(Some(p), creds)?;
        self.cloud.receive_credentials(&delivered)?;

        if !self.cloud.is_provisioned() {
            let params = self.kgc.params_message(Phase::Setup, Role::Cloud);
            let delivered = self.send(None, params)?;
            self.cloud.receive_params(&delivered)?;
        }
        let params = self.kgc.params_message(Phase::Setup, Role::User);
        let delivered = self.send(Some(p), params)?;
        self.user_mut(p)?.receive_params(&delivered)?;

        let registration = self.user_mut(p)?.registration_message()?;
        let delivered = self.send(Some(p), registration)?;
        let reply = self.cloud.handle_registration(&delivered)?;
        let delivered = self.send(Some(p), reply)?;
        self.user_mut(p)?.receive_registration_result(&delivered)?;

        if self.user_mut(p)?.phase() == AgentPhase::Registered && self.owner.phase() == AgentPhase::Init {
            let params = self.kgc.params_message(Phase::Setup, Role::Owner);
            let delivered = self.send(None, params)?;
            self.owner.receive_params(&delivered)?;
        }
        Ok(())
    }

    /// Issues `U_pk` to the user and the cloud, and the owner's key the
    /// first time round.
    pub fn keygen_phase(&mut self, p: usize) -> Result<()> {
        self.user_mut(p)?.require_phase(AgentPhase::Registered)?;
        let id = self.principals[p].user_id.clone();
        let (to_user, to_cloud) = self.kgc.issue_private_key(&id, Role::User, &mut self.rng)?;
        let delivered = self.send(Some(p), to_user)?;
        self.user_mut(p)?.receive_private_key(&delivered)?;
        let delivered = self.send(Some(p), to_cloud)?;
        self.cloud.receive_private_key(&delivered)?;

        if self.owner.phase() == AgentPhase::Registered {
            let owner_id = self.owner.id().clone();
            let (to_owner, to_cloud) =
                self.kgc.issue_private_key(&owner_id, Role::Owner, &mut self.rng)?;
            let delivered = self.send(None, to_owner)?;
            self.owner.receive_private_key(&delivered)?;
            let delivered = self.send(None, to_cloud)?;
            self.cloud.receive_private_key(&delivered)?;
        }
        Ok(())
    }

    /// The owner seals `payload` for principal `p` and uploads it.
    pub fn encryption_phase(&mut self, p: usize, payload: &[u8]) -> Result<()> {
        self.user_mut(p)?.require_phase(AgentPhase::Keyed)?;
        if payload.is_empty() {
            return Err(Error::EmptyPayload);
        }
        let id = self.principals[p].user_id.clone();
        let (upload, _) = self.owner.upload_message(&id, payload)?;
        let delivered = self.send(Some(p), upload)?;
        let stored = self.cloud.receive_upload(&delivered)?;
        let delivered = self.send(Some(p), stored)?;
        self.user_mut(p)?.receive_ciphertext_stored(&delivered)
    }

    fn issue_session_key(&mut self, p: usize, id: &ByteString) -> Result<()> {
        let request = self.cloud.session_key_request(id);
        let delivered = self.send(Some(p), request)?;
        let (to_user, to_cloud) = self.kgc.handle_session_key_request(&delivered)?;
        let delivered = self.send(Some(p), to_user)?;
        if let Some(holder) = self.user_index(id) {
            self.user_mut(holder)?.receive_session_key(&delivered)?;
        }
        let delivered = self.send(Some(p), to_cloud)?;
        self.cloud.receive_session_key(&delivered)
    }

    /// Query `q` against `q~`; on a match the KGC issues `U_sk`.
    pub fn access_control_phase(&mut self, p: usize) -> Result<()> {
        let query = self.user_mut(p)?.access_query_message()?;
        let delivered = self.send(Some(p), query)?;
        let (reply, accepted) = self.cloud.handle_access_query(&delivered)?;
        let delivered = self.send(Some(p), reply)?;
        self.user_mut(p)?.receive_access_result(&delivered)?;
        if accepted {
            let id = self.principals[p].user_id.clone();
            self.issue_session_key(p, &id)?;
        }
        Ok(())
    }

    /// Replayer `p` re-sends an eavesdropped genuine query.
    pub fn replay_access(&mut self, p: usize) -> Result<()> {
        match self.principals.get(p).map(|x| x.replay) {
            Some(ReplayState::Pending) => {}
            Some(_) => {
                return Err(Error::Config(format!("principal {p} is not a pending replayer")))
            }
            None => return Err(Error::UnknownPrincipal(format!("index {p}"))),
        }
        let injected = self.net.replay_query(p)?;
        let (reply, accepted) = self.cloud.handle_access_query(&injected)?;
        let delivered = self.send(Some(p), reply)?;
        let victim = delivered.require("U_ID")?.clone();
        if let Some(v) = self.user_index(&victim) {
            self.user_mut(v)?.receive_access_result(&delivered)?;
        }
        if accepted {
            self.issue_session_key(p, &victim)?;
        }
        self.principals[p].replay = if accepted {
            ReplayState::Granted
        } else {
            ReplayState::Refused
        };
        Ok(())
    }

    /// KGC replaces `U_sk*` at the cloud without telling the user.
    pub fn rotate_session_key(&mut self, p: usize) -> Result<()> {
        self.user_mut(p)?.require_phase(AgentPhase::AccessGranted)?;
        let id = self.principals[p].user_id.clone();
        let rotated = self.kgc.rotated_session_key(&id, &mut self.rng)?;
        let delivered = self.send(Some(p), rotated)?;
        self.cloud.receive_session_key(&delivered)
    }

    /// User sends `(v1, v2)` publicly and `r` privately; the cloud
    /// recomputes both from its stored values.
    pub fn validation_phase(&mut self, p: usize) -> Result<()> {
        self.user_mut(p)?.require_phase(AgentPhase::AccessGranted)?;
        let nonce = self.rng.random_bytes(self.width);
        let (public, private) = self.user_mut(p)?.validation_messages(nonce)?;
        let id = self.principals[p].user_id.clone();
        let delivered = self.send(Some(p), public)?;
        self.cloud.receive_validation(&delivered)?;
        let delivered = self.send(Some(p), private)?;
        self.cloud.receive_nonce(&delivered)?;
        let reply = self.cloud.handle_validation(&id)?;
        let delivered = self.send(Some(p), reply)?;
        self.user_mut(p)?.receive_validation_result(&delivered)
    }

    /// Cloud sends `D^C*`; returns the recovered payload if it passed the
    /// digest check.
    pub fn data_sharing_phase(&mut self, p: usize) -> Result<Option<ByteString>> {
        self.user_mut(p)?.require_phase(AgentPhase::Verified)?;
        let id = self.principals[p].user_id.clone();
        let share = self.cloud.share_message(&id)?;
        let delivered = self.send(Some(p), share)?;
        let receipt = self.user_mut(p)?.receive_ciphertext(&delivered)?;
        self.send(Some(p), receipt)?;
        Ok(self.user_mut(p)?.recovered().cloned())
    }

    fn outcome(principal: &Principal) -> (Outcome, AgentPhase) {
        let Some(user) = &principal.user else {
            return match principal.replay {
                ReplayState::Granted => (
                    Outcome::Rejected {
                        phase: Phase::Validation,
                        reason: "replayed query grants access but no session key".into(),
                    },
                    AgentPhase::AccessGranted,
                ),
                _ => (
                    Outcome::Rejected {
                        phase: Phase::AccessControl,
                        reason: "replayed query refused".into(),
                    },
                    AgentPhase::Init,
                ),
            };
        };
        let outcome = if user.phase() == AgentPhase::Complete {
            Outcome::Accepted
        } else if user.integrity_failed() {
            Outcome::IntegrityFailure
        } else if let Some(r) = user.rejection() {
            Outcome::Rejected {
                phase: r.phase,
                reason: r.reason.clone(),
            }
        } else {
            let phase = match user.phase() {
                AgentPhase::Init => Phase::Setup,
                AgentPhase::Registered => Phase::Keygen,
                AgentPhase::Keyed => Phase::Encryption,
                AgentPhase::Encrypted => Phase::AccessControl,
                AgentPhase::AccessGranted => Phase::Validation,
                _ => Phase::DataSharing,
            };
            Outcome::Rejected {
                phase,
                reason: "run ended before completion".into(),
            }
        };
        (outcome, user.furthest())
    }

    pub fn finish(self) -> Run {
        let outcomes = self
            .principals
            .iter()
            .enumerate()
            .map(|(index, principal)| {
                let (outcome, furthest) = Self::outcome(principal);
                PrincipalOutcome {
                    index,
                    class: principal.class,
                    user_id: principal.user_id.clone(),
                    outcome,
                    furthest,
                }
            })
            .collect();
        Run {
            transcript: Transcript {
                messages: self.net.into_log(),
                outcomes,
            },
            cloud: self.cloud,
            kgc: self.kgc,
            owner: self.owner,
            users: self.principals.into_iter().map(|p| p.user).collect(),
        }
    }

    fn active(&self, p: usize, phase: AgentPhase) -> bool {
        self.principals[p]
            .user
            .as_ref()
            .is_some_and(|u| u.phase() == phase)
    }
}

/// Runs every principal of `config` through all six phases, phase by phase.
/// Principal `i` receives `payloads[i % payloads.len()]`.
pub fn execute(config: &ScenarioConfig, payloads: &[ByteString]) -> Result<Run> {
    config.validate()?;
    let principals = config.principals();
    if payloads.is_empty() && principals.iter().any(|c| *c != AdversaryClass::ReplayQuery) {
        return Err(Error::Config("scenario needs at least one payload".into()));
    }
    let mut sim = Simulation::new(config.key_length_bits, config.seed);
    sim.set_tamper_bytes(config.tamper_bytes);
    for class in &principals {
        sim.add_generated_user(*class);
    }
    let all: Vec<usize> = (0..principals.len()).collect();

    for &p in &all {
        if sim.active(p, AgentPhase::Init) {
            sim.setup_phase(p)?;
        }
    }
    for &p in &all {
        if sim.active(p, AgentPhase::Registered) {
            sim.keygen_phase(p)?;
        }
    }
    for &p in &all {
        if sim.active(p, AgentPhase::Keyed) {
            let payload = &payloads[p % payloads.len()];
            sim.encryption_phase(p, payload)?;
        }
    }
    for &p in &all {
        if sim.active(p, AgentPhase::Encrypted) {
            sim.access_control_phase(p)?;
        }
    }
    for &p in &all {
        if principals[p] == AdversaryClass::ReplayQuery {
            sim.replay_access(p)?;
        }
    }
    let stale: Vec<usize> = all
        .iter()
        .copied()
        .filter(|&p| principals[p].is_genuine())
        .take(config.stale_session_keys)
        .collect();
    for p in stale {
        if sim.active(p, AgentPhase::AccessGranted) {
            sim.rotate_session_key(p)?;
        }
    }
    for &p in &all {
        if sim.active(p, AgentPhase::AccessGranted) {
            sim.validation_phase(p)?;
        }
    }
    for &p in &all {
        if sim.active(p, AgentPhase::Verified) {
            sim.data_sharing_phase(p)?;
        }
    }
    Ok(sim.finish())
}

pub fn run_protocol(config: &ScenarioConfig, payloads: &[ByteString]) -> Result<Transcript> {
    execute(config, payloads).map(|run| run.transcript)
}
