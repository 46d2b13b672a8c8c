//! Deterministic in-memory network. Two channel kinds: public links are
//! observed by the adversary and may be altered per the attacked session's
//! class; private links are ideal. Every message is logged to the transcript
//! at delivery time, which is where it receives its step number.

mod adversary;
mod scenario;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::entities::{AdversaryAction, Annotation, Message, Role};
use crate::error::{Error, Result};
use crate::primitives::{ByteString, Rng};

pub use adversary::{apply_adversary, replay_of, AdversaryClass, Knowledge};
pub use scenario::{run_scenario, AdversarySpec, ClassCounts, OutcomeSummary, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Channel {
    Public,
    Private,
}

/// FIFO queue of in-flight messages for one channel kind.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    kind: Channel,
    queue: VecDeque<Message>,
}

impl ChannelModel {
    pub fn new(kind: Channel) -> Self {
        ChannelModel {
            kind,
            queue: VecDeque::new(),
        }
    }

    pub fn kind(&self) -> Channel {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }
}

/// Channels, transcript log and the adversary attached to attacked sessions.
#[derive(Debug, Clone)]
pub struct Network {
    public: ChannelModel,
    private: ChannelModel,
    live: BTreeSet<Role>,
    log: Vec<Message>,
    attacks: BTreeMap<usize, AdversaryClass>,
    knowledge: Knowledge,
    rng: Rng,
    tamper_bytes: usize,
}

impl Network {
    pub fn new(live: impl IntoIterator<Item = Role>, width: usize, adversary_rng: Rng) -> Self {
        Network {
            public: ChannelModel::new(Channel::Public),
            private: ChannelModel::new(Channel::Private),
            live: live.into_iter().collect(),
            log: Vec::new(),
            attacks: BTreeMap::new(),
            knowledge: Knowledge {
                insider_s: None,
                width,
                observed: Vec::new(),
            },
            rng: adversary_rng,
            tamper_bytes: 1,
        }
    }

    pub fn set_tamper_bytes(&mut self, n: usize) {
        self.tamper_bytes = n.max(1);
    }

    pub fn set_insider_s(&mut self, s: ByteString) {
        self.knowledge.insider_s = Some(s);
    }

    pub fn attack(&mut self, session: usize, class: AdversaryClass) {
        if class == AdversaryClass::None {
            self.attacks.remove(&session);
        } else {
            self.attacks.insert(session, class);
        }
    }

    pub fn knowledge(&self) -> &Knowledge {
        &self.knowledge
    }

    pub fn log(&self) -> &[Message] {
        &self.log
    }

    pub fn into_log(self) -> Vec<Message> {
        self.log
    }

    fn channel_mut(&mut self, kind: Channel) -> &mut ChannelModel {
        match kind {
            Channel::Public => &mut self.public,
            Channel::Private => &mut self.private,
        }
    }

    pub fn pending(&self, kind: Channel) -> usize {
        match kind {
            Channel::Public => self.public.len(),
            Channel::Private => self.private.len(),
        }
    }

    /// Queues `message` on its channel. Fails if nobody lives at `to`.
    pub fn send(&mut self, message: Message) -> Result<()> {
        if !self.live.contains(&message.to) {
            return Err(Error::Routing(message.to));
        }
        self.channel_mut(message.channel).queue.push_back(message);
        Ok(())
    }

    fn record(&mut self, mut message: Message) -> Message {
        message.step = self.log.len() as u64 + 1;
        self.log.push(message.clone());
        message
    }

    /// Pops the oldest message on `kind`, lets the adversary act on it if it
    /// is public, logs it and returns what the recipient actually receives.
    pub fn deliver(&mut self, kind: Channel) -> Result<Option<Message>> {
        let Some(message) = self.channel_mut(kind).queue.pop_front() else {
            return Ok(None);
        };
        if kind == Channel::Private {
            return Ok(Some(self.record(message)));
        }
        let class = message
            .session()
            .and_then(|s| self.attacks.get(&s).copied())
            .unwrap_or_default();
        let altered = apply_adversary(
            class,
            &message,
            &self.knowledge,
            &mut self.rng,
            self.tamper_bytes,
        )?;
        let delivered = match altered {
            None => self.record(message),
            Some(mut copy) => {
                let mut original = message;
                original.annotation = Some(Annotation {
                    class,
                    action: AdversaryAction::Intercepted,
                    source_step: None,
                });
                let original = self.record(original);
                copy.annotation = Some(Annotation {
                    class,
                    action: AdversaryAction::Substituted,
                    source_step: Some(original.step),
                });
                self.record(copy)
            }
        };
        self.knowledge.observed.push(delivered.clone());
        Ok(Some(delivered))
    }

    /// Sends `message` and delivers it straight away.
    pub fn transmit(&mut self, message: Message) -> Result<Message> {
        let kind = message.channel;
        self.send(message)?;
        Ok(self
            .deliver(kind)?
            .expect("channel holds the message just sent"))
    }

    /// Picks one observed genuine access query and re-injects it for the
    /// replaying `session`.
    pub fn replay_query(&mut self, session: usize) -> Result<Message> {
        let candidates: Vec<Message> = self.knowledge.replayable_queries().cloned().collect();
        if candidates.is_empty() {
            return Err(Error::Config(
                "REPLAY_QUERY needs at least one observed genuine access query".into(),
            ));
        }
        let pick = &candidates[self.rng.below(candidates.len())];
        let injected = replay_of(pick, session);
        self.send(injected)?;
        Ok(self
            .deliver(Channel::Public)?
            .expect("channel holds the replayed query"))
    }
}
