//! The four protocol agents (user, data owner, cloud server, KGC), the
//! messages they exchange, and the driver that runs the six phases in order
//! over the simulated network.

mod agents;
mod message;
mod simulation;

use std::fmt;

use serde::Serialize;

pub use agents::{
    CloudServer, CloudStore, DataOwner, IssuedKey, Kgc, StoredCiphertext, StoredPrincipal, User,
    OWNER_ID,
};
pub use message::{
    AdversaryAction, Annotation, Message, MessageKind, Outcome, Phase, PrincipalOutcome,
    Transcript,
};
pub use simulation::{execute, run_protocol, user_id_for, Run, Simulation, PASSWORD_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Role {
    User,
    Owner,
    Cloud,
    Kgc,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::User => "USER",
            Role::Owner => "OWNER",
            Role::Cloud => "CLOUD",
            Role::Kgc => "KGC",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Lifecycle of an agent. Non-terminal phases advance one step at a time in
/// protocol order; `Rejected` can be entered from any non-terminal phase and
/// is final.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AgentPhase {
    Init,
    Registered,
    Keyed,
    Encrypted,
    AccessGranted,
    Verified,
    Complete,
    Rejected,
}

impl AgentPhase {
    pub fn next(self) -> Option<AgentPhase> {
        use AgentPhase::*;
        match self {
            Init => Some(Registered),
            Registered => Some(Keyed),
            Keyed => Some(Encrypted),
            Encrypted => Some(AccessGranted),
            AccessGranted => Some(Verified),
            Verified => Some(Complete),
            Complete | Rejected => None,
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, AgentPhase::Complete | AgentPhase::Rejected)
    }

    pub fn as_str(self) -> &'static str {
        use AgentPhase::*;
        match self {
            Init => "INIT",
            Registered => "REGISTERED",
            Keyed => "KEYED",
            Encrypted => "ENCRYPTED",
            AccessGranted => "ACCESS_GRANTED",
            Verified => "VERIFIED",
            Complete => "COMPLETE",
            Rejected => "REJECTED",
        }
    }
}

impl fmt::Display for AgentPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_chain_is_linear() {
        let mut p = AgentPhase::Init;
        let mut seen = vec![p];
        while let Some(n) = p.next() {
            assert!(n > p);
            seen.push(n);
            p = n;
        }
        assert_eq!(p, AgentPhase::Complete);
        assert_eq!(seen.len(), 7);
        assert!(AgentPhase::Rejected.next().is_none());
    }
}
