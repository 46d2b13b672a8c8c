//! Simulation of a KGC-mediated access-control and data-sharing protocol
//! between a user, a data owner and a cloud server, with a deterministic
//! adversarial network and a memory/detection benchmark over the UCI
//! heart-disease data.

pub mod bench;
pub mod dataset;
pub mod entities;
mod error;
pub mod netsim;
pub mod primitives;
pub mod protocol;

pub use entities::{
    execute, run_protocol, AgentPhase, Message, MessageKind, Outcome, Phase, Role, Run,
    Simulation, Transcript,
};
pub use error::{Error, Result};
pub use netsim::{run_scenario, AdversaryClass, AdversarySpec, Channel, OutcomeSummary, ScenarioConfig};
pub use primitives::{ByteString, Rng};
pub use protocol::{Credentials, KeyLength, SystemParams};
