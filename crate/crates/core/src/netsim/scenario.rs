use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::entities::{run_protocol, Outcome, Transcript};
use crate::error::{Error, Result};
use crate::primitives::ByteString;
use crate::protocol::KeyLength;

use super::AdversaryClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySpec {
    pub class: AdversaryClass,
    pub count: usize,
}

fn one() -> usize {
    1
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

fn is_one(n: &usize) -> bool {
    *n == 1
}

/// Population and parameters of one run. Loaded from JSON; the last two
/// fields are optional.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_genuine: usize,
    #[serde(default)]
    pub adversaries: Vec<AdversarySpec>,
    #[serde(default)]
    pub dataset: String,
    pub key_length_bits: KeyLength,
    #[serde(default)]
    pub seed: u64,
    /// Genuine users whose session key the KGC rotates at the cloud only,
    /// just before validation.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub stale_session_keys: usize,
    /// Bytes flipped by each tampering adversary.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub tamper_bytes: usize,
}

impl ScenarioConfig {
    pub fn honest(n_genuine: usize, key_length_bits: KeyLength, seed: u64) -> Self {
        ScenarioConfig {
            n_genuine,
            adversaries: Vec::new(),
            dataset: String::new(),
            key_length_bits,
            seed,
            stale_session_keys: 0,
            tamper_bytes: 1,
        }
    }

    pub fn with_adversary(mut self, class: AdversaryClass, count: usize) -> Self {
        self.adversaries.push(AdversarySpec { class, count });
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ScenarioConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("invalid scenario: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads and validates a scenario file. A missing or unreadable file is
    /// reported as a configuration error.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read scenario {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Class of every principal in run order: genuine users first, then each
    /// adversary group in listed order.
    pub fn principals(&self) -> Vec<AdversaryClass> {
        let mut out = vec![AdversaryClass::None; self.n_genuine];
        for spec in &self.adversaries {
            out.extend(std::iter::repeat(spec.class).take(spec.count));
        }
        out
    }

    pub fn genuine_count(&self) -> usize {
        self.principals().iter().filter(|c| c.is_genuine()).count()
    }

    pub fn validate(&self) -> Result<()> {
        if self.tamper_bytes == 0 {
            return Err(Error::Config("tamper_bytes must be at least 1".into()));
        }
        let genuine = self.genuine_count();
        if self.stale_session_keys > genuine {
            return Err(Error::Config(format!(
                "stale_session_keys ({}) exceeds the {genuine} genuine users",
                self.stale_session_keys
            )));
        }
        let replayers = self
            .principals()
            .iter()
            .filter(|c| **c == AdversaryClass::ReplayQuery)
            .count();
        if replayers > 0 && genuine == 0 {
            return Err(Error::Config(
                "REPLAY_QUERY needs at least one genuine user to eavesdrop on".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub total: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub integrity_failure: usize,
}

/// Outcome counts per adversary class, in class order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OutcomeSummary {
    pub classes: BTreeMap<AdversaryClass, ClassCounts>,
}

impl OutcomeSummary {
    pub fn from_transcript(transcript: &Transcript) -> Self {
        let mut classes: BTreeMap<AdversaryClass, ClassCounts> = BTreeMap::new();
        for record in &transcript.outcomes {
            let counts = classes.entry(record.class).or_default();
            counts.total += 1;
            match record.outcome {
                Outcome::Accepted => counts.accepted += 1,
                Outcome::Rejected { .. } => counts.rejected += 1,
                Outcome::IntegrityFailure => counts.integrity_failure += 1,
            }
        }
        OutcomeSummary { classes }
    }

    pub fn get(&self, class: AdversaryClass) -> ClassCounts {
        self.classes.get(&class).copied().unwrap_or_default()
    }

    pub fn genuine(&self) -> ClassCounts {
        self.get(AdversaryClass::None)
    }
}

impl fmt::Display for OutcomeSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (class, c) in &self.classes {
            writeln!(
                f,
                "{class}: ACCEPTED {}/{t} REJECTED {}/{t} INTEGRITY_FAILURE {}/{t}",
                c.accepted,
                c.rejected,
                c.integrity_failure,
                t = c.total
            )?;
        }
        Ok(())
    }
}

/// Runs every principal of `config` through the protocol, cycling through
/// `payloads`, and tallies outcomes per class.
pub fn run_scenario(
    config: &ScenarioConfig,
    payloads: &[ByteString],
) -> Result<(Transcript, OutcomeSummary)> {
    let transcript = run_protocol(config, payloads)?;
    let summary = OutcomeSummary::from_transcript(&transcript);
    Ok((transcript, summary))
}
