//! Stored-state memory accounting, genuine detection rate, and the sweep
//! over datasets and key lengths that produces report rows.

use std::fmt::Write as _;
use std::path::Path;

use crate::entities::{execute, user_id_for, Outcome, Run, Transcript, PASSWORD_WIDTH};
use crate::error::{Error, Result};
use crate::netsim::{AdversaryClass, AdversarySpec, OutcomeSummary, ScenarioConfig};
use crate::primitives::{ByteString, DIGEST_WIDTH};
use crate::protocol::KeyLength;

pub const CSV_HEADER: &str = "dataset,key_length_bits,memory_bytes,genuine_detection_rate,seed";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub dataset: String,
    pub key_length_bits: u32,
    pub memory_bytes: u64,
    pub genuine_detection_rate: f64,
    pub seed: u64,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{:.4},{}",
            self.dataset,
            self.key_length_bits,
            self.memory_bytes,
            self.genuine_detection_rate,
            self.seed
        )
    }
}

/// Bytes held by the cloud store and the KGC after a run.
pub fn measure_memory(run: &Run) -> u64 {
    run.cloud.store().stored_bytes() + run.kgc.stored_bytes()
}

/// Closed-form value of [`measure_memory`] for `config` run over `payloads`,
/// computed from the scenario alone.
///
/// With `L` the key width: the KGC keeps `s, m` plus `U^P, a` for every keyed
/// principal and the owner; the cloud keeps `s, m`, each enrolled
/// `(U_ID, U_ps)`, `U_pk*, a*` for every keyed principal and the owner,
/// `D^C*` (`|D| + L + 8`) and its digest for every keyed user, and `U_sk*`
/// for every user granted access.
pub fn expected_memory(config: &ScenarioConfig, payloads: &[ByteString]) -> u64 {
    let l = config.key_length_bits.width() as u64;
    let classes = config.principals();
    let enrolled: Vec<usize> = (0..classes.len())
        .filter(|&i| classes[i] != AdversaryClass::ReplayQuery)
        .collect();
    let keyed: Vec<usize> = enrolled
        .iter()
        .copied()
        .filter(|&i| classes[i] != AdversaryClass::WrongPassword)
        .collect();
    let granted = keyed
        .iter()
        .filter(|&&i| classes[i] != AdversaryClass::ForgedPrivateKey)
        .count() as u64;
    let key_holders = keyed.len() as u64 + u64::from(!keyed.is_empty());

    let mut total = 2 * l;
    total += key_holders * 2 * l;
    if !enrolled.is_empty() {
        total += 2 * l;
    }
    total += enrolled
        .iter()
        .map(|&i| (user_id_for(i).width() + PASSWORD_WIDTH) as u64)
        .sum::<u64>();
    total += key_holders * 2 * l;
    total += keyed
        .iter()
        .map(|&i| payloads[i % payloads.len()].width() as u64 + l + 8 + DIGEST_WIDTH as u64)
        .sum::<u64>();
    total + granted * l
}

/// Genuine users that completed, over all genuine users.
pub fn genuine_detection_rate(summary: &OutcomeSummary) -> Result<f64> {
    let genuine = summary.genuine();
    if genuine.total == 0 {
        return Err(Error::UndefinedRate);
    }
    Ok(genuine.accepted as f64 / genuine.total as f64)
}

/// Same rate recounted straight from the per-principal outcome records.
pub fn recount_rate(transcript: &Transcript) -> Result<f64> {
    let genuine: Vec<_> = transcript
        .outcomes
        .iter()
        .filter(|o| o.class.is_genuine())
        .collect();
    if genuine.is_empty() {
        return Err(Error::UndefinedRate);
    }
    let complete = genuine
        .iter()
        .filter(|o| o.outcome == Outcome::Accepted)
        .count();
    Ok(complete as f64 / genuine.len() as f64)
}

/// Named payload set for one sweep dataset.
#[derive(Debug, Clone)]
pub struct SweepDataset {
    pub name: String,
    pub payloads: Vec<ByteString>,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub key_lengths: Vec<KeyLength>,
    pub adversaries: Vec<AdversarySpec>,
    pub seeds: Vec<u64>,
    /// Genuine users per cell; `None` means one per payload.
    pub n_genuine: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            key_lengths: KeyLength::ALL.to_vec(),
            adversaries: Vec::new(),
            seeds: vec![0],
            n_genuine: None,
        }
    }
}

/// Scenario run for one sweep cell.
pub fn cell_scenario(
    dataset: &SweepDataset,
    key_length: KeyLength,
    seed: u64,
    sweep: &SweepConfig,
) -> ScenarioConfig {
    ScenarioConfig {
        n_genuine: sweep.n_genuine.unwrap_or(dataset.payloads.len()),
        adversaries: sweep.adversaries.clone(),
        dataset: dataset.name.clone(),
        key_length_bits: key_length,
        seed,
        stale_session_keys: 0,
        tamper_bytes: 1,
    }
}

/// One row per (dataset, key length, seed), in that nesting order.
pub fn run_sweep(datasets: &[SweepDataset], sweep: &SweepConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for dataset in datasets {
        for &key_length in &sweep.key_lengths {
            for &seed in &sweep.seeds {
                let config = cell_scenario(dataset, key_length, seed, sweep);
                let run = execute(&config, &dataset.payloads)?;
                let summary = OutcomeSummary::from_transcript(&run.transcript);
                rows.push(BenchRow {
                    dataset: dataset.name.clone(),
                    key_length_bits: key_length.bits(),
                    memory_bytes: measure_memory(&run),
                    genuine_detection_rate: genuine_detection_rate(&summary)?,
                    seed,
                });
            }
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        writeln!(out, "{}", row.csv_line()).expect("writing to a String");
    }
    out
}

pub fn write_csv(rows: &[BenchRow], path: &Path) -> Result<()> {
    std::fs::write(path, to_csv(rows)).map_err(|e| Error::io(path, e))
}
