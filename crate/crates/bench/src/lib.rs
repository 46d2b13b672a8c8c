//! Shared inputs for the criterion benchmarks.

use acshare_core::dataset::{parse_records, record_to_payload};
use acshare_core::{ByteString, Rng};
use std::path::Path;

/// `n` record-shaped payloads with seeded values, so the benches run without
/// the UCI files.
pub fn synthetic_payloads(n: usize, seed: u64) -> Vec<ByteString> {
    let mut rng = Rng::new(seed);
    let mut text = String::new();
    for _ in 0..n {
        let row = [
            29 + rng.below(49),
            rng.below(2),
            1 + rng.below(4),
            94 + rng.below(107),
            126 + rng.below(439),
            rng.below(2),
            rng.below(3),
            71 + rng.below(132),
            rng.below(2),
            rng.below(63),
            1 + rng.below(3),
            rng.below(4),
            3 + rng.below(5),
            rng.below(5),
        ];
        let fields: Vec<String> = row.iter().map(|v| format!("{v}.0")).collect();
        text.push_str(&fields.join(","));
        text.push('\n');
    }
    parse_records(&text, Path::new("<synthetic>"))
        .expect("synthetic rows parse")
        .iter()
        .map(record_to_payload)
        .collect()
}

/// Deterministic pair of operands of the given width.
pub fn operands(width: usize, seed: u64) -> (ByteString, ByteString) {
    let mut rng = Rng::new(seed);
    (rng.random_bytes(width), rng.random_bytes(width))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payloads_are_deterministic() {
        assert_eq!(synthetic_payloads(5, 1), synthetic_payloads(5, 1));
        assert_ne!(synthetic_payloads(5, 1), synthetic_payloads(5, 2));
        assert_eq!(synthetic_payloads(7, 0).len(), 7);
    }
}
