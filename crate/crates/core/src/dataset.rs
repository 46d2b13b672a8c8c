//! UCI heart-disease files in their processed 14-attribute form, and the
//! canonical byte encoding of a record used as a protocol payload.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::primitives::{frame_concat, frame_split, ByteString};

pub const ATTRIBUTE_NAMES: [&str; 14] = [
    "age", "sex", "cp", "trestbps", "chol", "fbs", "restecg", "thalach", "exang", "oldpeak",
    "slope", "ca", "thal", "num",
];

const MISSING: &str = "?";

/// Environment variable naming the directory that holds the data files.
pub const DATA_DIR_ENV: &str = "ACSHARE_DATA_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DatasetVariant {
    Cleveland,
    Hungarian,
    Swiss,
}

impl DatasetVariant {
    pub const ALL: [DatasetVariant; 3] = [
        DatasetVariant::Cleveland,
        DatasetVariant::Hungarian,
        DatasetVariant::Swiss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DatasetVariant::Cleveland => "cleveland",
            DatasetVariant::Hungarian => "hungarian",
            DatasetVariant::Swiss => "swiss",
        }
    }

    /// File name used by the UCI repository.
    pub fn file_name(self) -> &'static str {
        match self {
            DatasetVariant::Cleveland => "processed.cleveland.data",
            DatasetVariant::Hungarian => "processed.hungarian.data",
            DatasetVariant::Swiss => "processed.switzerland.data",
        }
    }

    /// Guesses the variant from a file name such as `processed.hungarian.data`.
    pub fn infer(path: &Path) -> Option<DatasetVariant> {
        let name = path.file_name()?.to_string_lossy().to_ascii_lowercase();
        if name.contains("cleveland") {
            Some(DatasetVariant::Cleveland)
        } else if name.contains("hungarian") {
            Some(DatasetVariant::Hungarian)
        } else if name.contains("switzerland") || name.contains("swiss") {
            Some(DatasetVariant::Swiss)
        } else {
            None
        }
    }
}

impl fmt::Display for DatasetVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        DatasetVariant::ALL
            .into_iter()
            .find(|v| v.name() == wanted || (wanted == "switzerland" && *v == DatasetVariant::Swiss))
            .ok_or_else(|| Error::Config(format!("unknown dataset variant {s:?}")))
    }
}

/// Directory searched for data files: `$ACSHARE_DATA_DIR` if set, else
/// `data/` at the workspace root.
pub fn default_data_dir() -> PathBuf {
    match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) => PathBuf::from(dir),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"),
    }
}

pub fn default_path(variant: DatasetVariant) -> PathBuf {
    default_data_dir().join(variant.file_name())
}

/// One row: 14 values, each either a finite decimal or missing.
#[derive(Debug, Clone, PartialEq)]
pub struct HeartRecord {
    pub values: [Option<f64>; 14],
}

impl HeartRecord {
    pub fn get(&self, attribute: &str) -> Option<f64> {
        let i = ATTRIBUTE_NAMES.iter().position(|n| *n == attribute)?;
        self.values[i]
    }

    pub fn age(&self) -> Option<f64> {
        self.values[0]
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

fn parse_value(text: &str) -> std::result::Result<Option<f64>, String> {
    let text = text.trim();
    if text == MISSING {
        return Ok(None);
    }
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(format!("{text:?} is neither a decimal nor \"?\"")),
    }
}

/// Parses comma-separated rows with no header; `"?"` marks a missing value.
/// Blank lines are skipped.
pub fn parse_records(text: &str, path: &Path) -> Result<Vec<HeartRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        if row.len() != ATTRIBUTE_NAMES.len() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected 14 fields, found {}", row.len()),
            });
        }
        let mut values = [None; 14];
        for (i, field) in row.iter().enumerate() {
            values[i] = parse_value(field).map_err(|message| Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("{}: {message}", ATTRIBUTE_NAMES[i]),
            })?;
        }
        records.push(HeartRecord { values });
    }
    Ok(records)
}

/// Reads a processed data file. The variant only labels the data; every
/// variant shares the same format.
pub fn load_dataset(path: &Path, _variant: DatasetVariant) -> Result<Vec<HeartRecord>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    // the Hungarian and Swiss files are plain ASCII; decode leniently anyway
    let text = String::from_utf8_lossy(&bytes);
    parse_records(&text, path)
}

fn render(value: Option<f64>) -> String {
    match value {
        // shortest text that parses back to the same f64
        Some(v) => format!("{v:?}"),
        None => MISSING.to_string(),
    }
}

/// `frame_concat` of the 14 values as decimal text, missing as `"?"`.
pub fn record_to_payload(record: &HeartRecord) -> ByteString {
    let texts: Vec<String> = record.values.iter().map(|v| render(*v)).collect();
    let fields: Vec<&[u8]> = texts.iter().map(|t| t.as_bytes()).collect();
    frame_concat(&fields)
}

pub fn payload_to_record(payload: &[u8]) -> Result<HeartRecord> {
    let fields = frame_split(payload).map_err(|e| Error::Deserialize(e.to_string()))?;
    if fields.len() != ATTRIBUTE_NAMES.len() {
        return Err(Error::Deserialize(format!(
            "expected 14 framed fields, found {}",
            fields.len()
        )));
    }
    let mut values = [None; 14];
    for (i, field) in fields.iter().enumerate() {
        let text = std::str::from_utf8(field)
            .map_err(|_| Error::Deserialize(format!("{} is not UTF-8", ATTRIBUTE_NAMES[i])))?;
        if text != text.trim() {
            return Err(Error::Deserialize(format!("{} has surrounding space", ATTRIBUTE_NAMES[i])));
        }
        values[i] = parse_value(text).map_err(Error::Deserialize)?;
    }
    Ok(HeartRecord { values })
}

/// Payloads for every record of `path`.
pub fn load_payloads(path: &Path, variant: DatasetVariant) -> Result<Vec<ByteString>> {
    Ok(load_dataset(path, variant)?
        .iter()
        .map(record_to_payload)
        .collect())
}

/// Per-attribute count of missing values.
pub fn missing_tally(records: &[HeartRecord]) -> [usize; 14] {
    let mut tally = [0; 14];
    for r in records {
        for (i, v) in r.values.iter().enumerate() {
            if v.is_none() {
                tally[i] += 1;
            }
        }
    }
    tally
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIRST_CLEVELAND: &str = "63.0,1.0,1.0,145.0,233.0,1.0,2.0,150.0,0.0,2.3,3.0,0.0,6.0,0";

    fn p() -> PathBuf {
        PathBuf::from("inline")
    }

    #[test]
    fn parses_first_cleveland_row() {
        let r = &parse_records(FIRST_CLEVELAND, &p()).unwrap()[0];
        assert_eq!(r.age(), Some(63.0));
        assert_eq!(r.get("oldpeak"), Some(2.3));
        assert_eq!(r.get("num"), Some(0.0));
        assert_eq!(r.missing_count(), 0);
    }

    #[test]
    fn golden_payload() {
        // frozen from an independent Python encoder (struct.pack(">I") + repr text)
        let r = &parse_records(FIRST_CLEVELAND, &p()).unwrap()[0];
        assert_eq!(
            record_to_payload(r).to_hex(),
            "0000000436332e3000000003312e3000000003312e30000000053134352e30000000053233332e30\
             00000003312e3000000003322e30000000053135302e3000000003302e3000000003322e33000000\
             03332e3000000003302e3000000003362e3000000003302e30"
        );
    }

    #[test]
    fn missing_is_explicit() {
        let rows = "40.0,1.0,2.0,140.0,0.0,0.0,0.0,172.0,0.0,0.0,?,?,?,0\n";
        let r = &parse_records(rows, &p()).unwrap()[0];
        assert_eq!(r.get("chol"), Some(0.0));
        assert_eq!(r.get("slope"), None);
        assert_eq!(r.missing_count(), 3);
        let back = payload_to_record(&record_to_payload(r)).unwrap();
        assert_eq!(&back, r);
    }

    #[test]
    fn wrong_field_count_names_the_line() {
        let rows = format!("{FIRST_CLEVELAND}\n{FIRST_CLEVELAND}\n1.0,2.0\n");
        match parse_records(&rows, &p()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let bad = "x,1,1,1,1,1,1,1,1,1,1,1,1,1";
        assert!(matches!(parse_records(bad, &p()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn malformed_payloads() {
        assert!(matches!(payload_to_record(&[0, 0, 0, 9, 1]), Err(Error::Deserialize(_))));
        let two = frame_concat(&[b"1.0", b"2.0"]);
        assert!(matches!(payload_to_record(&two), Err(Error::Deserialize(_))));
    }

    #[test]
    fn variants() {
        assert_eq!("Swiss".parse::<DatasetVariant>().unwrap(), DatasetVariant::Swiss);
        assert_eq!(
            DatasetVariant::infer(Path::new("/x/processed.switzerland.data")),
            Some(DatasetVariant::Swiss)
        );
        assert!(DatasetVariant::infer(Path::new("notes.txt")).is_none());
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_dataset(Path::new("/nonexistent/file.data"), DatasetVariant::Cleveland);
        assert!(matches!(err, Err(Error::Io { .. })));
    }
}
