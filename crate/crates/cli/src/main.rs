//! `acshare`: run the protocol simulator from the command line.
//!
//! Exit codes: 0 success, 2 configuration or parse error, 3 protocol
//! rejection, 4 I/O error. Every failure prints one `error[TOKEN]: ...` line
//! on stderr.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acshare_core::bench::{run_sweep, to_csv, write_csv, SweepConfig, SweepDataset};
use acshare_core::dataset::{
    default_path, load_dataset, missing_tally, parse_records, record_to_payload, DatasetVariant,
    ATTRIBUTE_NAMES,
};
use acshare_core::{
    execute, AdversaryClass, AdversarySpec, ByteString, Error, KeyLength, Outcome, OutcomeSummary,
    Phase, ScenarioConfig,
};
use clap::{Args, Parser, Subcommand};

/// First row of the processed Cleveland file, used when no dataset is given.
const SAMPLE_RECORD: &str = "63.0,1.0,1.0,145.0,233.0,1.0,2.0,150.0,0.0,2.3,3.0,0.0,6.0,0";

#[derive(Debug, Parser)]
#[command(name = "acshare", version, about = "KGC-mediated access control and data sharing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one user, the owner and one payload through all six phases.
    Demo(DemoArgs),
    /// Execute a scenario file and print the per-class outcome summary.
    Run(RunArgs),
    /// Sweep datasets x key lengths and write the benchmark CSV.
    Bench(BenchArgs),
    /// Parse a heart-disease data file and report missing values.
    ParseDataset(ParseArgs),
}

#[derive(Debug, Args)]
struct DemoArgs {
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Key length in bits: 64, 128, 256 or 512.
    #[arg(long, default_value = "256", value_parser = parse_key_length)]
    key_length: KeyLength,
    /// Take the payload from the first record of this file (PATH, VARIANT or VARIANT=PATH).
    #[arg(long)]
    dataset: Option<String>,
    /// Make the demo user an adversary, e.g. WRONG_PASSWORD=1. Repeatable.
    #[arg(long, value_parser = parse_adversary)]
    adversary: Vec<AdversarySpec>,
    /// Also write the JSON-lines transcript here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Override the scenario's seed [default: the scenario's, else 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario's key length in bits.
    #[arg(long, value_parser = parse_key_length)]
    key_length: Option<KeyLength>,
    /// Payload source (PATH, VARIANT or VARIANT=PATH) [default: the scenario's dataset, else a built-in record].
    #[arg(long)]
    dataset: Option<String>,
    /// Extra adversaries added to the scenario, CLASS=COUNT. Repeatable.
    #[arg(long, value_parser = parse_adversary)]
    adversary: Vec<AdversarySpec>,
    /// Transcript output (JSON lines).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// RNG seed for every cell.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict the sweep to one key length [default: 64, 128, 256 and 512].
    #[arg(long, value_parser = parse_key_length)]
    key_length: Option<KeyLength>,
    /// Dataset to include (PATH, VARIANT or VARIANT=PATH). Repeatable
    /// [default: cleveland, hungarian and swiss from the data directory].
    #[arg(long)]
    dataset: Vec<String>,
    /// Adversaries added to every cell, CLASS=COUNT. Repeatable.
    #[arg(long, value_parser = parse_adversary)]
    adversary: Vec<AdversarySpec>,
    /// CSV output [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ParseArgs {
    /// File to parse (PATH, VARIANT or VARIANT=PATH) [default: cleveland].
    #[arg(long)]
    dataset: Option<String>,
}

/// Reason a command stopped, mapped to an exit code and a stderr token.
#[derive(Debug)]
enum Failure {
    Config(String),
    Parse(String),
    Rejected(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Parse(_) => 2,
            Failure::Rejected(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn token(&self) -> &'static str {
        match self {
            Failure::Config(_) => "config",
            Failure::Parse(_) => "parse",
            Failure::Rejected(_) => "rejected",
            Failure::Io(_) => "io",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Parse(m) | Failure::Rejected(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => Failure::Io(e.to_string()),
            Error::Parse { .. } | Error::Deserialize(_) => Failure::Parse(e.to_string()),
            Error::Config(_) | Error::UndefinedRate => Failure::Config(e.to_string()),
            other => Failure::Rejected(other.to_string()),
        }
    }
}

fn parse_key_length(s: &str) -> Result<KeyLength, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_adversary(s: &str) -> Result<AdversarySpec, String> {
    let (class, count) = s
        .split_once('=')
        .ok_or_else(|| format!("expected CLASS=COUNT, got {s:?}"))?;
    let class: AdversaryClass = class.parse().map_err(|e: Error| e.to_string())?;
    let count = count
        .trim()
        .parse()
        .map_err(|_| format!("adversary count {count:?} is not a non-negative integer"))?;
    Ok(AdversarySpec { class, count })
}

/// A `--dataset` value resolved to a file.
#[derive(Debug)]
struct DatasetSource {
    name: String,
    path: PathBuf,
}

impl DatasetSource {
    fn resolve(arg: &str) -> Result<Self, Failure> {
        if let Some((variant, path)) = arg.split_once('=') {
            let variant: DatasetVariant = variant.parse()?;
            return Ok(DatasetSource {
                name: variant.name().to_string(),
                path: PathBuf::from(path),
            });
        }
        let path = Path::new(arg);
        if !path.exists() {
            if let Ok(variant) = arg.parse::<DatasetVariant>() {
                return Ok(Self::variant(variant));
            }
        }
        let name = match DatasetVariant::infer(path) {
            Some(v) => v.name().to_string(),
            None => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| arg.to_string()),
        };
        Ok(DatasetSource {
            name,
            path: path.to_path_buf(),
        })
    }

    fn variant(variant: DatasetVariant) -> Self {
        DatasetSource {
            name: variant.name().to_string(),
            path: default_path(variant),
        }
    }

    fn payloads(&self) -> Result<Vec<ByteString>, Failure> {
        // the variant only labels the file; parsing is identical for all three
        let records = load_dataset(&self.path, DatasetVariant::Cleveland)?;
        Ok(records.iter().map(record_to_payload).collect())
    }
}

fn sample_payload() -> ByteString {
    let records = parse_records(SAMPLE_RECORD, Path::new("<sample>")).expect("sample record parses");
    record_to_payload(&records[0])
}

fn cmd_demo(args: DemoArgs) -> Result<(), Failure> {
    let payload = match &args.dataset {
        Some(arg) => DatasetSource::resolve(arg)?
            .payloads()?
            .into_iter()
            .next()
            .ok_or_else(|| Failure::Config("dataset has no records".into()))?,
        None => sample_payload(),
    };
    let mut config = ScenarioConfig::honest(1, args.key_length, args.seed);
    if args.adversary.iter().any(|a| a.count > 0) {
        config.n_genuine = 0;
        config.adversaries = args.adversary;
    }
    let run = execute(&config, std::slice::from_ref(&payload))?;
    let transcript = &run.transcript;
    if let Some(out) = &args.out {
        transcript.write_json_lines(out)?;
    }

    let mut stdout = std::io::stdout().lock();
    let mut lines = format!(
        "demo: {} principal(s), {}-bit keys, seed {}, payload {} bytes\n",
        config.principals().len(),
        args.key_length,
        args.seed,
        payload.width()
    );
    for (i, phase) in Phase::ALL.into_iter().enumerate() {
        lines.push_str(&format!("== phase {}/6: {phase} ==\n", i + 1));
        let mut any = false;
        for m in transcript.messages.iter().filter(|m| m.phase == phase) {
            any = true;
            let note = match &m.annotation {
                Some(a) => format!("  [{} {:?}]", a.class, a.action),
                None => String::new(),
            };
            lines.push_str(&format!(
                "  #{:<3} {} -> {} ({:?}) {}{note}\n",
                m.step, m.from, m.to, m.channel, m.kind
            ));
        }
        if !any {
            lines.push_str("  (no messages)\n");
        }
    }
    let mut rejected = Vec::new();
    for o in &transcript.outcomes {
        let id = String::from_utf8_lossy(o.user_id.as_bytes());
        lines.push_str(&format!("{id} ({}): {}\n", o.class, o.outcome));
        if o.outcome != Outcome::Accepted {
            rejected.push(format!("{id}: {}", o.outcome));
        }
    }
    if rejected.is_empty() {
        lines.push_str("COMPLETE\n");
    }
    stdout
        .write_all(lines.as_bytes())
        .map_err(|e| Failure::Io(format!("stdout: {e}")))?;
    if rejected.is_empty() {
        Ok(())
    } else {
        Err(Failure::Rejected(rejected.join("; ")))
    }
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let mut config = ScenarioConfig::from_path(&args.scenario)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(k) = args.key_length {
        config.key_length_bits = k;
    }
    config.adversaries.extend(args.adversary);

    let source = match (&args.dataset, config.dataset.is_empty()) {
        (Some(arg), _) => Some(DatasetSource::resolve(arg)?),
        (None, false) => Some(DatasetSource::resolve(&config.dataset)?),
        (None, true) => None,
    };
    let payloads = match &source {
        Some(s) => s.payloads()?,
        None => vec![sample_payload()],
    };
    let run = execute(&config, &payloads)?;
    if let Some(out) = &args.out {
        run.transcript.write_json_lines(out)?;
    }
    let summary = OutcomeSummary::from_transcript(&run.transcript);
    print!("{summary}");
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let sources = if args.dataset.is_empty() {
        DatasetVariant::ALL.into_iter().map(DatasetSource::variant).collect()
    } else {
        args.dataset
            .iter()
            .map(|a| DatasetSource::resolve(a))
            .collect::<Result<Vec<_>, _>>()?
    };
    let mut datasets = Vec::with_capacity(sources.len());
    for source in &sources {
        datasets.push(SweepDataset {
            name: source.name.clone(),
            payloads: source.payloads()?,
        });
    }
    let sweep = SweepConfig {
        key_lengths: match args.key_length {
            Some(k) => vec![k],
            None => KeyLength::ALL.to_vec(),
        },
        adversaries: args.adversary,
        seeds: vec![args.seed],
        n_genuine: None,
    };
    let rows = run_sweep(&datasets, &sweep)?;
    match &args.out {
        Some(out) => {
            write_csv(&rows, out)?;
            println!("wrote {} rows to {}", rows.len(), out.display());
        }
        None => print!("{}", to_csv(&rows)),
    }
    Ok(())
}

fn cmd_parse_dataset(args: ParseArgs) -> Result<(), Failure> {
    let source = match &args.dataset {
        Some(arg) => DatasetSource::resolve(arg)?,
        None => DatasetSource::variant(DatasetVariant::Cleveland),
    };
    let records = load_dataset(&source.path, DatasetVariant::Cleveland)?;
    let mut out = format!("{}: {} records\n", source.path.display(), records.len());
    for (name, n) in ATTRIBUTE_NAMES.iter().zip(missing_tally(&records)) {
        out.push_str(&format!("  {name:<9} {n} missing\n"));
    }
    print!("{out}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error[config]: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Demo(a) => cmd_demo(a),
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
        Command::ParseDataset(a) => cmd_parse_dataset(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.token(), f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
