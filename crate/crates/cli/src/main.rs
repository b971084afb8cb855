//! `hunch` — the command-line face of the benchmark harness.
//!
//! Three subcommands: `ingest` normalizes or generates datasets, `run`
//! executes the reveal benchmark and reports per-cycle error/timing, and
//! `report` re-renders a CSV report as a table.
//!
//! Settings resolve in precedence order: command-line flags, then
//! `HUNCH_*` environment variables, then the `--config` TOML file, then
//! per-dataset defaults.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error,
//! 4 runtime failure.

use clap::{Parser, Subcommand, ValueEnum};
use hunch_core::datasets::{
    load_car, load_poker, synth_car, synth_poker, ParseMode,
};
use hunch_core::experiments::{
    emit_csv, emit_table, parse_csv, run_car_protocol, run_poker_protocol, CycleReport, MethodId,
    ModeId, ProtocolConfig, ProtocolError, TimingMode,
};
use serde::Deserialize;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser)]
#[command(name = "hunch", version, about = "Incremental-reveal prediction benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a dataset file, or generate a synthetic one.
    ///
    /// SOURCE is a local file path, or one of the generator specs
    /// "synth:car", "synth:poker", "synth:poker:COUNT",
    /// "synth:poker:COUNT:SEED".
    Ingest {
        source: String,
        /// Which parser to use for local files (implied for generators).
        #[arg(long, value_enum)]
        dataset: Option<Dataset>,
        /// Skip malformed lines instead of failing on the first one.
        #[arg(long)]
        lenient: bool,
        /// Write records here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the benchmark and emit a per-cycle report.
    Run {
        #[arg(long, value_enum, env = "HUNCH_DATASET")]
        dataset: Option<Dataset>,
        /// Dataset file to benchmark on; defaults to the synthetic corpus.
        #[arg(long, env = "HUNCH_DATA")]
        data: Option<PathBuf>,
        /// Comma-separated subset of nn,hmm,intuition — or "all".
        #[arg(long, env = "HUNCH_METHODS")]
        methods: Option<String>,
        /// untrained, trained, or "both".
        #[arg(long, env = "HUNCH_MODES")]
        modes: Option<String>,
        #[arg(long, env = "HUNCH_CYCLES")]
        cycles: Option<u32>,
        #[arg(long, env = "HUNCH_SEED")]
        seed: Option<u64>,
        /// Fraction of rows rewritten with never-seen values, in [0, 1].
        #[arg(long, env = "HUNCH_INJECT_FRACTION")]
        inject_fraction: Option<f64>,
        /// Warm-up records per cycle.
        #[arg(long, env = "HUNCH_WARMUP")]
        warmup: Option<usize>,
        /// Evaluation records per cycle.
        #[arg(long, env = "HUNCH_EVAL")]
        eval: Option<usize>,
        #[arg(long, value_enum, env = "HUNCH_FORMAT")]
        format: Option<Format>,
        /// "real" wall-clock timings, or "zero" for byte-reproducible
        /// reports.
        #[arg(long, value_enum, env = "HUNCH_TIMING")]
        timing: Option<Timing>,
        /// TOML file with the same settings as the flags above.
        #[arg(long, env = "HUNCH_CONFIG")]
        config: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-render a CSV report produced by `run`.
    Report {
        csv: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Debug)]
#[serde(rename_all = "lowercase")]
enum Dataset {
    Car,
    Poker,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Debug)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Debug)]
#[serde(rename_all = "lowercase")]
enum Timing {
    Real,
    Zero,
}

/// The `--config` file: every field optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dataset: Option<Dataset>,
    data: Option<PathBuf>,
    methods: Option<String>,
    modes: Option<String>,
    cycles: Option<u32>,
    seed: Option<u64>,
    inject_fraction: Option<f64>,
    warmup: Option<usize>,
    eval: Option<usize>,
    format: Option<Format>,
    timing: Option<Timing>,
    nn_epochs: Option<usize>,
    adjustment_factor: Option<f64>,
    equal_split: Option<bool>,
    deck_change_share: Option<f64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }

    fn usage(message: impl Display) -> Self {
        Self::new(EXIT_USAGE, message)
    }

    fn data(message: impl Display) -> Self {
        Self::new(EXIT_DATA, message)
    }

    fn runtime(message: impl Display) -> Self {
        Self::new(EXIT_RUNTIME, message)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Ingest {
            source,
            dataset,
            lenient,
            out,
        } => ingest(&source, dataset, lenient, out.as_deref()),
        Command::Run {
            dataset,
            data,
            methods,
            modes,
            cycles,
            seed,
            inject_fraction,
            warmup,
            eval,
            format,
            timing,
            config,
            out,
        } => {
            let file = match &config {
                Some(path) => load_file_config(path)?,
                None => FileConfig::default(),
            };
            run(RunSettings {
                dataset: dataset.or(file.dataset),
                data: data.or(file.data),
                methods: methods.or(file.methods),
                modes: modes.or(file.modes),
                cycles: cycles.or(file.cycles),
                seed: seed.or(file.seed),
                inject_fraction: inject_fraction.or(file.inject_fraction),
                warmup: warmup.or(file.warmup),
                eval: eval.or(file.eval),
                format: format.or(file.format),
                timing: timing.or(file.timing),
                nn_epochs: file.nn_epochs,
                adjustment_factor: file.adjustment_factor,
                equal_split: file.equal_split,
                deck_change_share: file.deck_change_share,
                out,
            })
        }
        Command::Report { csv, format, out } => report(&csv, format, out.as_deref()),
    }
}

fn looks_like_url(source: &str) -> bool {
    let lower = source.to_ascii_lowercase();
    ["http://", "https://", "ftp://"]
        .iter()
        .any(|p| lower.starts_with(p))
}

fn ingest(
    source: &str,
    dataset: Option<Dataset>,
    lenient: bool,
    out: Option<&Path>,
) -> Result<(), Failure> {
    if looks_like_url(source) {
        return Err(Failure::usage(format!(
            "network sources are not supported ({source}); download the file and pass a local path"
        )));
    }

    let (lines, skipped): (Vec<String>, usize) = if let Some(spec) = source.strip_prefix("synth:")
    {
        let mut parts = spec.split(':');
        match parts.next() {
            Some("car") => {
                if parts.next().is_some() {
                    return Err(Failure::usage(
                        "synth:car takes no parameters (the corpus is the full factorial)",
                    ));
                }
                (synth_car().iter().map(|r| r.to_line()).collect(), 0)
            }
            Some("poker") => {
                let n: usize = match parts.next() {
                    None => 10_000,
                    Some(v) => v
                        .parse()
                        .map_err(|_| Failure::usage(format!("bad record count {v:?}")))?,
                };
                let seed: u64 = match parts.next() {
                    None => 424_242,
                    Some(v) => v
                        .parse()
                        .map_err(|_| Failure::usage(format!("bad seed {v:?}")))?,
                };
                if parts.next().is_some() {
                    return Err(Failure::usage("too many parameters in generator spec"));
                }
                (
                    synth_poker(n, seed).iter().map(|r| r.to_line()).collect(),
                    0,
                )
            }
            other => {
                return Err(Failure::usage(format!(
                    "unknown generator {other:?}; expected synth:car or synth:poker[:COUNT[:SEED]]"
                )))
            }
        }
    } else {
        let dataset = dataset.ok_or_else(|| {
            Failure::usage("--dataset {car|poker} is required when ingesting a local file")
        })?;
        let mode = if lenient {
            ParseMode::Lenient
        } else {
            ParseMode::Strict
        };
        match dataset {
            Dataset::Car => {
                let report = load_car(Path::new(source), mode).map_err(Failure::data)?;
                (
                    report.records.iter().map(|r| r.to_line()).collect(),
                    report.skipped.len(),
                )
            }
            Dataset::Poker => {
                let report = load_poker(Path::new(source), mode).map_err(Failure::data)?;
                (
                    report.records.iter().map(|r| r.to_line()).collect(),
                    report.skipped.len(),
                )
            }
        }
    };

    let mut body = lines.join("\n");
    if !body.is_empty() {
        body.push('\n');
    }
    write_output(out, &body)?;
    eprintln!("wrote {} records ({} skipped)", lines.len(), skipped);
    Ok(())
}

struct RunSettings {
    dataset: Option<Dataset>,
    data: Option<PathBuf>,
    methods: Option<String>,
    modes: Option<String>,
    cycles: Option<u32>,
    seed: Option<u64>,
    inject_fraction: Option<f64>,
    warmup: Option<usize>,
    eval: Option<usize>,
    format: Option<Format>,
    timing: Option<Timing>,
    nn_epochs: Option<usize>,
    adjustment_factor: Option<f64>,
    equal_split: Option<bool>,
    deck_change_share: Option<f64>,
    out: Option<PathBuf>,
}

fn load_file_config(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| Failure::usage(format!("bad config {}: {e}", path.display())))
}

fn parse_methods(spec: &str) -> Result<Vec<MethodId>, Failure> {
    if spec.trim() == "all" {
        return Ok(MethodId::ALL.to_vec());
    }
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            MethodId::parse(s)
                .ok_or_else(|| Failure::usage(format!("unknown method {s:?} (nn, hmm, intuition)")))
        })
        .collect()
}

fn parse_modes(spec: &str) -> Result<Vec<ModeId>, Failure> {
    if spec.trim() == "both" {
        return Ok(ModeId::ALL.to_vec());
    }
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            ModeId::parse(s)
                .ok_or_else(|| Failure::usage(format!("unknown mode {s:?} (untrained, trained)")))
        })
        .collect()
}

fn run(s: RunSettings) -> Result<(), Failure> {
    let dataset = s
        .dataset
        .ok_or_else(|| Failure::usage("--dataset {car|poker} is required"))?;
    let seed = s.seed.unwrap_or(1);
    let mut cfg = match dataset {
        Dataset::Car => ProtocolConfig::car_defaults(seed),
        Dataset::Poker => ProtocolConfig::poker_defaults(seed),
    };
    if let Some(methods) = &s.methods {
        cfg.methods = parse_methods(methods)?;
    }
    if let Some(modes) = &s.modes {
        cfg.modes = parse_modes(modes)?;
    }
    if let Some(cycles) = s.cycles {
        cfg.cycles = cycles;
    }
    if let Some(f) = s.inject_fraction {
        cfg.inject_fraction = f;
    }
    if let Some(w) = s.warmup {
        cfg.warmup_per_cycle = w;
    }
    if let Some(e) = s.eval {
        cfg.eval_per_cycle = e;
    }
    if let Some(epochs) = s.nn_epochs {
        cfg.nn.epochs = epochs;
    }
    if let Some(adj) = s.adjustment_factor {
        cfg.intuition.adjustment_factor = adj;
    }
    if let Some(eq) = s.equal_split {
        cfg.equal_split = eq;
    }
    if let Some(share) = s.deck_change_share {
        cfg.deck_change_share = share;
    }
    cfg.timing = match s.timing.unwrap_or(Timing::Real) {
        Timing::Real => TimingMode::Real,
        Timing::Zero => TimingMode::Zero,
    };

    let reports = match dataset {
        Dataset::Car => {
            let records = match &s.data {
                Some(path) => {
                    load_car(path, ParseMode::Strict)
                        .map_err(Failure::data)?
                        .records
                }
                None => synth_car(),
            };
            run_car_protocol(&records, &cfg).map_err(protocol_failure)?
        }
        Dataset::Poker => {
            let records = match &s.data {
                Some(path) => {
                    load_poker(path, ParseMode::Strict)
                        .map_err(Failure::data)?
                        .records
                }
                None => synth_poker(30_000, 424_242),
            };
            run_poker_protocol(&records, &cfg).map_err(protocol_failure)?
        }
    };

    emit(&reports, s.format.unwrap_or(Format::Csv), s.out.as_deref())
}

fn protocol_failure(e: ProtocolError) -> Failure {
    match e {
        ProtocolError::BadConfig(_) => Failure::usage(e),
        ProtocolError::NotEnoughRecords { .. } | ProtocolError::Data(_) => Failure::data(e),
        other => Failure::runtime(other),
    }
}

fn report(csv: &Path, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(csv)
        .map_err(|e| Failure::data(format!("cannot read {}: {e}", csv.display())))?;
    let reports = parse_csv(&text).map_err(Failure::data)?;
    emit(&reports, format, out)
}

fn emit(reports: &[CycleReport], format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let body = match format {
        Format::Csv => emit_csv(reports),
        Format::Table => emit_table(reports),
    };
    write_output(out, &body)
}

fn write_output(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
