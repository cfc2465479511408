//! Batch verification harness: configuration, dispatch and reports.

pub mod config;
pub mod experiments;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

pub use config::{Command, RunConfig, Setup};
pub use experiments::execute;
pub use report::{emit_report, summarize, ReportFormat, ReportRow, Summary};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hls_core::HlsError),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Args(#[from] clap::Error),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "hls",
    about = "Numerical checks for fractional integrals on the Heisenberg group",
    override_usage = "hls [COMMAND] [--config FILE] [--key value]...",
    after_help = "Config:\n  --config <FILE>  JSON config document\n  --<key> <value>  override a top-level config key (value parsed as JSON, else taken as a string)\n\nHLS_THREADS caps the worker count (0 = automatic)."
)]
struct Args {
    /// Experiment to run; may also come from the config's "command" key.
    command: Option<Command>,
}

fn is_help(arg: &OsString) -> bool {
    matches!(arg.to_str(), Some("-h" | "--help" | "-V" | "--version"))
}

fn pair_overrides(raw: &[String]) -> Result<Vec<(String, String)>, CliError> {
    if !raw.len().is_multiple_of(2) {
        return Err(CliError::Usage(format!("override flags come in '--key value' pairs, got {raw:?}")));
    }
    raw.chunks(2)
        .map(|kv| match kv[0].strip_prefix("--") {
            Some(key) if !key.is_empty() => Ok((key.to_string(), kv[1].clone())),
            _ => Err(CliError::Usage(format!("expected --key, got {}", kv[0]))),
        })
        .collect()
}

/// Builds the config from command-line arguments (program name first):
/// `hls [COMMAND] [--config FILE] [--key value]...`.
pub fn parse_args<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let split = match argv.get(1) {
        Some(a) if !a.to_string_lossy().starts_with('-') => 2,
        _ => 1,
    };
    let (head, rest) = argv.split_at(split.min(argv.len()));
    let mut clap_args = head.to_vec();
    clap_args.extend(rest.iter().filter(|a| is_help(a)).cloned());
    let parsed = Args::try_parse_from(clap_args)?;

    let rest = rest
        .iter()
        .map(|a| a.clone().into_string().map_err(|_| CliError::Usage("arguments must be UTF-8".into())))
        .collect::<Result<Vec<_>, _>>()?;
    let mut config = None;
    let mut overrides = Vec::new();
    for (key, value) in pair_overrides(&rest)? {
        if key == "config" {
            config = Some(PathBuf::from(value));
        } else {
            overrides.push((key, value));
        }
    }
    if let Some(cmd) = parsed.command {
        overrides.retain(|(k, _)| k != "command");
        overrides.push(("command".into(), cmd.name().into()));
    }
    RunConfig::load(config.as_deref(), &overrides)
}

#[derive(Debug)]
pub struct Outcome {
    pub rows: Vec<ReportRow>,
    pub exit_code: i32,
}

/// Runs the configured experiment and writes its reports: CSV and summary
/// to `output` and `output.summary.json`, or CSV to stdout and the summary
/// to stderr when no output is set.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = execute(cfg)?;
    if rows.is_empty() {
        return Err(CliError::Usage("experiment produced no rows".into()));
    }
    match &cfg.output {
        Some(path) => {
            emit_report(&rows, ReportFormat::Csv, path)?;
            emit_report(&rows, ReportFormat::Json, &report::summary_path(path))?;
        }
        None => {
            let csv = report::csv_string(&rows)?;
            std::io::stdout().write_all(csv.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
            eprint!("{}", report::summary_json(&rows)?);
        }
    }
    let exit_code = if rows.iter().all(|r| r.pass) { EXIT_PASS } else { EXIT_VIOLATION };
    Ok(Outcome { rows, exit_code })
}
