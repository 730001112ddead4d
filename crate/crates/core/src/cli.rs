//! Command-line frontend: flags, message ingestion, orchestration and the
//! exit-code policy (0 clean, 1 problems found, 2 usage or input error).

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::entities::{load_lexicons, Extractor};
use crate::error::CsvError;
use crate::lint::{LintOptions, Linter};
use crate::message::{ParsedMessage, RawMessage, Source};
use crate::report::{render, RenderOptions, Report};
use crate::rules::{apply_overlay, default_ruleset, parse_config, EntityMap};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROBLEMS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Directory of replacement lexicon files (`action.txt`, `flaw.txt`, ...).
pub const LEXICON_DIR_ENV: &str = "SECOMLINT_LEXICON_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Lint security commit messages against the SECOM convention.
///
/// Reads one message from standard input, e.g. `git log -1 --pretty=%B | secomlint`,
/// or a batch of messages from a CSV file.
#[derive(Debug, Clone, Parser)]
#[command(name = "secomlint", version)]
pub struct CliOptions {
    /// YAML file overriding rule `active`, `type` and `value` settings.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Append the compliance score to the summary line.
    #[arg(long)]
    pub score: bool,
    /// Only show rules the message does not comply with.
    #[arg(long)]
    pub no_compliance: bool,
    /// Also report whether the body carries security vocabulary.
    #[arg(long)]
    pub is_body_informative: bool,
    /// Lint every message in a CSV file instead of reading standard input.
    #[arg(long, value_name = "PATH")]
    pub from_file: Option<PathBuf>,
    /// CSV column holding the messages.
    #[arg(long, value_name = "NAME", default_value = "message")]
    pub message_column: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Use `ok`/`not ok` instead of check marks.
    #[arg(long)]
    pub no_unicode: bool,
}

/// Process environment handed to [`run`].
pub struct Env<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdin_is_terminal: bool,
    pub stdout: &'a mut dyn Write,
    pub stdout_is_terminal: bool,
    pub stderr: &'a mut dyn Write,
    pub lexicon_dir: Option<PathBuf>,
}

/// 0 when no message has a problem, 1 otherwise.
pub fn exit_code(reports: &[Report]) -> i32 {
    if reports.iter().all(|r| r.problems == 0) {
        EXIT_OK
    } else {
        EXIT_PROBLEMS
    }
}

/// Text appended by `--is-body-informative`.
pub fn lint_is_body_informative(parsed: &ParsedMessage, entities: &EntityMap) -> &'static str {
    let body = entities
        .get(&crate::message::SectionKind::Body)
        .map_or(&[][..], Vec::as_slice);
    if !parsed.body.is_empty() && crate::entities::body_is_informative(body) {
        crate::report::BODY_INFORMATIVE
    } else {
        crate::report::BODY_NOT_INFORMATIVE
    }
}

// Scans for a quoted field left open at end of input, which the csv reader
// would otherwise accept silently.
fn check_quotes(text: &str) -> Result<(), CsvError> {
    let mut line: u64 = 1;
    let mut field_start = true;
    let mut open_at: Option<u64> = None;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match (open_at, c) {
            (Some(_), '"') if chars.peek() == Some(&'"') => {
                chars.next();
            }
            (Some(_), '"') => {
                open_at = None;
                field_start = false;
            }
            (None, '"') if field_start => {
                open_at = Some(line);
            }
            (_, '\n') => {
                line += 1;
                field_start = open_at.is_none();
            }
            (None, ',') => field_start = true,
            (None, _) => field_start = false,
            (Some(_), _) => {}
        }
    }
    match open_at {
        Some(line) => Err(CsvError::MalformedCsv {
            line,
            reason: "unterminated quoted field".to_string(),
        }),
        None => Ok(()),
    }
}

/// Parses RFC 4180 CSV text with a header row and returns the cells of
/// `column` as messages.
pub fn parse_messages_csv(text: &str, column: &str) -> Result<Vec<RawMessage>, CsvError> {
    check_quotes(text)?;
    let malformed = |e: csv::Error| CsvError::MalformedCsv {
        line: e.position().map_or(0, |p| p.line()),
        reason: match e.kind() {
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => format!("expected {expected_len} fields, found {len}"),
            _ => e.to_string(),
        },
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(malformed)?;
    let index = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| CsvError::MissingColumn(column.to_string()))?;
    reader
        .records()
        .enumerate()
        .map(|(row, record)| {
            let record = record.map_err(malformed)?;
            Ok(RawMessage::new(
                record.get(index).unwrap_or_default(),
                Source::CsvRow(row),
            ))
        })
        .collect()
}

pub fn read_messages_csv(path: &Path, column: &str) -> Result<Vec<RawMessage>, CsvError> {
    let bytes = std::fs::read(path).map_err(|err| CsvError::Io {
        path: path.to_path_buf(),
        err,
    })?;
    let text = String::from_utf8(bytes).map_err(|e| CsvError::MalformedCsv {
        line: 0,
        reason: format!("not UTF-8: {e}"),
    })?;
    parse_messages_csv(&text, column)
}

#[derive(Serialize)]
struct JsonReport<'a> {
    source: Source,
    #[serde(flatten)]
    report: &'a Report,
}

struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn build_linter(opts: &CliOptions, lexicon_dir: Option<&Path>) -> Result<Linter, UsageError> {
    let mut ruleset = default_ruleset();
    if let Some(path) = &opts.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        ruleset = apply_overlay(&ruleset, &parse_config(&text)?);
    }
    let lexicons = load_lexicons(lexicon_dir)?;
    Ok(Linter::new(ruleset, Extractor::new(lexicons)))
}

fn read_input(opts: &CliOptions, env: &mut Env<'_>) -> Result<Vec<RawMessage>, UsageError> {
    if let Some(path) = &opts.from_file {
        return Ok(read_messages_csv(path, &opts.message_column)?);
    }
    if env.stdin_is_terminal {
        return Err(UsageError(
            "no commit message on standard input (pipe one in or use --from-file)".into(),
        ));
    }
    let mut text = String::new();
    env.stdin
        .read_to_string(&mut text)
        .map_err(|e| UsageError(format!("cannot read standard input: {e}")))?;
    if text.trim().is_empty() {
        return Err(UsageError("no commit message on standard input".into()));
    }
    Ok(vec![RawMessage::stdin(&text)])
}

fn lint_all(opts: &CliOptions, env: &mut Env<'_>) -> Result<i32, UsageError> {
    let linter = build_linter(opts, env.lexicon_dir.as_deref())?;
    let messages = read_input(opts, env)?;
    let lint_opts = LintOptions {
        score: opts.score,
        body_informative: opts.is_body_informative,
    };
    let render_opts = RenderOptions {
        no_compliance_only: opts.no_compliance,
        with_score: opts.score,
        unicode: env.stdout_is_terminal && !opts.no_unicode,
    };
    let batch = opts.from_file.is_some();

    let mut reports = Vec::with_capacity(messages.len());
    let mut sources = Vec::with_capacity(messages.len());
    for raw in messages {
        let source = raw.source();
        let result = linter.lint(raw, lint_opts)?;
        if result.empty {
            writeln!(env.stderr, "secomlint: {source}: message is empty")?;
        }
        sources.push(source);
        reports.push(result.report);
    }

    match opts.format {
        Format::Text => {
            for (i, (report, source)) in reports.iter().zip(&sources).enumerate() {
                if batch {
                    if i > 0 {
                        writeln!(env.stdout)?;
                    }
                    writeln!(env.stdout, "{source}:")?;
                }
                write!(env.stdout, "{}", render(report, render_opts))?;
            }
        }
        Format::Json => {
            let items: Vec<JsonReport> = reports
                .iter()
                .zip(&sources)
                .map(|(report, &source)| JsonReport { source, report })
                .collect();
            let json = if batch {
                serde_json::to_string_pretty(&items)?
            } else {
                serde_json::to_string_pretty(&items[0])?
            };
            writeln!(env.stdout, "{json}")?;
        }
    }
    Ok(exit_code(&reports))
}

/// Runs the linter with `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, env: &mut Env<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let opts = match CliOptions::try_parse_from(argv) {
        Ok(opts) => opts,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let out: &mut dyn Write = if e.use_stderr() {
                env.stderr
            } else {
                env.stdout
            };
            let _ = write!(out, "{text}");
            return code;
        }
    };
    match lint_all(&opts, env) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(env.stderr, "secomlint: {msg}");
            EXIT_USAGE
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    use std::io::IsTerminal;

    let stdin = io::stdin();
    let stdout = io::stdout();
    let stdin_is_terminal = stdin.is_terminal();
    let stdout_is_terminal = stdout.is_terminal();
    let mut env = Env {
        stdin: &mut stdin.lock(),
        stdin_is_terminal,
        stdout: &mut stdout.lock(),
        stdout_is_terminal,
        stderr: &mut io::stderr(),
        lexicon_dir: std::env::var_os(LEXICON_DIR_ENV).map(PathBuf::from),
    };
    run(std::env::args_os(), &mut env)
}
