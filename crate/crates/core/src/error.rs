use std::path::PathBuf;

use thiserror::Error;

use crate::message::Source;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{origin}: message is empty")]
    EmptyMessage { origin: Source },
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon `{name}` is missing or empty ({path})")]
    MissingLexicon { name: String, path: PathBuf },
    #[error("cannot read lexicon `{name}` from {path}: {err}")]
    Io {
        name: String,
        path: PathBuf,
        #[source]
        err: std::io::Error,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    ConfigSyntax(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("bad value for `{rule}`: {reason}")]
    BadValue { rule: String, reason: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("no active rules; the configuration disables every rule")]
    NoActiveRules,
}

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("cannot read {path}: {err}")]
    Io {
        path: PathBuf,
        #[source]
        err: std::io::Error,
    },
    #[error("column `{0}` not found in CSV header")]
    MissingColumn(String),
    #[error("malformed CSV at line {line}: {reason}")]
    MalformedCsv { line: u64, reason: String },
}
