//! Linter for security commit messages following the SECOM convention.
//!
//! A message is split into header, body, metadata, contacts and references
//! sections, security-relevant entities are extracted from each section with
//! regular expressions and lexicons, and a configurable ruleset decides how
//! compliant the message is.

pub mod cli;
pub mod entities;
pub mod error;
pub mod lint;
pub mod message;
pub mod report;
pub mod rules;

pub use entities::{extract_entities, Entity, EntityKind, Extractor, Lexicon, Lexicons};
pub use error::{ConfigError, CsvError, LexiconError, ParseError, ScoreError};
pub use lint::{LintOptions, LintResult, Linter};
pub use message::{parse_message, ParsedMessage, RawMessage, SectionKind, Source};
pub use report::{compute_score, render, RenderOptions, Report, Score};
pub use rules::{
    apply_overlay, default_ruleset, evaluate, parse_config, ConfigOverlay, RuleOutcome, RuleSpec,
    Ruleset, SeverityClass,
};
