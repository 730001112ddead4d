//! One message through the whole pipeline: parse, extract, evaluate, report.

use crate::entities::{body_is_informative, Extractor};
use crate::error::ScoreError;
use crate::message::{parse_message, ParsedMessage, RawMessage, SectionKind};
use crate::report::Report;
use crate::rules::{evaluate, EntityMap, Ruleset};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LintOptions {
    pub score: bool,
    pub body_informative: bool,
}

#[derive(Debug, Clone)]
pub struct LintResult {
    pub parsed: ParsedMessage,
    pub entities: EntityMap,
    pub report: Report,
    /// The message had no nonblank line; every rule failed.
    pub empty: bool,
}

impl LintResult {
    pub fn entity_count(&self) -> usize {
        self.entities.values().map(Vec::len).sum()
    }
}

/// Runs extraction over every section of a parsed message.
pub fn extract_sections(parsed: &ParsedMessage, extractor: &Extractor) -> EntityMap {
    SectionKind::ALL
        .iter()
        .map(|&kind| (kind, extractor.extract(&parsed.section_text(kind), kind)))
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct Linter {
    pub ruleset: Ruleset,
    pub extractor: Extractor,
}

impl Linter {
    pub fn new(ruleset: Ruleset, extractor: Extractor) -> Self {
        Self { ruleset, extractor }
    }

    pub fn lint(&self, raw: RawMessage, opts: LintOptions) -> Result<LintResult, ScoreError> {
        let (parsed, empty) = match parse_message(raw.clone()) {
            Ok(parsed) => (parsed, false),
            Err(_) => (ParsedMessage::empty(raw), true),
        };
        let entities = extract_sections(&parsed, &self.extractor);
        let mut report = Report::new(evaluate(&parsed, &entities, &self.ruleset));
        if opts.score {
            report = report.with_score()?;
        }
        if opts.body_informative {
            report.body_informative = Some(body_is_informative(
                entities.get(&SectionKind::Body).map_or(&[], Vec::as_slice),
            ));
        }
        Ok(LintResult {
            parsed,
            entities,
            report,
            empty,
        })
    }

    pub fn lint_text(&self, text: &str, opts: LintOptions) -> Result<LintResult, ScoreError> {
        self.lint(RawMessage::stdin(text), opts)
    }
}
