//! Summary counts, compliance score and report rendering.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::ScoreError;
use crate::rules::{RuleOutcome, SeverityClass};

/// Fraction of active rules satisfied. Kept as an exact ratio and rounded
/// half-up to hundredths of a percent only for display.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Score {
    pub passed: usize,
    pub total: usize,
}

impl Score {
    pub fn percent(self) -> f64 {
        100.0 * self.passed as f64 / self.total as f64
    }

    /// The percentage in hundredths, rounded half-up.
    pub fn hundredths(self) -> u64 {
        let (p, t) = (self.passed as u64, self.total as u64);
        (20_000 * p + t) / (2 * t)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.hundredths();
        write!(f, "{}.{:02}", h / 100, h % 100)
    }
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.hundredths() as f64 / 100.0)
    }
}

pub fn compute_score(outcomes: &[RuleOutcome]) -> Result<Score, ScoreError> {
    if outcomes.is_empty() {
        return Err(ScoreError::NoActiveRules);
    }
    Ok(Score {
        passed: outcomes.iter().filter(|o| o.passed).count(),
        total: outcomes.len(),
    })
}

/// Counts failed outcomes as (problems, warnings).
pub fn summarize(outcomes: &[RuleOutcome]) -> (usize, usize) {
    outcomes
        .iter()
        .filter(|o| !o.passed)
        .fold((0, 0), |(p, w), o| match o.severity {
            SeverityClass::Problem => (p + 1, w),
            SeverityClass::Warning => (p, w + 1),
        })
}

pub const BODY_INFORMATIVE: &str = "body is security informative";
pub const BODY_NOT_INFORMATIVE: &str =
    "body is not security informative; consider describing the weakness, impact, or fix vocabulary";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub outcomes: Vec<RuleOutcome>,
    pub problems: usize,
    pub warnings: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score: Option<Score>,
    /// Advisory verdict from `--is-body-informative`; never affects the exit code.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub body_informative: Option<bool>,
}

impl Report {
    pub fn new(outcomes: Vec<RuleOutcome>) -> Self {
        let (problems, warnings) = summarize(&outcomes);
        Self {
            outcomes,
            problems,
            warnings,
            score: None,
            body_informative: None,
        }
    }

    pub fn with_score(mut self) -> Result<Self, ScoreError> {
        self.score = Some(compute_score(&self.outcomes)?);
        Ok(self)
    }

    pub fn summary_line(&self, with_score: bool) -> String {
        let mut line = format!(
            "found {} problem(s), {} warning(s);",
            self.problems, self.warnings
        );
        if with_score {
            if let Some(score) = self.score {
                line.push_str(&format!(" compliance score is {score}%"));
            }
        }
        line
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderOptions {
    pub no_compliance_only: bool,
    pub with_score: bool,
    pub unicode: bool,
}

pub fn render(report: &Report, opts: RenderOptions) -> String {
    let (pass, fail) = if opts.unicode {
        ("✓", "✗")
    } else {
        ("ok", "not ok")
    };
    let mut out = String::new();
    for o in &report.outcomes {
        if o.passed {
            if !opts.no_compliance_only {
                out.push_str(&format!("{pass} {}\n", o.rule_id));
            }
        } else {
            out.push_str(&format!(
                "{fail} {}: {} [{}]\n",
                o.rule_id, o.detail, o.severity
            ));
        }
    }
    if let Some(informative) = report.body_informative {
        out.push_str(if informative {
            BODY_INFORMATIVE
        } else {
            BODY_NOT_INFORMATIVE
        });
        out.push('\n');
    }
    out.push_str(&report.summary_line(opts.with_score));
    out.push('\n');
    out
}
