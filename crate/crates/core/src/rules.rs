//! The default SECOM ruleset, YAML configuration overlays, and rule
//! evaluation against a parsed message and its entities.

use std::collections::BTreeMap;
use std::fmt;

use regex::Regex;
use serde::Serialize;
use serde_yaml::Value;

use crate::entities::{Entity, EntityKind};
use crate::error::ConfigError;
use crate::message::{Field, ParsedMessage, SectionKind};

/// Problems are encoded as 1 and warnings as 0 in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeverityClass {
    Warning = 0,
    Problem = 1,
}

impl SeverityClass {
    pub fn from_code(code: i64) -> Option<Self> {
        match code {
            0 => Some(SeverityClass::Warning),
            1 => Some(SeverityClass::Problem),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SeverityClass::Warning => "warning",
            SeverityClass::Problem => "problem",
        }
    }
}

impl fmt::Display for SeverityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a rule looks at: one section, or the layout of the whole message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleScope {
    Section(SectionKind),
    Structure,
}

impl fmt::Display for RuleScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleScope::Section(kind) => kind.fmt(f),
            RuleScope::Structure => f.write_str("structure"),
        }
    }
}

/// How a rule interprets its configurable `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ValueKind {
    None,
    Pattern,
    Length,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleSpec {
    pub id: &'static str,
    pub scope: RuleScope,
    pub severity: SeverityClass,
    pub active: bool,
    pub value: Option<String>,
    pub description: &'static str,
}

pub const HEADER_EXISTS: &str = "header_exists";
pub const HEADER_STARTS_WITH_TYPE: &str = "header_starts_with_type";
pub const HEADER_MAX_LENGTH: &str = "header_max_length";
pub const HEADER_ENDS_WITH_VULN_ID: &str = "header_ends_with_vuln_id";
pub const BODY_EXISTS: &str = "body_exists";
pub const BODY_MAX_LINE_LENGTH: &str = "body_max_line_length";
pub const BODY_MENTIONS_FLAW: &str = "body_mentions_flaw";
pub const BODY_MENTIONS_ACTION: &str = "body_mentions_action";
pub const METADATA_HAS_WEAKNESS: &str = "metadata_has_weakness";
pub const METADATA_HAS_SEVERITY: &str = "metadata_has_severity";
pub const METADATA_HAS_CVSS: &str = "metadata_has_cvss";
pub const METADATA_HAS_DETECTION: &str = "metadata_has_detection";
pub const METADATA_HAS_REPORT: &str = "metadata_has_report";
pub const METADATA_HAS_INTRODUCED_IN: &str = "metadata_has_introduced_in";
pub const CONTACT_HAS_REPORTED_BY: &str = "contact_has_reported_by";
pub const CONTACT_HAS_SIGNED_OFF_BY: &str = "contact_has_signed_off_by";
pub const REFERENCES_HAS_TRACKER: &str = "references_has_tracker";
pub const SECTIONS_SEPARATED: &str = "sections_separated";

fn value_kind(id: &str) -> ValueKind {
    match id {
        HEADER_STARTS_WITH_TYPE => ValueKind::Pattern,
        HEADER_MAX_LENGTH | BODY_MAX_LINE_LENGTH => ValueKind::Length,
        _ => ValueKind::None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ruleset {
    pub rules: Vec<RuleSpec>,
}

impl Default for Ruleset {
    fn default() -> Self {
        default_ruleset()
    }
}

impl Ruleset {
    pub fn get(&self, id: &str) -> Option<&RuleSpec> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn active(&self) -> impl Iterator<Item = &RuleSpec> {
        self.rules.iter().filter(|r| r.active)
    }

    pub fn ids(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.rules.iter().map(|r| r.id)
    }
}

#[rustfmt::skip]
pub fn default_ruleset() -> Ruleset {
    use RuleScope::{Section, Structure};
    use SectionKind::*;
    use SeverityClass::{Problem, Warning};

    let rule = |id, scope, severity, value: Option<&str>, description| RuleSpec {
        id,
        scope,
        severity,
        active: true,
        value: value.map(str::to_string),
        description,
    };
    Ruleset {
        rules: vec![
            rule(HEADER_EXISTS, Section(Header), Problem, None,
                "the message has a nonblank first line"),
            rule(HEADER_STARTS_WITH_TYPE, Section(Header), Problem, Some("vuln-fix"),
                "the header starts with `<type>: `"),
            rule(HEADER_MAX_LENGTH, Section(Header), Warning, Some("72"),
                "the header is at most 72 characters"),
            rule(HEADER_ENDS_WITH_VULN_ID, Section(Header), Warning, None,
                "the header ends with a vulnerability identifier"),
            rule(BODY_EXISTS, Section(Body), Problem, None,
                "the message has a body"),
            rule(BODY_MAX_LINE_LENGTH, Section(Body), Warning, Some("72"),
                "every body line is at most 72 characters"),
            rule(BODY_MENTIONS_FLAW, Section(Body), Warning, None,
                "the body describes the vulnerability"),
            rule(BODY_MENTIONS_ACTION, Section(Body), Warning, None,
                "the body describes the fix"),
            rule(METADATA_HAS_WEAKNESS, Section(Metadata), Warning, None,
                "a `Weakness:` field names the weakness or CWE"),
            rule(METADATA_HAS_SEVERITY, Section(Metadata), Warning, None,
                "a `Severity:` field gives a severity level"),
            rule(METADATA_HAS_CVSS, Section(Metadata), Warning, None,
                "a `CVSS:` field gives a score between 0.0 and 10.0"),
            rule(METADATA_HAS_DETECTION, Section(Metadata), Warning, None,
                "a `Detection:` field names the method or tool"),
            rule(METADATA_HAS_REPORT, Section(Metadata), Warning, None,
                "a `Report:` field links the report"),
            rule(METADATA_HAS_INTRODUCED_IN, Section(Metadata), Warning, None,
                "an `Introduced in:` field gives a commit hash"),
            rule(CONTACT_HAS_REPORTED_BY, Section(Contacts), Warning, None,
                "a `Reported-by:` line has an e-mail address"),
            rule(CONTACT_HAS_SIGNED_OFF_BY, Section(Contacts), Problem, None,
                "a `Signed-off-by:` line has an e-mail address"),
            rule(REFERENCES_HAS_TRACKER, Section(References), Warning, None,
                "a bug-tracker link or issue reference is given"),
            rule(SECTIONS_SEPARATED, Structure, Warning, None,
                "sections are separated by blank lines"),
        ],
    }
}

/// Per-rule overrides read from a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleOverride {
    pub active: Option<bool>,
    pub severity: Option<SeverityClass>,
    pub value: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigOverlay {
    pub entries: BTreeMap<String, RuleOverride>,
}

impl ConfigOverlay {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn set(mut self, id: &str, entry: RuleOverride) -> Self {
        self.entries.insert(id.to_string(), entry);
        self
    }
}

fn type_prefix(value: &str) -> Result<Regex, regex::Error> {
    Regex::new(&format!("^(?:{value}): "))
}

fn parse_length(value: &str) -> Option<usize> {
    value.trim().parse::<usize>().ok().filter(|n| *n > 0)
}

fn check_value(id: &str, value: &str) -> Result<(), ConfigError> {
    let bad = |reason: String| ConfigError::BadValue {
        rule: id.to_string(),
        reason,
    };
    match value_kind(id) {
        ValueKind::Pattern => type_prefix(value)
            .map(drop)
            .map_err(|e| bad(format!("invalid pattern: {e}"))),
        ValueKind::Length => parse_length(value)
            .map(drop)
            .ok_or_else(|| bad(format!("`{value}` is not a positive integer"))),
        ValueKind::None => Err(bad("this rule takes no value".to_string())),
    }
}

/// Parses a YAML overlay: a mapping from rule id to `active`, `type` and
/// `value` keys. Everything is validated here so linting never sees a bad
/// configuration.
pub fn parse_config(yaml_text: &str) -> Result<ConfigOverlay, ConfigError> {
    let doc: Value =
        serde_yaml::from_str(yaml_text).map_err(|e| ConfigError::ConfigSyntax(e.to_string()))?;
    let top = match doc {
        Value::Null => return Ok(ConfigOverlay::default()),
        Value::Mapping(m) => m,
        _ => {
            return Err(ConfigError::ConfigSyntax(
                "top level must be a mapping of rule ids".to_string(),
            ))
        }
    };
    let defaults = default_ruleset();
    let mut overlay = ConfigOverlay::default();
    for (key, body) in top {
        let id = match key {
            Value::String(s) => s,
            other => {
                return Err(ConfigError::ConfigSyntax(format!(
                    "rule ids must be strings, found {other:?}"
                )))
            }
        };
        if defaults.get(&id).is_none() {
            return Err(ConfigError::UnknownRule(id));
        }
        let bad = |reason: &str| ConfigError::BadValue {
            rule: id.clone(),
            reason: reason.to_string(),
        };
        let fields = match body {
            Value::Null => Default::default(),
            Value::Mapping(m) => m,
            _ => return Err(bad("expected a mapping with active/type/value")),
        };
        let mut entry = RuleOverride::default();
        for (sub, v) in fields {
            match sub.as_str() {
                Some("active") => {
                    entry.active = Some(
                        v.as_bool()
                            .ok_or_else(|| bad("`active` must be a boolean"))?,
                    );
                }
                Some("type") => {
                    let code = v.as_i64().ok_or_else(|| bad("`type` must be 0 or 1"))?;
                    entry.severity = Some(
                        SeverityClass::from_code(code)
                            .ok_or_else(|| bad("`type` must be 0 or 1"))?,
                    );
                }
                Some("value") => {
                    let value = match v {
                        Value::String(s) => s,
                        Value::Number(n) => n.to_string(),
                        _ => return Err(bad("`value` must be a scalar string")),
                    };
                    check_value(&id, &value)?;
                    entry.value = Some(value);
                }
                _ => return Err(bad(&format!("unknown key {sub:?}"))),
            }
        }
        overlay.entries.insert(id, entry);
    }
    Ok(overlay)
}

/// Returns `base` with the overlay's fields applied. Rule order is kept.
pub fn apply_overlay(base: &Ruleset, overlay: &ConfigOverlay) -> Ruleset {
    let rules = base
        .rules
        .iter()
        .map(|rule| {
            let mut rule = rule.clone();
            if let Some(o) = overlay.entries.get(rule.id) {
                if let Some(active) = o.active {
                    rule.active = active;
                }
                if let Some(severity) = o.severity {
                    rule.severity = severity;
                }
                if let Some(value) = &o.value {
                    rule.value = Some(value.clone());
                }
            }
            rule
        })
        .collect();
    Ruleset { rules }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleOutcome {
    pub rule_id: &'static str,
    pub passed: bool,
    pub severity: SeverityClass,
    pub detail: String,
}

pub type EntityMap = BTreeMap<SectionKind, Vec<Entity>>;

struct Context<'a> {
    parsed: &'a ParsedMessage,
    entities: &'a EntityMap,
}

impl Context<'_> {
    fn entities(&self, kind: SectionKind) -> &[Entity] {
        self.entities.get(&kind).map_or(&[], Vec::as_slice)
    }

    fn any_in(&self, section: SectionKind, kinds: &[EntityKind]) -> bool {
        self.entities(section)
            .iter()
            .any(|e| kinds.contains(&e.kind))
    }

    /// Fields of `section` whose key is one of `keys`, with the character
    /// range of their value inside the section text.
    fn tagged(&self, section: SectionKind, keys: &[&str]) -> Vec<(&Field, (usize, usize))> {
        self.parsed
            .field_ranges(section)
            .into_iter()
            .filter_map(|(field, (_, end))| {
                let (key, value) = field.key_value()?;
                keys.iter().any(|k| k.eq_ignore_ascii_case(key)).then(|| {
                    let value_len = value.chars().count();
                    (field, (end - value_len, end))
                })
            })
            .collect()
    }

    fn value_has(&self, section: SectionKind, keys: &[&str], kinds: &[EntityKind]) -> bool {
        self.tagged(section, keys).iter().any(|(_, range)| {
            self.entities(section)
                .iter()
                .any(|e| kinds.contains(&e.kind) && e.within(*range))
        })
    }
}

fn check(passed: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if passed {
        Ok(())
    } else {
        Err(detail())
    }
}

fn is_cvss_score(value: &str) -> bool {
    let Some(first) = value.split_whitespace().next() else {
        return false;
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let decimal = match first.split_once('.') {
        Some((int, frac)) => digits(int) && digits(frac),
        None => digits(first),
    };
    decimal
        && first
            .parse::<f64>()
            .is_ok_and(|v| (0.0..=10.0).contains(&v))
}

fn evaluate_rule(rule: &RuleSpec, ctx: &Context<'_>) -> Result<(), String> {
    use EntityKind as K;
    use SectionKind::*;

    let parsed = ctx.parsed;
    let header = parsed.header.as_deref();
    let limit = || rule.value.as_deref().and_then(parse_length).unwrap_or(72);
    match rule.id {
        HEADER_EXISTS => check(header.is_some(), || {
            "header: message has no nonblank first line".into()
        }),
        HEADER_STARTS_WITH_TYPE => {
            let value = rule.value.as_deref().unwrap_or("vuln-fix");
            let re =
                type_prefix(value).map_err(|e| format!("header: invalid type pattern: {e}"))?;
            check(header.is_some_and(|h| re.is_match(h)), || {
                format!("header: expected to start with `{value}: `")
            })
        }
        HEADER_MAX_LENGTH => {
            let max = limit();
            let h = header.ok_or_else(|| "header: missing".to_string())?;
            let len = h.chars().count();
            check(len <= max, || {
                format!("header: {len} characters, expected at most {max}")
            })
        }
        HEADER_ENDS_WITH_VULN_ID => {
            let h = header.ok_or_else(|| "header: missing".to_string())?;
            let trimmed = h.trim_end();
            let trimmed = trimmed.strip_suffix(')').unwrap_or(trimmed);
            let end = trimmed.chars().count();
            check(
                ctx.entities(Header)
                    .iter()
                    .any(|e| e.kind == K::VulnId && e.span.1 == end),
                || "header: expected to end with a vulnerability id such as (CVE-YYYY-NNNN)".into(),
            )
        }
        BODY_EXISTS => check(!parsed.body.is_empty(), || "body: missing".into()),
        BODY_MAX_LINE_LENGTH => {
            let max = limit();
            if parsed.body.is_empty() {
                return Err("body: missing".into());
            }
            let long = parsed
                .body_line_ranges()
                .into_iter()
                .filter(|(_, (s, e))| e - s > max)
                .count();
            check(long == 0, || {
                format!("body: {long} line(s) longer than {max} characters")
            })
        }
        BODY_MENTIONS_FLAW => check(ctx.any_in(Body, &[K::Flaw, K::Secword]), || {
            "body: expected a description of the vulnerability (flaw or security vocabulary)".into()
        }),
        BODY_MENTIONS_ACTION => check(ctx.any_in(Body, &[K::Action]), || {
            "body: expected a description of the fix (an action verb)".into()
        }),
        METADATA_HAS_WEAKNESS => check(
            ctx.tagged(Metadata, &["Weakness"])
                .iter()
                .any(|(f, _)| f.value().is_some_and(|v| !v.is_empty())),
            || "metadata: expected `Weakness: <name or CWE-ID>`".into(),
        ),
        METADATA_HAS_SEVERITY => check(
            ctx.value_has(Metadata, &["Severity"], &[K::Severity]),
            || "metadata: expected `Severity: <Low, Medium, High, Critical>`".into(),
        ),
        METADATA_HAS_CVSS => check(
            ctx.tagged(Metadata, &["CVSS"])
                .iter()
                .any(|(f, _)| f.value().is_some_and(is_cvss_score)),
            || "metadata: expected `CVSS: <score from 0.0 to 10.0>`".into(),
        ),
        METADATA_HAS_DETECTION => check(
            ctx.tagged(Metadata, &["Detection"])
                .iter()
                .any(|(f, _)| f.value().is_some_and(|v| !v.is_empty())),
            || "metadata: expected `Detection: <method, tool>`".into(),
        ),
        METADATA_HAS_REPORT => check(ctx.value_has(Metadata, &["Report"], &[K::Url]), || {
            "metadata: expected `Report: <report link>`".into()
        }),
        METADATA_HAS_INTRODUCED_IN => check(
            ctx.value_has(Metadata, &["Introduced in"], &[K::Sha]),
            || "metadata: expected `Introduced in: <commit hash>`".into(),
        ),
        CONTACT_HAS_REPORTED_BY => check(
            ctx.value_has(Contacts, &["Reported-by"], &[K::Email]),
            || "contacts: expected `Reported-by: <name> (<e-mail>)`".into(),
        ),
        CONTACT_HAS_SIGNED_OFF_BY => check(
            ctx.value_has(Contacts, &["Signed-off-by"], &[K::Email]),
            || "contacts: expected `Signed-off-by: <name> (<e-mail>)`".into(),
        ),
        REFERENCES_HAS_TRACKER => check(
            ctx.value_has(References, &["Bug-tracker"], &[K::Url])
                || ctx.value_has(
                    References,
                    &["Resolves", "See also", "Closes", "Fixes"],
                    &[K::Issue, K::Url],
                ),
            || "references: expected `Bug-tracker: <link>` or `Resolves: <issue>`".into(),
        ),
        SECTIONS_SEPARATED => {
            if parsed.is_empty() {
                return Err("structure: message is empty".into());
            }
            let populated = SectionKind::ALL
                .iter()
                .filter(|k| parsed.is_populated(**k))
                .count();
            let joined = parsed
                .segments
                .windows(2)
                .any(|w| w[0].block == w[1].block && w[0].kind != w[1].kind);
            check(populated < 2 || !joined, || {
                "structure: expected a blank line between the header and the body".into()
            })
        }
        other => Err(format!("unknown rule `{other}`")),
    }
}

/// Runs every active rule in ruleset order.
pub fn evaluate(
    parsed: &ParsedMessage,
    entities: &EntityMap,
    ruleset: &Ruleset,
) -> Vec<RuleOutcome> {
    let ctx = Context { parsed, entities };
    ruleset
        .active()
        .map(|rule| {
            let result = evaluate_rule(rule, &ctx);
            RuleOutcome {
                rule_id: rule.id,
                passed: result.is_ok(),
                severity: rule.severity,
                detail: result.err().unwrap_or_default(),
            }
        })
        .collect()
}
