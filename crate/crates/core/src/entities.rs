//! Rule-based entity extraction: regular expressions for identifiers,
//! lexicons for vocabulary, and a word-position heuristic standing in for a
//! part-of-speech tagger on action verbs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use crate::error::LexiconError;
use crate::message::SectionKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EntityKind {
    Action,
    Flaw,
    VulnId,
    CweId,
    Issue,
    Email,
    Url,
    Sha,
    Version,
    Severity,
    Detection,
    Secword,
}

impl EntityKind {
    pub const ALL: [EntityKind; 12] = [
        EntityKind::Action,
        EntityKind::Flaw,
        EntityKind::VulnId,
        EntityKind::CweId,
        EntityKind::Issue,
        EntityKind::Email,
        EntityKind::Url,
        EntityKind::Sha,
        EntityKind::Version,
        EntityKind::Severity,
        EntityKind::Detection,
        EntityKind::Secword,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Action => "ACTION",
            EntityKind::Flaw => "FLAW",
            EntityKind::VulnId => "VULNID",
            EntityKind::CweId => "CWEID",
            EntityKind::Issue => "ISSUE",
            EntityKind::Email => "EMAIL",
            EntityKind::Url => "URL",
            EntityKind::Sha => "SHA",
            EntityKind::Version => "VERSION",
            EntityKind::Severity => "SEVERITY",
            EntityKind::Detection => "DETECTION",
            EntityKind::Secword => "SECWORD",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One extracted mention. `span` holds character (not byte) offsets into the
/// section text, end exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Entity {
    pub kind: EntityKind,
    pub text: String,
    pub span: (usize, usize),
    pub section: SectionKind,
}

impl Entity {
    pub fn within(&self, range: (usize, usize)) -> bool {
        self.span.0 >= range.0 && self.span.1 <= range.1
    }
}

/// Returns the substring of `text` between two character offsets.
pub fn slice_chars(text: &str, span: (usize, usize)) -> &str {
    let mut indices = text.char_indices().map(|(i, _)| i).chain(Some(text.len()));
    let start = indices.nth(span.0).unwrap_or(text.len());
    let end = if span.1 > span.0 {
        indices.nth(span.1 - span.0 - 1).unwrap_or(text.len())
    } else {
        start
    };
    &text[start..end]
}

static WORD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[\p{L}\p{N}]+(?:['’-][\p{L}\p{N}]+)*").unwrap());

fn words(text: &str) -> impl Iterator<Item = regex::Match<'_>> {
    WORD.find_iter(text)
}

/// Candidate base forms of a lowercase word: the word itself plus the
/// results of stripping common English inflections.
fn lemmas(word: &str) -> Vec<String> {
    let mut out = vec![word.to_string()];
    let mut push = |s: String| {
        if s.len() >= 2 && !out.contains(&s) {
            out.push(s);
        }
    };
    if let Some(stem) = word.strip_suffix("ies") {
        push(format!("{stem}y"));
    }
    if let Some(stem) = word.strip_suffix("es") {
        push(stem.to_string());
    }
    if let Some(stem) = word.strip_suffix('s') {
        push(stem.to_string());
    }
    if let Some(stem) = word.strip_suffix('d') {
        push(stem.to_string());
    }
    for suffix in ["ed", "ing"] {
        if let Some(stem) = word.strip_suffix(suffix) {
            push(stem.to_string());
            push(format!("{stem}e"));
            let b = stem.as_bytes();
            if b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] {
                push(stem[..stem.len() - 1].to_string());
            }
        }
    }
    out
}

/// A named set of lowercase terms. Multiword terms are stored as word
/// sequences and matched across whitespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub name: String,
    terms: BTreeSet<String>,
    phrases: BTreeSet<Vec<String>>,
    longest: usize,
}

impl Lexicon {
    /// Parses the asset format: one term per line, `#` comments and blank
    /// lines ignored.
    pub fn parse(name: &str, source: &str) -> Self {
        let mut terms = BTreeSet::new();
        let mut phrases = BTreeSet::new();
        for line in source.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let term = line.to_lowercase();
            let phrase: Vec<String> = words(&term).map(|m| m.as_str().to_string()).collect();
            if !phrase.is_empty() {
                phrases.insert(phrase);
                terms.insert(term);
            }
        }
        let longest = phrases.iter().map(Vec::len).max().unwrap_or(0);
        Self {
            name: name.to_string(),
            terms,
            phrases,
            longest,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }

    /// Case-insensitive membership of a single word or phrase; the last word
    /// may be inflected.
    pub fn contains(&self, term: &str) -> bool {
        let lower = term.to_lowercase();
        let phrase: Vec<&str> = words(&lower).map(|m| m.as_str()).collect();
        !phrase.is_empty() && self.matches(&phrase)
    }

    fn matches(&self, phrase: &[&str]) -> bool {
        let Some((last, init)) = phrase.split_last() else {
            return false;
        };
        let mut key: Vec<String> = init.iter().map(|s| s.to_string()).collect();
        lemmas(last).into_iter().any(|lemma| {
            key.push(lemma);
            let hit = self.phrases.contains(&key);
            key.pop();
            hit
        })
    }
}

pub const LEXICON_NAMES: [&str; 5] = ["action", "flaw", "detection", "severity", "secword"];

const EMBEDDED: [(&str, &str); 5] = [
    ("action", include_str!("../lexicons/action.txt")),
    ("flaw", include_str!("../lexicons/flaw.txt")),
    ("detection", include_str!("../lexicons/detection.txt")),
    ("severity", include_str!("../lexicons/severity.txt")),
    ("secword", include_str!("../lexicons/secword.txt")),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicons(BTreeMap<String, Lexicon>);

impl Lexicons {
    /// The lexicons compiled into the binary.
    pub fn embedded() -> Self {
        let map = EMBEDDED
            .iter()
            .map(|(name, src)| (name.to_string(), Lexicon::parse(name, src)))
            .collect();
        Lexicons(map)
    }

    /// Loads `<dir>/<name>.txt` for each of the five lexicons.
    pub fn from_dir(dir: &Path) -> Result<Self, LexiconError> {
        let mut map = BTreeMap::new();
        for name in LEXICON_NAMES {
            let path = dir.join(format!("{name}.txt"));
            let source = match std::fs::read_to_string(&path) {
                Ok(s) => s,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                    return Err(LexiconError::MissingLexicon {
                        name: name.to_string(),
                        path,
                    })
                }
                Err(err) => {
                    return Err(LexiconError::Io {
                        name: name.to_string(),
                        path,
                        err,
                    })
                }
            };
            let lexicon = Lexicon::parse(name, &source);
            if lexicon.is_empty() {
                return Err(LexiconError::MissingLexicon {
                    name: name.to_string(),
                    path,
                });
            }
            map.insert(name.to_string(), lexicon);
        }
        Ok(Lexicons(map))
    }

    pub fn get(&self, name: &str) -> Option<&Lexicon> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Lexicon)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    fn lexicon(&self, kind: EntityKind) -> Option<&Lexicon> {
        let name = match kind {
            EntityKind::Action => "action",
            EntityKind::Flaw => "flaw",
            EntityKind::Detection => "detection",
            EntityKind::Severity => "severity",
            EntityKind::Secword => "secword",
            _ => return None,
        };
        self.get(name)
    }
}

/// Loads lexicons from `dir`, or the embedded set when `dir` is `None`.
pub fn load_lexicons(dir: Option<&Path>) -> Result<Lexicons, LexiconError> {
    match dir {
        Some(dir) => Lexicons::from_dir(dir),
        None => Ok(Lexicons::embedded()),
    }
}

const VERB_CUES: &[&str] = &[
    "to", "will", "should", "must", "can", "may", "this", "it", "we", "that", "which",
];

/// Whether `tokens[index]` sits where an English verb is likely: first
/// alphabetic token of the line, right after a `type:` style prefix (the
/// preceding token ends with a colon), or after "to", a modal, or a subject
/// pronoun.
pub fn is_verb_position(tokens: &[&str], index: usize) -> bool {
    if index >= tokens.len() {
        return false;
    }
    if tokens[..index]
        .iter()
        .all(|t| !t.chars().any(char::is_alphabetic))
    {
        return true;
    }
    let prev = tokens[index - 1];
    if prev.ends_with(':') {
        return true;
    }
    let prev = prev
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase();
    VERB_CUES.contains(&prev.as_str())
}

struct Patterns {
    vulnid: [Regex; 3],
    cweid: Regex,
    issue_hash: Regex,
    issue_gh: Regex,
    email: Regex,
    url: Regex,
    sha: Regex,
    version: Regex,
}

static PATTERNS: LazyLock<Patterns> = LazyLock::new(|| Patterns {
    vulnid: [
        Regex::new(r"\b(?i:CVE)-\d{4}-\d{4,}\b").unwrap(),
        Regex::new(r"\bGHSA(?:-[23456789cfghjmpqrvwx]{4}){3}\b").unwrap(),
        Regex::new(r"\b(?i:OSV|PYSEC|RUSTSEC|GO)-\d{4}-\d+\b").unwrap(),
    ],
    cweid: Regex::new(r"\bCWE-\d{1,4}\b").unwrap(),
    issue_hash: Regex::new(r"#\d+\b").unwrap(),
    issue_gh: Regex::new(r"\bGH-\d+\b").unwrap(),
    email: Regex::new(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)+").unwrap(),
    url: Regex::new(r"https?://\S+").unwrap(),
    sha: Regex::new(r"\b[0-9a-fA-F]{7,40}\b").unwrap(),
    version: Regex::new(r"\bv?\d+\.\d+(?:\.\d+)*(?:[-+][0-9A-Za-z.]+)?\b").unwrap(),
});

/// Byte-to-character offset conversion for one text.
struct CharIndex {
    starts: Vec<usize>,
    len: usize,
}

impl CharIndex {
    fn new(text: &str) -> Self {
        Self {
            starts: text.char_indices().map(|(i, _)| i).collect(),
            len: text.len(),
        }
    }

    fn char_at(&self, byte: usize) -> usize {
        if byte >= self.len {
            return self.starts.len();
        }
        self.starts.binary_search(&byte).unwrap_or_else(|i| i)
    }
}

/// Extracts entities with a fixed set of lexicons.
#[derive(Debug, Clone)]
pub struct Extractor {
    lexicons: Lexicons,
}

impl Default for Extractor {
    fn default() -> Self {
        Self::new(Lexicons::embedded())
    }
}

struct Token {
    word: String,
    start: usize,
    end: usize,
}

impl Extractor {
    pub fn new(lexicons: Lexicons) -> Self {
        Self { lexicons }
    }

    pub fn lexicons(&self) -> &Lexicons {
        &self.lexicons
    }

    pub fn extract(&self, text: &str, section: SectionKind) -> Vec<Entity> {
        let mut found: Vec<(EntityKind, usize, usize)> = Vec::new();
        self.extract_patterns(text, &mut found);
        self.extract_lexical(text, &mut found);

        let chars = CharIndex::new(text);
        let mut entities: Vec<Entity> = Vec::new();
        for kind in EntityKind::ALL {
            let mut spans: Vec<(usize, usize)> = found
                .iter()
                .filter(|(k, _, _)| *k == kind)
                .map(|&(_, s, e)| (s, e))
                .collect();
            // Leftmost-longest within one kind.
            spans.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
            let mut last_end = 0;
            for (s, e) in spans {
                if s < last_end || s >= e {
                    continue;
                }
                last_end = e;
                entities.push(Entity {
                    kind,
                    text: text[s..e].to_string(),
                    span: (chars.char_at(s), chars.char_at(e)),
                    section,
                });
            }
        }
        entities.sort_by(|a, b| a.span.cmp(&b.span).then(a.kind.cmp(&b.kind)));
        entities.dedup_by(|a, b| a.kind == b.kind && a.span == b.span);
        entities
    }

    fn extract_patterns(&self, text: &str, found: &mut Vec<(EntityKind, usize, usize)>) {
        let p = &*PATTERNS;
        let mut push_all = |kind, re: &Regex| {
            found.extend(re.find_iter(text).map(|m| (kind, m.start(), m.end())));
        };
        for re in &p.vulnid {
            push_all(EntityKind::VulnId, re);
        }
        push_all(EntityKind::CweId, &p.cweid);
        push_all(EntityKind::Issue, &p.issue_gh);
        push_all(EntityKind::Email, &p.email);
        push_all(EntityKind::Version, &p.version);

        for m in p.issue_hash.find_iter(text) {
            let prev = text[..m.start()].chars().next_back();
            if !prev.is_some_and(|c| c.is_alphanumeric() || c == '_') {
                found.push((EntityKind::Issue, m.start(), m.end()));
            }
        }
        for m in p.url.find_iter(text) {
            let trimmed = m.as_str().trim_end_matches([')', '.', ',', ';', ':']);
            if trimmed.len() > m.as_str().find("://").unwrap_or(0) + 3 {
                found.push((EntityKind::Url, m.start(), m.start() + trimmed.len()));
            }
        }
        for m in p.sha.find_iter(text) {
            if m.as_str().bytes().any(|b| b.is_ascii_alphabetic()) {
                found.push((EntityKind::Sha, m.start(), m.end()));
            }
        }
    }

    fn extract_lexical(&self, text: &str, found: &mut Vec<(EntityKind, usize, usize)>) {
        let mut line_start = 0;
        let mut all: Vec<Token> = Vec::new();
        let mut verb_ok: Vec<bool> = Vec::new();
        for line in text.split('\n') {
            let matches: Vec<regex::Match> = words(line).collect();
            // Tokens as seen by the verb heuristic: a word keeps a trailing
            // colon when the punctuation after it ends in one.
            let shaped: Vec<String> = matches
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let gap_end = matches.get(i + 1).map_or(line.len(), |n| n.start());
                    let gap = line[m.end()..gap_end].trim();
                    if gap.ends_with(':') {
                        format!("{}:", m.as_str())
                    } else {
                        m.as_str().to_string()
                    }
                })
                .collect();
            let shaped_refs: Vec<&str> = shaped.iter().map(String::as_str).collect();
            for (i, m) in matches.iter().enumerate() {
                verb_ok.push(is_verb_position(&shaped_refs, i));
                all.push(Token {
                    word: m.as_str().to_lowercase(),
                    start: line_start + m.start(),
                    end: line_start + m.end(),
                });
            }
            line_start += line.len() + 1;
        }

        for kind in [
            EntityKind::Action,
            EntityKind::Flaw,
            EntityKind::Severity,
            EntityKind::Detection,
            EntityKind::Secword,
        ] {
            let Some(lexicon) = self.lexicons.lexicon(kind) else {
                continue;
            };
            for i in 0..all.len() {
                if kind == EntityKind::Action && !verb_ok[i] {
                    continue;
                }
                let max = lexicon.longest.min(all.len() - i);
                for n in (1..=max).rev() {
                    let window = &all[i..i + n];
                    let joined_by_space = window
                        .windows(2)
                        .all(|w| text[w[0].end..w[1].start].chars().all(char::is_whitespace));
                    if !joined_by_space {
                        continue;
                    }
                    let phrase: Vec<&str> = window.iter().map(|t| t.word.as_str()).collect();
                    if lexicon.matches(&phrase) {
                        found.push((kind, window[0].start, window[n - 1].end));
                        break;
                    }
                }
            }
        }
    }
}

static DEFAULT_EXTRACTOR: LazyLock<Extractor> = LazyLock::new(Extractor::default);

/// Extracts entities using the embedded lexicons.
pub fn extract_entities(text: &str, section: SectionKind) -> Vec<Entity> {
    DEFAULT_EXTRACTOR.extract(text, section)
}

/// True when the body carries security vocabulary or identifiers.
pub fn body_is_informative(body_entities: &[Entity]) -> bool {
    body_entities.iter().any(|e| {
        matches!(
            e.kind,
            EntityKind::Secword | EntityKind::Flaw | EntityKind::VulnId | EntityKind::CweId
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds_texts(text: &str) -> Vec<(EntityKind, String)> {
        extract_entities(text, SectionKind::Body)
            .into_iter()
            .map(|e| (e.kind, e.text))
            .collect()
    }

    fn has(text: &str, kind: EntityKind, needle: &str) -> bool {
        kinds_texts(text)
            .iter()
            .any(|(k, t)| *k == kind && t == needle)
    }

    #[test]
    fn header_example() {
        let text = "fix: prevent overflow (CVE-2022-35928)";
        assert!(has(text, EntityKind::VulnId, "CVE-2022-35928"));
        assert!(has(text, EntityKind::Action, "prevent"));
        assert!(has(text, EntityKind::Action, "fix"));
        assert!(has(text, EntityKind::Secword, "overflow"));
        // No VERSION or SHA fragment inside the identifier.
        assert!(!kinds_texts(text)
            .iter()
            .any(|(k, _)| matches!(k, EntityKind::Version | EntityKind::Sha)));
    }

    #[test]
    fn metadata_examples() {
        assert!(has("Weakness: CWE-787", EntityKind::CweId, "CWE-787"));
        assert!(has(
            "Detection: oss-fuzz",
            EntityKind::Detection,
            "oss-fuzz"
        ));
        assert!(extract_entities("", SectionKind::Header).is_empty());
    }

    #[test]
    fn vulnid_forms() {
        assert!(has(
            "see cve-2021-44228 now",
            EntityKind::VulnId,
            "cve-2021-44228"
        ));
        assert!(has(
            "GHSA-2x8q-9wvf-p6h3",
            EntityKind::VulnId,
            "GHSA-2x8q-9wvf-p6h3"
        ));
        assert!(!has(
            "GHSA-abcd-9wvf-p6h3",
            EntityKind::VulnId,
            "GHSA-abcd-9wvf-p6h3"
        ));
        assert!(has(
            "RUSTSEC-2023-0001",
            EntityKind::VulnId,
            "RUSTSEC-2023-0001"
        ));
        assert!(has("pysec-2022-42", EntityKind::VulnId, "pysec-2022-42"));
        assert!(has("GO-2022-0493", EntityKind::VulnId, "GO-2022-0493"));
        assert!(!has("CVE-2021-123", EntityKind::VulnId, "CVE-2021-123"));
    }

    #[test]
    fn issue_boundaries() {
        assert!(has("closes #12.", EntityKind::Issue, "#12"));
        assert!(has("GH-881", EntityKind::Issue, "GH-881"));
        assert!(!has("page#12", EntityKind::Issue, "#12"));
        assert!(!has("#12ab", EntityKind::Issue, "#12"));
    }

    #[test]
    fn url_trims_trailing_punctuation() {
        assert!(has(
            "(see https://x.org/a).",
            EntityKind::Url,
            "https://x.org/a"
        ));
        assert!(has("https://x.org/a;", EntityKind::Url, "https://x.org/a"));
        assert!(!kinds_texts("https://")
            .iter()
            .any(|(k, _)| *k == EntityKind::Url));
    }

    #[test]
    fn sha_needs_a_hex_letter() {
        assert!(has("in 6876185a", EntityKind::Sha, "6876185a"));
        assert!(!kinds_texts("in 6876185 and 20220810")
            .iter()
            .any(|(k, _)| *k == EntityKind::Sha));
        assert!(!has("abcdef", EntityKind::Sha, "abcdef"));
        let long = "a".repeat(41);
        assert!(!kinds_texts(&long)
            .iter()
            .any(|(k, _)| *k == EntityKind::Sha));
    }

    #[test]
    fn version_forms() {
        assert!(has("from v1.2.3 on", EntityKind::Version, "v1.2.3"));
        assert!(has("2.4.1-rc.1.", EntityKind::Version, "2.4.1-rc.1"));
        assert!(!kinds_texts("version 2")
            .iter()
            .any(|(k, _)| *k == EntityKind::Version));
    }

    #[test]
    fn email_example() {
        assert!(has(
            "Reported-by: A B (a.b+x@mail.example.org)",
            EntityKind::Email,
            "a.b+x@mail.example.org"
        ));
    }

    #[test]
    fn lexicon_phrases_and_inflections() {
        assert!(has(
            "a heap overflow here",
            EntityKind::Secword,
            "heap overflow"
        ));
        // Leftmost-longest: the shorter "overflow" inside the phrase is dropped.
        assert!(!has(
            "a heap overflow here",
            EntityKind::Secword,
            "overflow"
        ));
        assert!(has(
            "found by static analysis",
            EntityKind::Detection,
            "static analysis"
        ));
        assert!(has("two bugs", EntityKind::Flaw, "bugs"));
        assert!(has("Severity: Moderate", EntityKind::Severity, "Moderate"));
        assert!(has(
            "a buffer\noverflow",
            EntityKind::Secword,
            "buffer\noverflow"
        ));
    }

    #[test]
    fn verb_position_examples() {
        assert!(is_verb_position(&["fix", "buffer", "overflow"], 0));
        assert!(!is_verb_position(&["apply", "the", "fix"], 2));
        assert!(is_verb_position(&["this", "patches", "the", "bug"], 1));
        assert!(is_verb_position(&["vuln-fix:", "prevent", "overflow"], 1));
        assert!(is_verb_position(&["1", "fix", "it"], 1));
        assert!(is_verb_position(&["we", "must", "sanitize"], 2));
        assert!(!is_verb_position(&["a"], 3));
    }

    #[test]
    fn action_requires_verb_position() {
        assert!(has("This patches the bug", EntityKind::Action, "patches"));
        assert!(!has("apply the fix", EntityKind::Action, "fix"));
        assert!(has(
            "fix(parser): prevent leak",
            EntityKind::Action,
            "prevent"
        ));
        assert!(has("It fixes the flaw", EntityKind::Action, "fixes"));
    }

    #[test]
    fn lexicons_load() {
        let lex = load_lexicons(None).unwrap();
        let flaw = lex.get("flaw").unwrap();
        for t in [
            "problem", "defect", "issue", "weakness", "flaw", "fault", "bug", "error",
        ] {
            assert!(flaw.contains(t), "{t}");
        }
        let sev: Vec<&str> = lex.get("severity").unwrap().terms().collect();
        assert_eq!(sev, vec!["critical", "high", "low", "medium", "moderate"]);
        let det = lex.get("detection").unwrap();
        for t in [
            "codeql",
            "coverity",
            "oss-fuzz",
            "libfuzzer",
            "fuzzer",
            "fuzzing",
            "static analysis",
            "code review",
            "pentest",
        ] {
            assert!(det.contains(t), "{t}");
        }
        assert!(lex.get("secword").unwrap().len() >= 80);
        assert!(lex.get("action").unwrap().contains("Prevent"));
    }

    #[test]
    fn lexicons_from_dir_and_missing() {
        let dir = tempfile::tempdir().unwrap();
        for (name, src) in EMBEDDED {
            std::fs::write(dir.path().join(format!("{name}.txt")), src).unwrap();
        }
        assert_eq!(
            Lexicons::from_dir(dir.path()).unwrap(),
            Lexicons::embedded()
        );

        std::fs::write(dir.path().join("flaw.txt"), "# only a comment\n\n").unwrap();
        assert!(matches!(
            Lexicons::from_dir(dir.path()),
            Err(LexiconError::MissingLexicon { name, .. }) if name == "flaw"
        ));
        std::fs::remove_file(dir.path().join("severity.txt")).unwrap();
        assert!(matches!(
            load_lexicons(Some(dir.path())),
            Err(LexiconError::MissingLexicon { .. })
        ));
    }

    #[test]
    fn informative_body() {
        let e = |kind, text: &str| Entity {
            kind,
            text: text.to_string(),
            span: (0, text.len()),
            section: SectionKind::Body,
        };
        assert!(body_is_informative(&[e(EntityKind::Secword, "overflow")]));
        assert!(!body_is_informative(&[]));
        assert!(!body_is_informative(&[e(EntityKind::Url, "https://x")]));
        assert!(body_is_informative(&[e(EntityKind::CweId, "CWE-1")]));
    }

    #[test]
    fn spans_are_char_offsets() {
        let text = "ünïcode fix: CVE-2022-35928 ✓";
        for e in extract_entities(text, SectionKind::Header) {
            assert_eq!(slice_chars(text, e.span), e.text);
        }
        let e = extract_entities(text, SectionKind::Header)
            .into_iter()
            .find(|e| e.kind == EntityKind::VulnId)
            .unwrap();
        assert_eq!(e.span, (13, 27));
    }

    #[test]
    fn output_sorted_and_unique() {
        let text = "fix: fix the bug bug #1 #1 https://a.io/x https://a.io/x";
        let out = extract_entities(text, SectionKind::Body);
        for w in out.windows(2) {
            assert!((w[0].span, w[0].kind) < (w[1].span, w[1].kind));
        }
    }
}
