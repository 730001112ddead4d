//! Splitting a commit message into blank-line separated blocks and
//! classifying those blocks into the five SECOM sections.

use std::fmt;

use serde::Serialize;

use crate::error::ParseError;

/// Where a message came from, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "index")]
pub enum Source {
    Stdin,
    CsvRow(usize),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Stdin => f.write_str("stdin"),
            Source::CsvRow(i) => write!(f, "row {i}"),
        }
    }
}

/// A commit message as received. Only line endings are normalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawMessage {
    text: String,
    source: Source,
}

impl RawMessage {
    pub fn new(text: &str, source: Source) -> Self {
        Self {
            text: normalize_newlines(text),
            source,
        }
    }

    pub fn stdin(text: &str) -> Self {
        Self::new(text, Source::Stdin)
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn source(&self) -> Source {
        self.source
    }
}

/// The five SECOM sections, ordered as they appear in the convention's layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionKind {
    Header,
    Body,
    Metadata,
    Contacts,
    References,
}

impl SectionKind {
    pub const ALL: [SectionKind; 5] = [
        SectionKind::Header,
        SectionKind::Body,
        SectionKind::Metadata,
        SectionKind::Contacts,
        SectionKind::References,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SectionKind::Header => "header",
            SectionKind::Body => "body",
            SectionKind::Metadata => "metadata",
            SectionKind::Contacts => "contacts",
            SectionKind::References => "references",
        }
    }
}

impl fmt::Display for SectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const CONTACT_TAGS: &[&str] = &[
    "reported-by",
    "signed-off-by",
    "co-authored-by",
    "reviewed-by",
];
pub const REFERENCE_TAGS: &[&str] = &["bug-tracker", "resolves", "see also", "closes", "fixes"];
pub const METADATA_TAGS: &[&str] = &[
    "weakness",
    "severity",
    "cvss",
    "detection",
    "report",
    "introduced in",
];

/// A maximal run of consecutive nonblank lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub lines: Vec<String>,
    /// 0-based line number of the first line in the normalized message.
    pub start_line: usize,
}

/// One line of a metadata, contacts or references section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Field {
    pub text: String,
    pub line: usize,
}

impl Field {
    /// Splits `Key: value` on the first `": "`. A bare `Key:` yields an empty value.
    pub fn key_value(&self) -> Option<(&str, &str)> {
        split_tag(&self.text)
    }

    pub fn key(&self) -> Option<&str> {
        self.key_value().map(|(k, _)| k)
    }

    pub fn value(&self) -> Option<&str> {
        self.key_value().map(|(_, v)| v)
    }

    pub fn has_key(&self, key: &str) -> bool {
        self.key().is_some_and(|k| k.eq_ignore_ascii_case(key))
    }
}

/// A contiguous stretch of lines assigned to one section. Segments that share
/// a `block` index were not separated by a blank line in the original text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub kind: SectionKind,
    pub block: usize,
    pub start_line: usize,
    pub len: usize,
}

/// A commit message decomposed into SECOM sections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedMessage {
    pub header: Option<String>,
    pub body: Vec<Block>,
    pub metadata: Vec<Field>,
    pub contacts: Vec<Field>,
    pub references: Vec<Field>,
    pub segments: Vec<Segment>,
    pub raw: RawMessage,
}

/// Section contents without line provenance, used to compare two parses of
/// differently spaced texts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionContents {
    pub header: Option<String>,
    pub header_joined_to_body: bool,
    pub body: Vec<Vec<String>>,
    pub metadata: Vec<String>,
    pub contacts: Vec<String>,
    pub references: Vec<String>,
}

impl ParsedMessage {
    /// A message with no content at all. Every rule fails against it.
    pub fn empty(raw: RawMessage) -> Self {
        Self {
            header: None,
            body: Vec::new(),
            metadata: Vec::new(),
            contacts: Vec::new(),
            references: Vec::new(),
            segments: Vec::new(),
            raw,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.header.is_none()
    }

    pub fn fields(&self, kind: SectionKind) -> &[Field] {
        match kind {
            SectionKind::Metadata => &self.metadata,
            SectionKind::Contacts => &self.contacts,
            SectionKind::References => &self.references,
            SectionKind::Header | SectionKind::Body => &[],
        }
    }

    pub fn is_populated(&self, kind: SectionKind) -> bool {
        match kind {
            SectionKind::Header => self.header.is_some(),
            SectionKind::Body => !self.body.is_empty(),
            other => !self.fields(other).is_empty(),
        }
    }

    /// True when the first body lines directly follow the header line, with
    /// no blank line in between.
    pub fn header_joined_to_body(&self) -> bool {
        match self.segments.as_slice() {
            [first, second, ..] => first.block == second.block,
            _ => false,
        }
    }

    /// The text entity extraction runs over for one section. Body blocks are
    /// joined with a blank line, field lines with a single newline.
    pub fn section_text(&self, kind: SectionKind) -> String {
        match kind {
            SectionKind::Header => self.header.clone().unwrap_or_default(),
            SectionKind::Body => self
                .body
                .iter()
                .map(|b| b.lines.join("\n"))
                .collect::<Vec<_>>()
                .join("\n\n"),
            other => self
                .fields(other)
                .iter()
                .map(|f| f.text.as_str())
                .collect::<Vec<_>>()
                .join("\n"),
        }
    }

    /// Character ranges of each field line inside `section_text(kind)`.
    pub fn field_ranges(&self, kind: SectionKind) -> Vec<(&Field, (usize, usize))> {
        let mut offset = 0;
        self.fields(kind)
            .iter()
            .map(|f| {
                let len = f.text.chars().count();
                let range = (offset, offset + len);
                offset += len + 1;
                (f, range)
            })
            .collect()
    }

    /// Character ranges of each body line inside `section_text(Body)`.
    pub fn body_line_ranges(&self) -> Vec<(&str, (usize, usize))> {
        let mut out = Vec::new();
        let mut offset = 0;
        for (i, block) in self.body.iter().enumerate() {
            if i > 0 {
                offset += 1;
            }
            for line in &block.lines {
                let len = line.chars().count();
                out.push((line.as_str(), (offset, offset + len)));
                offset += len + 1;
            }
        }
        out
    }

    /// Every nonblank line held by the parsed sections.
    pub fn lines(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.header.iter().map(String::as_str).collect();
        out.extend(
            self.body
                .iter()
                .flat_map(|b| b.lines.iter().map(String::as_str)),
        );
        for kind in [
            SectionKind::Metadata,
            SectionKind::Contacts,
            SectionKind::References,
        ] {
            out.extend(self.fields(kind).iter().map(|f| f.text.as_str()));
        }
        out
    }

    pub fn contents(&self) -> SectionContents {
        let texts = |fields: &[Field]| fields.iter().map(|f| f.text.clone()).collect();
        SectionContents {
            header: self.header.clone(),
            header_joined_to_body: self.header_joined_to_body(),
            body: self.body.iter().map(|b| b.lines.clone()).collect(),
            metadata: texts(&self.metadata),
            contacts: texts(&self.contacts),
            references: texts(&self.references),
        }
    }

    /// Joins the sections back together in layout order, one blank line
    /// between sections. Body lines that shared the header's block stay
    /// attached to it so the result re-parses to the same sections.
    pub fn render_back(&self) -> String {
        let mut blocks: Vec<String> = Vec::new();
        let mut body = self.body.iter();
        if let Some(header) = &self.header {
            let mut first = header.clone();
            if self.header_joined_to_body() {
                if let Some(tail) = body.next() {
                    first.push('\n');
                    first.push_str(&tail.lines.join("\n"));
                }
            }
            blocks.push(first);
        }
        blocks.extend(body.map(|b| b.lines.join("\n")));
        for kind in [
            SectionKind::Metadata,
            SectionKind::Contacts,
            SectionKind::References,
        ] {
            let fields = self.fields(kind);
            if !fields.is_empty() {
                blocks.push(
                    fields
                        .iter()
                        .map(|f| f.text.as_str())
                        .collect::<Vec<_>>()
                        .join("\n"),
                );
            }
        }
        blocks.join("\n\n")
    }
}

fn normalize_newlines(text: &str) -> String {
    text.replace("\r\n", "\n").replace('\r', "\n")
}

/// Maps CRLF and CR to LF and strips trailing whitespace from every line.
pub fn normalize(text: &str) -> String {
    normalize_newlines(text)
        .split('\n')
        .map(str::trim_end)
        .collect::<Vec<_>>()
        .join("\n")
}

fn is_blank(line: &str) -> bool {
    line.trim().is_empty()
}

pub fn split_blocks(text: &str) -> Vec<Block> {
    let mut blocks = Vec::new();
    let mut current: Option<Block> = None;
    for (number, line) in text.split('\n').enumerate() {
        if is_blank(line) {
            blocks.extend(current.take());
        } else {
            current
                .get_or_insert_with(|| Block {
                    lines: Vec::new(),
                    start_line: number,
                })
                .lines
                .push(line.to_string());
        }
    }
    blocks.extend(current);
    blocks
}

fn split_tag(line: &str) -> Option<(&str, &str)> {
    let (key, value) = match line.split_once(": ") {
        Some(kv) => kv,
        None => (line.strip_suffix(':')?, ""),
    };
    let key = key.trim();
    is_tag_key(key).then_some((key, value.trim()))
}

// Trailer keys are short: one to three words of letters, digits and hyphens.
fn is_tag_key(key: &str) -> bool {
    let words: Vec<&str> = key.split(' ').collect();
    !key.is_empty()
        && words.len() <= 3
        && key.starts_with(|c: char| c.is_ascii_alphabetic())
        && words
            .iter()
            .all(|w| !w.is_empty() && w.chars().all(|c| c.is_ascii_alphanumeric() || c == '-'))
}

fn tag_in(key: &str, set: &[&str]) -> bool {
    set.iter().any(|t| t.eq_ignore_ascii_case(key))
}

pub fn classify_block(block: &Block, index: usize, _total: usize) -> SectionKind {
    if index == 0 {
        return SectionKind::Header;
    }
    let keys: Vec<&str> = block
        .lines
        .iter()
        .filter_map(|l| split_tag(l).map(|(k, _)| k))
        .collect();
    // Most lines must look like trailers before tag counts are considered.
    if keys.len() * 2 <= block.lines.len() {
        return SectionKind::Body;
    }
    let count = |set: &[&str]| keys.iter().filter(|k| tag_in(k, set)).count();
    let contacts = count(CONTACT_TAGS);
    let references = count(REFERENCE_TAGS);
    let metadata = count(METADATA_TAGS);
    let best = contacts.max(references).max(metadata);
    if best == 0 {
        SectionKind::Body
    } else if contacts == best {
        SectionKind::Contacts
    } else if references == best {
        SectionKind::References
    } else {
        SectionKind::Metadata
    }
}

pub fn parse_message(raw: RawMessage) -> Result<ParsedMessage, ParseError> {
    let text = normalize(raw.text());
    let blocks = split_blocks(&text);
    if blocks.is_empty() {
        return Err(ParseError::EmptyMessage {
            origin: raw.source(),
        });
    }
    let total = blocks.len();
    let mut parsed = ParsedMessage::empty(raw);
    for (index, block) in blocks.into_iter().enumerate() {
        let kind = classify_block(&block, index, total);
        let fields = |block: &Block| -> Vec<Field> {
            block
                .lines
                .iter()
                .enumerate()
                .map(|(i, l)| Field {
                    text: l.clone(),
                    line: block.start_line + i,
                })
                .collect()
        };
        let segment = |kind, start_line, len| Segment {
            kind,
            block: index,
            start_line,
            len,
        };
        match kind {
            SectionKind::Header => {
                let mut lines = block.lines.into_iter();
                parsed.header = lines.next();
                parsed
                    .segments
                    .push(segment(SectionKind::Header, block.start_line, 1));
                let rest: Vec<String> = lines.collect();
                if !rest.is_empty() {
                    parsed.segments.push(segment(
                        SectionKind::Body,
                        block.start_line + 1,
                        rest.len(),
                    ));
                    parsed.body.push(Block {
                        lines: rest,
                        start_line: block.start_line + 1,
                    });
                }
            }
            SectionKind::Body => {
                parsed
                    .segments
                    .push(segment(kind, block.start_line, block.lines.len()));
                parsed.body.push(block);
            }
            SectionKind::Metadata => {
                parsed
                    .segments
                    .push(segment(kind, block.start_line, block.lines.len()));
                parsed.metadata.extend(fields(&block));
            }
            SectionKind::Contacts => {
                parsed
                    .segments
                    .push(segment(kind, block.start_line, block.lines.len()));
                parsed.contacts.extend(fields(&block));
            }
            SectionKind::References => {
                parsed
                    .segments
                    .push(segment(kind, block.start_line, block.lines.len()));
                parsed.references.extend(fields(&block));
            }
        }
    }
    Ok(parsed)
}
