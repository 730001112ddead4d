//! WebAssembly entry points for the browser demo. Every function returns a
//! JSON string: either the result or `{"error": "..."}`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use secomlint::{
    apply_overlay, default_ruleset, parse_config, parse_message, render, Entity, LintOptions,
    Linter, RawMessage, RenderOptions, Report, SectionKind,
};

#[derive(Serialize)]
struct LintView<'a> {
    #[serde(flatten)]
    report: &'a Report,
    text: String,
}

#[derive(Serialize)]
struct SectionView {
    kind: SectionKind,
    text: String,
    entities: Vec<Entity>,
}

fn error(msg: impl ToString) -> String {
    serde_json::json!({ "error": msg.to_string() }).to_string()
}

/// Lints `message` with an optional YAML rule overlay.
#[wasm_bindgen]
pub fn lint(message: &str, config_yaml: &str, score: bool) -> String {
    let overlay = match parse_config(config_yaml) {
        Ok(o) => o,
        Err(e) => return error(e),
    };
    let linter = Linter::new(
        apply_overlay(&default_ruleset(), &overlay),
        Default::default(),
    );
    let opts = LintOptions {
        score,
        body_informative: true,
    };
    match linter.lint_text(message, opts) {
        Ok(result) => {
            let text = render(
                &result.report,
                RenderOptions {
                    with_score: score,
                    unicode: true,
                    ..Default::default()
                },
            );
            serde_json::to_string(&LintView {
                report: &result.report,
                text,
            })
            .unwrap_or_else(error)
        }
        Err(e) => error(e),
    }
}

/// Splits `message` into its populated sections with the entities found in
/// each. Entity spans are character offsets into the section text.
#[wasm_bindgen]
pub fn sections(message: &str) -> String {
    let parsed = match parse_message(RawMessage::stdin(message)) {
        Ok(p) => p,
        Err(e) => return error(e),
    };
    let linter = Linter::default();
    let views: Vec<SectionView> = SectionKind::ALL
        .iter()
        .filter(|&&kind| parsed.is_populated(kind))
        .map(|&kind| {
            let text = parsed.section_text(kind);
            let entities = linter.extractor.extract(&text, kind);
            SectionView {
                kind,
                text,
                entities,
            }
        })
        .collect();
    serde_json::to_string(&views).unwrap_or_else(error)
}
