//! Prompt rendering for the three LLM stages and parsing of the replies.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diff::diff_modules;
use crate::hint::highlight;
use crate::model::{CodeHint, LineSpan, Subgoal, SubgoalKind, SubgoalPlan, TaskSpec, TextHint};
use crate::syntax::{extract_signatures, extract_string_literals, parse, ParseError, SourceModule};
use crate::text::{fenced_blocks, split_sentences, strip_fences};

/// Bumping this invalidates every recorded fixture.
pub const TEMPLATE_VERSION: &str = "stepwise-templates/1";
pub const LANGUAGE: &str = "Kotlin";
pub const MIN_SUBGOALS: usize = 6;
pub const MAX_TEXT_SENTENCES: usize = 3;

const SUBGOALS_TEMPLATE: &str = include_str!("../templates/subgoals.txt");
const CODE_HINT_TEMPLATE: &str = include_str!("../templates/code_hint.txt");
const TEXT_HINT_TEMPLATE: &str = include_str!("../templates/text_hint.txt");
const REASK_SUFFIX: &str = include_str!("../templates/reask.txt");

const NONE: &str = "(none)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage {
    Subgoals,
    CodeHint,
    TextHint,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Subgoals => "Subgoals",
            Stage::CodeHint => "CodeHint",
            Stage::TextHint => "TextHint",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRequest {
    pub stage: Stage,
    pub rendered_text: String,
    pub attempt: u32,
    pub fingerprint: String,
}

impl PromptRequest {
    pub fn new(stage: Stage, rendered_text: String, attempt: u32) -> Self {
        let fingerprint = fingerprint(stage, &rendered_text, attempt);
        Self { stage, rendered_text, attempt, fingerprint }
    }

    /// Same request with a format reminder appended; has its own
    /// fingerprint.
    pub fn reask(&self) -> Self {
        Self::new(self.stage, format!("{}{}", self.rendered_text, REASK_SUFFIX), self.attempt)
    }
}

pub fn fingerprint(stage: Stage, rendered_text: &str, attempt: u32) -> String {
    let mut h = Sha256::new();
    for part in [TEMPLATE_VERSION, stage.as_str(), rendered_text, &attempt.to_string()] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    hex::encode(h.finalize())
}

fn fill(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (k, v) in vars {
        out = out.replace(&format!("{{{{{k}}}}}"), v);
    }
    out
}

fn bullets<S: AsRef<str>>(items: &[S]) -> String {
    if items.is_empty() {
        NONE.to_string()
    } else {
        items.iter().map(|s| format!("- {}", s.as_ref())).collect::<Vec<_>>().join("\n")
    }
}

fn code_block_text(src: &str) -> String {
    src.trim_end_matches('\n').to_string()
}

pub fn build_subgoal_prompt(task: &TaskSpec, student_code: &str, student: &SourceModule, attempt: u32) -> PromptRequest {
    let model = parse(&task.model_solution).unwrap_or_default();
    let literals: Vec<String> = extract_string_literals(&model).iter().map(|s| crate::syntax::printer::quote_string(s)).collect();
    let text = fill(
        SUBGOALS_TEMPLATE,
        &[
            ("language", LANGUAGE),
            ("min_subgoals", &MIN_SUBGOALS.to_string()),
            ("description", task.description.trim()),
            ("signatures", &bullets(&extract_signatures(&model))),
            ("existing", &bullets(&extract_signatures(student))),
            ("hints", &bullets(&task.predefined_hints)),
            ("topics", &bullets(&task.theory_topics)),
            ("literals", &bullets(&literals)),
            ("code", &code_block_text(student_code)),
        ],
    );
    PromptRequest::new(Stage::Subgoals, text, attempt)
}

/// Numbered plan lines as they appear in prompts and replies.
pub fn render_plan(plan: &SubgoalPlan) -> String {
    plan.subgoals
        .iter()
        .map(|s| {
            let tag = match s.kind {
                SubgoalKind::Code => "[code]",
                SubgoalKind::NoCode => "[no-code]",
            };
            format!("{}. {} {}", s.index, s.text, tag)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn build_code_hint_prompt(plan: &SubgoalPlan, student_code: &str, test_errors: Option<&str>, attempt: u32) -> PromptRequest {
    let errors = match test_errors.map(str::trim) {
        Some(e) if !e.is_empty() => e.to_string(),
        _ => NONE.to_string(),
    };
    let numbered: Vec<String> =
        plan.subgoals.iter().enumerate().map(|(i, s)| format!("{}. {}", i + 1, s.text)).collect();
    let text = fill(
        CODE_HINT_TEMPLATE,
        &[
            ("language", LANGUAGE),
            ("subgoals", &numbered.join("\n")),
            ("code", &code_block_text(student_code)),
            ("errors", &errors),
        ],
    );
    PromptRequest::new(Stage::CodeHint, text, attempt)
}

pub fn build_text_hint_prompt(hint: &CodeHint, attempt: u32) -> PromptRequest {
    let text = fill(
        TEXT_HINT_TEMPLATE,
        &[("language", LANGUAGE), ("before", &code_block_text(&hint.before)), ("after", &code_block_text(&hint.after))],
    );
    PromptRequest::new(Stage::TextHint, text, attempt)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResponseError {
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("code in response does not parse: {0}")]
    UnparseableHintCode(ParseError),
    #[error("empty response")]
    Empty,
}

fn parse_plan_line(line: &str) -> Option<(String, SubgoalKind)> {
    let line = line.trim();
    let digits = line.len() - line.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    if digits == 0 {
        return None;
    }
    let rest = line[digits..].strip_prefix(['.', ')'])?.trim_start();
    let (body, kind) = if let Some(b) = rest.strip_suffix("[no-code]") {
        (b, SubgoalKind::NoCode)
    } else {
        (rest.strip_suffix("[code]")?, SubgoalKind::Code)
    };
    let body = body.trim();
    (!body.is_empty()).then(|| (body.to_string(), kind))
}

/// Every non-blank line must be `N. text [code]` or `N. text [no-code]`.
/// Indices are renumbered from 1.
pub fn parse_subgoal_response(task_id: &str, text: &str) -> Result<SubgoalPlan, ResponseError> {
    let mut subgoals = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (body, kind) =
            parse_plan_line(line).ok_or_else(|| ResponseError::Malformed(format!("unlabeled line: {}", line.trim())))?;
        subgoals.push(Subgoal { index: subgoals.len() + 1, text: body, kind });
    }
    if subgoals.is_empty() {
        return Err(ResponseError::Malformed("no subgoals".into()));
    }
    Ok(SubgoalPlan { task_id: task_id.to_string(), subgoals, raw_response: text.to_string() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeResponse {
    pub code: String,
    pub module: SourceModule,
    pub warnings: Vec<String>,
}

/// First fenced block, or the whole reply when there is none.
pub fn parse_code_response(text: &str) -> Result<CodeResponse, ResponseError> {
    let blocks = fenced_blocks(text);
    let mut warnings = Vec::new();
    if blocks.len() > 1 {
        warnings.push(format!("{} code blocks in response; using the first", blocks.len()));
    }
    let code = blocks.into_iter().next().unwrap_or_else(|| text.to_string());
    if code.trim().is_empty() {
        return Err(ResponseError::Malformed("no code found".into()));
    }
    let code = format!("{}\n", code.trim_end());
    let module = parse(&code).map_err(ResponseError::UnparseableHintCode)?;
    Ok(CodeResponse { code, module, warnings })
}

/// Prose without code blocks, cut to three sentences, pointing at the
/// lines the code hint changes.
pub fn parse_text_response(text: &str, hint: &CodeHint) -> Result<TextHint, ResponseError> {
    let prose = strip_fences(text);
    let flat = prose.split_whitespace().collect::<Vec<_>>().join(" ");
    let sentences = split_sentences(&flat);
    if sentences.is_empty() {
        return Err(ResponseError::Empty);
    }
    let text = sentences.into_iter().take(MAX_TEXT_SENTENCES).collect::<Vec<_>>().join(" ");
    Ok(TextHint { text, highlight: code_hint_span(hint) })
}

/// Lines of `before` touched by the hint's single change.
pub fn code_hint_span(hint: &CodeHint) -> LineSpan {
    let fallback = LineSpan::line(1);
    let (Ok(before), Ok(after)) = (parse(&hint.before), parse(&hint.after)) else { return fallback };
    let set = diff_modules(&before, &after);
    let span = set.units().next().map(|u| highlight(&hint.before, &before, u)).unwrap_or(fallback);
    span
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task() -> TaskSpec {
        TaskSpec {
            id: "t1".into(),
            description: "Read two numbers and print their sum.".into(),
            model_solution: "fun main() {\n    val a = readln().toInt()\n    println(\"Sum: \" + a)\n}\n".into(),
            predefined_hints: vec![],
            theory_topics: vec!["Variables".into()],
            project_id: "p".into(),
            prior_task_ids: vec![],
            starter: None,
        }
    }

    #[test]
    fn subgoal_prompt_is_deterministic() {
        let student = parse("").unwrap();
        let a = build_subgoal_prompt(&task(), "", &student, 0);
        let b = build_subgoal_prompt(&task(), "", &student, 0);
        assert_eq!(a, b);
        assert_eq!(a.fingerprint.len(), 64);
        assert!(a.rendered_text.contains("## Predefined hints\n(none)"));
        assert!(a.rendered_text.contains("## Functions already present in the student's code\n(none)"));
        assert!(a.rendered_text.contains("- main()"));
        assert!(a.rendered_text.contains("- \"Sum: \""));
        assert!(!a.rendered_text.contains("{{"));
        assert_ne!(a.fingerprint, build_subgoal_prompt(&task(), "", &student, 1).fingerprint);
        assert_ne!(a.fingerprint, a.reask().fingerprint);
        assert!(a.reask().rendered_text.starts_with(&a.rendered_text));
    }

    #[test]
    fn missing_errors_render_as_none() {
        let plan = parse_subgoal_response("t1", "1. Read a number [code]").unwrap();
        let p = build_code_hint_prompt(&plan, "fun main() {}\n", None, 0);
        assert!(p.rendered_text.contains("## Test errors\n(none)"));
        let p = build_code_hint_prompt(&plan, "fun main() {}\n", Some("  "), 0);
        assert!(p.rendered_text.contains("## Test errors\n(none)"));
        let p = build_code_hint_prompt(&plan, "fun main() {}\n", Some("expected 3"), 0);
        assert!(p.rendered_text.contains("## Test errors\nexpected 3"));
        assert!(p.rendered_text.contains("1. Read a number\n"));
    }

    #[test]
    fn subgoal_parsing() {
        let plan = parse_subgoal_response("t1", "1. Read two integers [code]\n\n2. Run the program [no-code]\n").unwrap();
        assert_eq!(plan.subgoals.len(), 2);
        assert_eq!(plan.subgoals[0].text, "Read two integers");
        assert_eq!(plan.subgoals[1].kind, SubgoalKind::NoCode);
        assert_eq!(plan.filtered().subgoals.len(), 1);
        assert_eq!(parse_subgoal_response("t1", &render_plan(&plan)).unwrap().subgoals, plan.subgoals);

        assert!(matches!(parse_subgoal_response("t1", "1. Read [code]\nSure, here you go"), Err(ResponseError::Malformed(_))));
        assert!(matches!(parse_subgoal_response("t1", "1. Read"), Err(ResponseError::Malformed(_))));
        assert!(matches!(parse_subgoal_response("t1", "  \n"), Err(ResponseError::Malformed(_))));
    }

    #[test]
    fn code_response_uses_first_fence() {
        let r = parse_code_response("Here:\n```kotlin\nfun main() {}\n```\nor\n```\nfun f() {}\n```").unwrap();
        assert_eq!(r.code, "fun main() {}\n");
        assert_eq!(r.warnings.len(), 1);
        let bare = parse_code_response("fun main() {}").unwrap();
        assert!(bare.warnings.is_empty());
        assert!(matches!(parse_code_response("```\nfun main( {\n```"), Err(ResponseError::UnparseableHintCode(_))));
        assert!(matches!(parse_code_response("```\n```"), Err(ResponseError::Malformed(_))));
    }

    #[test]
    fn text_response_is_cut_to_three_sentences() {
        let before = "fun main() {\n    println(1)\n}\n".to_string();
        let after = "fun main() {\n    println(1)\n    println(2)\n}\n".to_string();
        let set = diff_modules(&parse(&before).unwrap(), &parse(&after).unwrap());
        let hint = CodeHint {
            target_function: crate::syntax::FunctionKey::new("main", 0),
            before,
            after,
            retained_unit: set.units().next().unwrap().into(),
            provenance: crate::model::Provenance::LlmGenerated,
        };
        let t = parse_text_response("One. Two!\nThree? Four. Five.\n```\nprintln(2)\n```", &hint).unwrap();
        assert_eq!(t.text, "One. Two! Three?");
        assert_eq!(t.highlight, LineSpan::line(3));
        assert_eq!(parse_text_response("```\nx\n```", &hint).unwrap_err(), ResponseError::Empty);
    }
}
