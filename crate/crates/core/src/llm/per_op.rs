//! One chat completion per builtin, each with a strict reply shape.

use crate::cogops::{CognitiveOps, ProviderError, Resolution};
use crate::memory::{ConflictPair, PAIR_SEPARATOR};

use super::client::{ChatBackend, ChatMessage, LlmError};

const SYSTEM: &str = "You carry out one cognitive operation of a reasoning program. \
Follow the reply format exactly. Do not add explanations, headings or numbering.";

const BULLET_RULE: &str = "Reply with one item per line, each line starting with \"- \". \
If there are none, reply with the single word NONE.";

fn declarative_prompt(text: &str) -> String {
    format!(
        "Extract the declarative knowledge (facts, states, descriptions) from the text below. \
         Copy each factual sentence as written. {BULLET_RULE}\n\nText:\n{text}"
    )
}

fn procedural_prompt(text: &str) -> String {
    format!(
        "Extract the procedural knowledge (instructions, steps, rules for action) from the text below. \
         Copy each procedural sentence as written. {BULLET_RULE}\n\nText:\n{text}"
    )
}

fn detect_prompt(facts: &[String]) -> String {
    let listing: String = facts.iter().map(|f| format!("- {f}\n")).collect();
    format!(
        "Identify contradictions between the stored facts below. A contradiction is two facts about the same \
         subject that cannot both hold: one negates the other, an absolute claim (always/never) meets a \
         qualified one (sometimes/usually), or the facts give different values for the same attribute. \
         Reply with one contradiction per line in the form \"- <fact A> || <fact B>\", copying both facts \
         exactly. If there are none, reply with the single word NONE.\n\nFacts:\n{listing}"
    )
}

fn resolve_prompt(pairs: &[ConflictPair]) -> String {
    let listing: String = pairs.iter().enumerate().map(|(i, p)| format!("{}. {p}\n", i + 1)).collect();
    format!(
        "Reconcile each contradiction below into a single hedged statement that keeps what both sides say \
         and marks the uncertainty (for example \"usually ... but sometimes not\" or \"uncertain between X \
         and Y\"). Reply with exactly {} line(s), each starting with \"- \", the n-th line reconciling \
         contradiction n.\n\nContradictions:\n{listing}",
        pairs.len()
    )
}

fn is_none_reply(reply: &str) -> bool {
    let t = reply.trim().trim_matches(['.', '`', '*']);
    t.is_empty() || t.eq_ignore_ascii_case("none") || t.eq_ignore_ascii_case("- none")
}

/// Lines of a bullet reply. Code fences are ignored; any other line without
/// the `- ` prefix is a format error.
pub fn parse_bullets(reply: &str) -> Result<Vec<String>, String> {
    if is_none_reply(reply) {
        return Ok(Vec::new());
    }
    let mut items = Vec::new();
    for line in reply.lines().map(str::trim) {
        if line.is_empty() || line.starts_with("```") {
            continue;
        }
        match line.strip_prefix("- ") {
            Some(item) if !item.trim().is_empty() => items.push(item.trim().to_string()),
            _ => return Err(format!("line {line:?} is not a \"- \" bullet")),
        }
    }
    Ok(items)
}

/// Lines of the form `A || B`, with or without a bullet.
pub fn parse_pair_lines(reply: &str) -> Result<Vec<ConflictPair>, String> {
    if is_none_reply(reply) {
        return Ok(Vec::new());
    }
    let mut pairs: Vec<ConflictPair> = Vec::new();
    for line in reply.lines().map(str::trim) {
        if line.is_empty() || line.starts_with("```") {
            continue;
        }
        let body = line.strip_prefix("- ").unwrap_or(line);
        if !body.contains(PAIR_SEPARATOR) {
            return Err(format!("line {line:?} has no {PAIR_SEPARATOR}"));
        }
        let pair = ConflictPair::parse(body).map_err(|e| format!("line {line:?}: {e}"))?;
        if !pairs.iter().any(|p| p.same_statements(&pair)) {
            pairs.push(pair);
        }
    }
    Ok(pairs)
}

/// [`CognitiveOps`] backed by a chat model.
pub struct LlmProvider<B> {
    backend: B,
}

impl<B: ChatBackend> LlmProvider<B> {
    pub fn new(backend: B) -> Self {
        Self { backend }
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    /// Asks once, and once more with a correction if the reply cannot be parsed.
    fn ask<T>(
        &self,
        operation: &'static str,
        prompt: String,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<T, LlmError> {
        let mut messages = vec![ChatMessage::system(SYSTEM), ChatMessage::user(prompt)];
        let first = self.backend.complete(&messages)?;
        let reason = match parse(&first) {
            Ok(v) => return Ok(v),
            Err(reason) => reason,
        };
        log::info!("{operation}: malformed reply ({reason}); asking to reformat");
        messages.push(ChatMessage::assistant(first));
        messages.push(ChatMessage::user(format!(
            "Your reply did not follow the required format: {reason}. Reply again with only the requested lines."
        )));
        let second = self.backend.complete(&messages)?;
        parse(&second).map_err(|reason| LlmError::OutputFormat { operation, reason, raw: second })
    }
}

fn backend(e: LlmError) -> ProviderError {
    ProviderError::Backend(Box::new(e))
}

impl<B: ChatBackend> CognitiveOps for LlmProvider<B> {
    fn label(&self) -> String {
        self.backend.label()
    }

    fn extract_declarative(&self, text: &str) -> Result<Vec<String>, ProviderError> {
        if text.trim().is_empty() {
            return Ok(Vec::new());
        }
        self.ask("EXTRACT_DECLARATIVE", declarative_prompt(text), parse_bullets).map_err(backend)
    }

    fn extract_procedural(&self, text: &str) -> Result<Vec<String>, ProviderError> {
        if text.trim().is_empty() {
            return Ok(Vec::new());
        }
        self.ask("EXTRACT_PROCEDURAL", procedural_prompt(text), parse_bullets).map_err(backend)
    }

    fn detect_conflicts(&self, facts: &[String]) -> Result<Vec<ConflictPair>, ProviderError> {
        if facts.len() < 2 {
            return Ok(Vec::new());
        }
        self.ask("DETECT_CONFLICTS", detect_prompt(facts), parse_pair_lines).map_err(backend)
    }

    fn resolve_conflicts(&self, pairs: &[ConflictPair]) -> Result<Resolution, ProviderError> {
        if pairs.is_empty() {
            return Err(ProviderError::EmptyInput);
        }
        let n = pairs.len();
        let merged = self
            .ask("RESOLVE_CONFLICTS", resolve_prompt(pairs), |reply| {
                let items = parse_bullets(reply)?;
                if items.len() == n {
                    Ok(items)
                } else {
                    Err(format!("expected {n} line(s), got {}", items.len()))
                }
            })
            .map_err(backend)?;
        let summary = merged.join(crate::cogops::rules::SUMMARY_SEPARATOR);
        Ok(Resolution { reconciled: pairs.iter().cloned().zip(merged).collect(), summary })
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Mutex;

    use super::*;

    /// Replies from a fixed script and records every conversation.
    struct Scripted {
        replies: Mutex<Vec<&'static str>>,
        seen: Mutex<Vec<Vec<ChatMessage>>>,
    }

    impl Scripted {
        fn new(replies: &[&'static str]) -> Self {
            Self { replies: Mutex::new(replies.iter().rev().copied().collect()), seen: Mutex::new(Vec::new()) }
        }

        fn calls(&self) -> usize {
            self.seen.lock().unwrap().len()
        }
    }

    impl ChatBackend for Scripted {
        fn complete(&self, messages: &[ChatMessage]) -> Result<String, LlmError> {
            self.seen.lock().unwrap().push(messages.to_vec());
            Ok(self.replies.lock().unwrap().pop().expect("script exhausted").to_string())
        }

        fn label(&self) -> String {
            "scripted".into()
        }
    }

    fn facts() -> Vec<String> {
        vec!["sky is clear".into(), "sky is not clear".into()]
    }

    #[test]
    fn bullet_parsing() {
        assert_eq!(parse_bullets("- a\n- b\n").unwrap(), vec!["a", "b"]);
        assert_eq!(parse_bullets("```\n- a\n```").unwrap(), vec!["a"]);
        assert!(parse_bullets("").unwrap().is_empty());
        assert!(parse_bullets("NONE").unwrap().is_empty());
        assert!(parse_bullets("Here you go:\n- a").is_err());
    }

    #[test]
    fn pair_parsing() {
        let pairs = parse_pair_lines("- sky is clear || sky is not clear").unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].a(), "sky is clear");
        assert!(parse_pair_lines("- sky is clear, sky is not clear").is_err());
        assert!(parse_pair_lines("- a || a").is_err());
        // reversed duplicates collapse
        assert_eq!(parse_pair_lines("a || b\nb || a").unwrap().len(), 1);
    }

    #[test]
    fn well_formed_reply_needs_one_call() {
        let p = LlmProvider::new(Scripted::new(&["- sky is clear || sky is not clear"]));
        assert_eq!(p.detect_conflicts(&facts()).unwrap().len(), 1);
        assert_eq!(p.backend().calls(), 1);
    }

    #[test]
    fn malformed_reply_gets_one_retry() {
        let p = LlmProvider::new(Scripted::new(&[
            "sky is clear vs sky is not clear",
            "- sky is clear || sky is not clear",
        ]));
        assert_eq!(p.detect_conflicts(&facts()).unwrap().len(), 1);
        let seen = p.backend().seen.lock().unwrap();
        assert_eq!(seen.len(), 2);
        assert_eq!(seen[1].len(), 4);
        assert_eq!(seen[1][2].role, super::super::client::Role::Assistant);
    }

    #[test]
    fn second_malformed_reply_is_a_format_error() {
        let p = LlmProvider::new(Scripted::new(&["nope", "still nope"]));
        let err = p.detect_conflicts(&facts()).unwrap_err();
        let ProviderError::Backend(inner) = err else { panic!("expected backend error") };
        match inner.downcast_ref::<LlmError>() {
            Some(LlmError::OutputFormat { raw, .. }) => assert_eq!(raw, "still nope"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn resolution_requires_one_line_per_pair() {
        let pair = ConflictPair::parse("sky is clear || sky is not clear").unwrap();
        let p = LlmProvider::new(Scripted::new(&["- a\n- b", "- It is uncertain whether the sky is clear"]));
        let r = p.resolve_conflicts(&[pair]).unwrap();
        assert_eq!(r.summary, "It is uncertain whether the sky is clear");
        assert_eq!(r.reconciled.len(), 1);
    }

    #[test]
    fn trivial_inputs_skip_the_model() {
        let p = LlmProvider::new(Scripted::new(&[]));
        assert!(p.extract_declarative("  ").unwrap().is_empty());
        assert!(p.detect_conflicts(&["one".into()]).unwrap().is_empty());
        assert!(matches!(p.resolve_conflicts(&[]), Err(ProviderError::EmptyInput)));
        assert_eq!(p.backend().calls(), 0);
    }
}
