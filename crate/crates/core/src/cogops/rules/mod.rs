//! Deterministic, lexicon-driven implementation of the cognitive operations.
//!
//! Facts are compared pairwise after reducing each to a [`FactAnalysis`]:
//! a subject key (content tokens in order), polarity, quantifier and an
//! optional value slot. Three rules fire on facts with equal subject keys:
//!
//! 1. absolute vs qualified (or opposite absolute) quantifiers,
//! 2. opposite polarity with equal value slots,
//! 3. equal polarity with different value slots.
//!
//! Resolution replaces each pair with a hedged statement that no longer
//! shares a subject key with either side, so re-detection finds nothing.

mod analysis;
mod detect;
mod lexicon;
mod resolve;
mod segment;

use crate::memory::ConflictPair;

use super::{CognitiveOps, ProviderError, Resolution};

pub use analysis::{
    analyze_fact, classify_sentence, normalize_token, numeric_key, FactAnalysis, Polarity, Quantifier, SentenceKind,
    ValueSlot,
};
pub use detect::classify_pair;
pub use lexicon::{parse_word_list, Lexicon};
pub use segment::segment_sentences;

/// Separator between merged statements in a resolution summary.
pub const SUMMARY_SEPARATOR: &str = "; ";

#[derive(Clone, Debug)]
pub struct RuleProvider {
    lexicon: Lexicon,
}

impl Default for RuleProvider {
    fn default() -> Self {
        Self::new()
    }
}

impl RuleProvider {
    /// A provider using the shipped word lists.
    pub fn new() -> Self {
        Self { lexicon: Lexicon::builtin() }
    }

    pub fn with_lexicon(lexicon: Lexicon) -> Self {
        Self { lexicon }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn analyze(&self, sentence: &str) -> FactAnalysis {
        analyze_fact(&self.lexicon, sentence)
    }

    pub fn classify(&self, sentence: &str) -> SentenceKind {
        classify_sentence(&self.lexicon, sentence)
    }

    fn extract(&self, text: &str, kind: SentenceKind) -> Vec<String> {
        segment_sentences(text).into_iter().filter(|s| self.classify(s) == kind).collect()
    }

    pub fn detect(&self, facts: &[String]) -> Vec<ConflictPair> {
        let analyzed: Vec<FactAnalysis> = facts.iter().map(|f| self.analyze(f)).collect();
        detect::detect_pairs(&analyzed)
    }

    /// Merged statement for one pair.
    pub fn merge(&self, pair: &ConflictPair) -> String {
        resolve::merge_pair(&self.lexicon, pair, &self.analyze(pair.a()), &self.analyze(pair.b()))
    }

    pub fn resolve(&self, pairs: &[ConflictPair]) -> Result<Resolution, ProviderError> {
        if pairs.is_empty() {
            return Err(ProviderError::EmptyInput);
        }
        let reconciled: Vec<(ConflictPair, String)> = pairs.iter().map(|p| (p.clone(), self.merge(p))).collect();
        let summary = reconciled.iter().map(|(_, s)| s.as_str()).collect::<Vec<_>>().join(SUMMARY_SEPARATOR);
        Ok(Resolution { reconciled, summary })
    }
}

impl CognitiveOps for RuleProvider {
    fn label(&self) -> String {
        "rules".into()
    }

    fn extract_declarative(&self, text: &str) -> Result<Vec<String>, ProviderError> {
        Ok(self.extract(text, SentenceKind::Declarative))
    }

    fn extract_procedural(&self, text: &str) -> Result<Vec<String>, ProviderError> {
        Ok(self.extract(text, SentenceKind::Procedural))
    }

    fn detect_conflicts(&self, facts: &[String]) -> Result<Vec<ConflictPair>, ProviderError> {
        Ok(self.detect(facts))
    }

    fn resolve_conflicts(&self, pairs: &[ConflictPair]) -> Result<Resolution, ProviderError> {
        self.resolve(pairs)
    }
}
