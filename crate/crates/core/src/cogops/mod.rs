//! Cognitive operations behind the builtins, and the provider interface
//! every backend implements.

pub mod rules;

use thiserror::Error;

use crate::memory::ConflictPair;

pub use rules::RuleProvider;

/// Output of conflict resolution: one merged statement per input pair, in
/// input order, plus a combined summary for `resolution`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub reconciled: Vec<(ConflictPair, String)>,
    pub summary: String,
}

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("conflict resolution requires at least one pair")]
    EmptyInput,
    #[error(transparent)]
    Backend(Box<dyn std::error::Error + Send + Sync>),
}

/// A backend for the extraction, detection and resolution builtins.
pub trait CognitiveOps {
    /// Short name used in reports.
    fn label(&self) -> String;

    fn extract_declarative(&self, text: &str) -> Result<Vec<String>, ProviderError>;

    fn extract_procedural(&self, text: &str) -> Result<Vec<String>, ProviderError>;

    /// Contradictions among `facts`; never a pair with identical sides.
    fn detect_conflicts(&self, facts: &[String]) -> Result<Vec<ConflictPair>, ProviderError>;

    /// Must return exactly one merged statement per pair.
    fn resolve_conflicts(&self, pairs: &[ConflictPair]) -> Result<Resolution, ProviderError>;
}

impl<T: CognitiveOps + ?Sized> CognitiveOps for &T {
    fn label(&self) -> String {
        (**self).label()
    }
    fn extract_declarative(&self, text: &str) -> Result<Vec<String>, ProviderError> {
        (**self).extract_declarative(text)
    }
    fn extract_procedural(&self, text: &str) -> Result<Vec<String>, ProviderError> {
        (**self).extract_procedural(text)
    }
    fn detect_conflicts(&self, facts: &[String]) -> Result<Vec<ConflictPair>, ProviderError> {
        (**self).detect_conflicts(facts)
    }
    fn resolve_conflicts(&self, pairs: &[ConflictPair]) -> Result<Resolution, ProviderError> {
        (**self).resolve_conflicts(pairs)
    }
}
