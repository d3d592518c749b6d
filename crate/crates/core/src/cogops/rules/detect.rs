use crate::memory::{ConflictCategory, ConflictPair};

use super::analysis::{FactAnalysis, Quantifier};

/// Category of the first rule that fires on two analyzed facts, if any.
///
/// Facts are only compared when their subject keys match exactly. Rules are
/// tried in order: absolute vs qualified quantifiers, opposite polarity with
/// equal value slots, then equal polarity with different value slots.
pub fn classify_pair(x: &FactAnalysis, y: &FactAnalysis) -> Option<ConflictCategory> {
    if x.subject_key != y.subject_key {
        return None;
    }
    let opposed =
        |p: Quantifier, q: Quantifier| p.is_absolute() && (q == Quantifier::Qualified || (q.is_absolute() && q != p));
    if opposed(x.quantifier, y.quantifier) || opposed(y.quantifier, x.quantifier) {
        return Some(ConflictCategory::AbsoluteQualified);
    }
    let value_key = |a: &FactAnalysis| a.value.as_ref().map(|v| v.key.clone());
    if x.polarity != y.polarity && value_key(x) == value_key(y) {
        return Some(ConflictCategory::Negation);
    }
    if x.polarity == y.polarity {
        if let (Some(a), Some(b)) = (value_key(x), value_key(y)) {
            if a != b {
                return Some(ConflictCategory::NumericCategorical);
            }
        }
    }
    None
}

/// All conflicting pairs among `facts`, as (earlier, later), ordered by the
/// earlier fact's position and then the later one's.
pub fn detect_pairs(facts: &[FactAnalysis]) -> Vec<ConflictPair> {
    let mut out = Vec::new();
    for (i, x) in facts.iter().enumerate() {
        for y in &facts[i + 1..] {
            if x.raw == y.raw {
                continue;
            }
            if let Some(category) = classify_pair(x, y) {
                if let Ok(pair) = ConflictPair::new(&x.raw, &y.raw, category) {
                    out.push(pair);
                }
            }
        }
    }
    out
}
