use crate::memory::{ConflictCategory, ConflictPair};

use super::analysis::{FactAnalysis, Polarity, Quantifier};
use super::lexicon::Lexicon;

fn strip_final_punct(s: &str) -> &str {
    s.trim_end().trim_end_matches(['.', '!', '?'])
}

/// Rebuilds `raw` with whitespace-word `idx` replaced, keeping any
/// punctuation glued to the word (other than sentence-final punctuation on
/// the last word).
fn replace_word(raw: &str, idx: usize, replacement: &str) -> String {
    let words: Vec<&str> = raw.split_whitespace().collect();
    let out: Vec<String> = words
        .iter()
        .enumerate()
        .map(|(i, w)| {
            if i != idx {
                return (*w).to_string();
            }
            let core_start = w.find(|c: char| c.is_alphanumeric()).unwrap_or(0);
            let core_end = w
                .rfind(|c: char| c.is_alphanumeric())
                .map(|p| p + w[p..].chars().next().map_or(1, char::len_utf8))
                .unwrap_or(w.len());
            format!("{}{}{}", &w[..core_start], replacement, &w[core_end..])
        })
        .collect();
    out.join(" ")
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Lowercases a leading article so the clause reads mid-sentence.
fn as_clause(lexicon: &Lexicon, s: &str) -> String {
    let first = s.split_whitespace().next().unwrap_or("");
    if lexicon.articles.contains(&first.to_lowercase()) {
        let mut chars = s.chars();
        match chars.next() {
            Some(c) => c.to_lowercase().chain(chars).collect(),
            None => String::new(),
        }
    } else {
        s.to_string()
    }
}

/// Merges the two sides of a pair into one hedged statement.
pub fn merge_pair(lexicon: &Lexicon, pair: &ConflictPair, x: &FactAnalysis, y: &FactAnalysis) -> String {
    match pair.category() {
        ConflictCategory::AbsoluteQualified => {
            // Prefer a side whose quantifier is not "never" as the base clause.
            let base = if x.quantifier == Quantifier::AbsoluteNever && y.quantifier != Quantifier::AbsoluteNever {
                y
            } else {
                x
            };
            let clause = match base.quantifier_word {
                Some(idx) => replace_word(&base.raw, idx, "usually"),
                None => base.raw.clone(),
            };
            format!("{}, but sometimes not", capitalize(strip_final_punct(&clause)))
        }
        ConflictCategory::Negation => {
            let positive = if x.polarity == Polarity::Positive { x } else { y };
            format!("It is uncertain whether {}", as_clause(lexicon, strip_final_punct(&positive.raw)))
        }
        ConflictCategory::NumericCategorical => {
            let (Some(vx), Some(vy)) = (&x.value, &y.value) else {
                return unclassified(pair);
            };
            let either = format!("either {} or {}", vx.token, vy.token);
            let clause = replace_word(&x.raw, vx.word, &either);
            format!("{} (uncertain between {} and {})", capitalize(strip_final_punct(&clause)), vx.token, vy.token)
        }
        ConflictCategory::Unclassified => unclassified(pair),
    }
}

fn unclassified(pair: &ConflictPair) -> String {
    format!("Sources disagree: {} / {}", strip_final_punct(pair.a()), strip_final_punct(pair.b()))
}
