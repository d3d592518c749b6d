//! Per-sentence feature extraction for the contradiction rules.

use super::lexicon::Lexicon;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    AbsoluteAlways,
    AbsoluteNever,
    Qualified,
    None,
}

impl Quantifier {
    pub fn is_absolute(self) -> bool {
        matches!(self, Quantifier::AbsoluteAlways | Quantifier::AbsoluteNever)
    }
}

/// The number, time or category a statement asserts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValueSlot {
    /// As written, without surrounding punctuation.
    pub token: String,
    /// Comparison key: times share `h:mm`, other numbers are canonical
    /// decimals, categories are lowercase.
    pub key: String,
    pub(crate) word: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactAnalysis {
    pub raw: String,
    pub subject_key: Vec<String>,
    pub polarity: Polarity,
    pub quantifier: Quantifier,
    pub value: Option<ValueSlot>,
    /// Whitespace-word index of the quantifier that set `quantifier`.
    pub(crate) quantifier_word: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SentenceKind {
    Declarative,
    Procedural,
}

/// Lowercases, unifies apostrophes and strips leading/trailing punctuation.
pub fn normalize_token(word: &str) -> String {
    word.replace(['\u{2019}', '\u{2018}'], "'").trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase()
}

fn strip_edges(word: &str) -> &str {
    word.trim_matches(|c: char| !c.is_alphanumeric())
}

/// Splits a contraction like `isn't` into its base verb.
fn split_negated(token: &str) -> Option<String> {
    if token == "cannot" {
        return Some("can".into());
    }
    let base = token.strip_suffix("n't")?;
    Some(match base {
        "ca" => "can".into(),
        "wo" => "will".into(),
        "sha" => "shall".into(),
        "" => return None,
        other => other.into(),
    })
}

/// Comparison key for number and time tokens. Plain integers up to 24,
/// `9am`/`9pm` and `09:00` forms all map to `h:mm`.
pub fn numeric_key(token: &str) -> Option<String> {
    let (body, meridiem) = if let Some(b) = token.strip_suffix("am") {
        (b, Some(false))
    } else if let Some(b) = token.strip_suffix("pm") {
        (b, Some(true))
    } else {
        (token, None)
    };
    if body.is_empty() || !body.starts_with(|c: char| c.is_ascii_digit()) {
        return None;
    }
    if let Some((h, m)) = body.split_once(':') {
        let (h, m): (u32, u32) = (h.parse().ok()?, m.parse().ok()?);
        if m >= 60 || h > 24 {
            return None;
        }
        let h = apply_meridiem(h, meridiem)?;
        return Some(format!("{h}:{m:02}"));
    }
    if body.chars().all(|c| c.is_ascii_digit()) {
        let n: u64 = body.parse().ok()?;
        if meridiem.is_some() || n <= 24 {
            let h = apply_meridiem(u32::try_from(n).ok()?, meridiem)?;
            return Some(format!("{h}:00"));
        }
        return Some(n.to_string());
    }
    if meridiem.is_some() {
        return None;
    }
    let (int, frac) = body.split_once('.')?;
    if int.is_empty() || frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let frac = frac.trim_end_matches('0');
    let int = int.trim_start_matches('0');
    let int = if int.is_empty() { "0" } else { int };
    if frac.is_empty() {
        numeric_key(int)
    } else {
        Some(format!("{int}.{frac}"))
    }
}

fn apply_meridiem(h: u32, pm: Option<bool>) -> Option<u32> {
    match pm {
        None => Some(h),
        Some(_) if h == 0 || h > 12 => None,
        Some(false) => Some(h % 12),
        Some(true) => Some(h % 12 + 12),
    }
}

struct Content {
    token: String,
    word: usize,
}

/// Extracts polarity, quantifier, value slot and subject key from a fact.
pub fn analyze_fact(lexicon: &Lexicon, sentence: &str) -> FactAnalysis {
    let mut polarity = Polarity::Positive;
    let mut quantifier = Quantifier::None;
    let mut quantifier_word = None;
    let mut content: Vec<Content> = Vec::new();

    for (word_idx, word) in sentence.split_whitespace().enumerate() {
        let token = normalize_token(word);
        if token.is_empty() {
            continue;
        }
        if let Some(base) = split_negated(&token) {
            polarity = Polarity::Negative;
            content.push(Content { token: base, word: word_idx });
            continue;
        }
        let found = if lexicon.absolute_never.contains(&token) {
            Some(Quantifier::AbsoluteNever)
        } else if lexicon.absolute_always.contains(&token) {
            Some(Quantifier::AbsoluteAlways)
        } else if lexicon.qualified.contains(&token) {
            Some(Quantifier::Qualified)
        } else {
            None
        };
        if lexicon.negation.contains(&token) || found == Some(Quantifier::AbsoluteNever) {
            polarity = Polarity::Negative;
        }
        if let Some(q) = found {
            if quantifier == Quantifier::None {
                quantifier = q;
                quantifier_word = Some(word_idx);
            }
            continue;
        }
        if lexicon.negation.contains(&token) || lexicon.articles.contains(&token) {
            continue;
        }
        content.push(Content { token, word: word_idx });
    }

    let words: Vec<&str> = sentence.split_whitespace().collect();
    let pick = |pred: &dyn Fn(&Content) -> Option<String>| {
        content.iter().enumerate().skip(1).rev().find_map(|(i, c)| pred(c).map(|key| (i, key)))
    };
    let slot = pick(&|c| numeric_key(&c.token))
        .or_else(|| pick(&|c| lexicon.categories.contains(&c.token).then(|| c.token.clone())));
    let value = slot.map(|(i, key)| {
        let word = content[i].word;
        ValueSlot { token: strip_edges(words[word]).to_string(), key, word }
    });
    let value_idx = slot_index(&content, value.as_ref());
    let subject_key =
        content.into_iter().enumerate().filter(|(i, _)| Some(*i) != value_idx).map(|(_, c)| c.token).collect();

    FactAnalysis { raw: sentence.trim().to_string(), subject_key, polarity, quantifier, value, quantifier_word }
}

fn slot_index(content: &[Content], value: Option<&ValueSlot>) -> Option<usize> {
    let v = value?;
    content.iter().position(|c| c.word == v.word)
}

/// Decides whether a sentence states a rule or action (procedural) or a fact.
pub fn classify_sentence(lexicon: &Lexicon, sentence: &str) -> SentenceKind {
    let tokens: Vec<String> = sentence.split_whitespace().map(normalize_token).filter(|t| !t.is_empty()).collect();
    let is_verb = |t: Option<&String>| t.is_some_and(|t| lexicon.verbs.contains(t));
    let Some(first) = tokens.first() else {
        return SentenceKind::Declarative;
    };

    let imperative = is_verb(Some(first));
    let step_marker = lexicon.step_markers.contains(first)
        || (first == "step" && tokens.get(1).is_some_and(|t| t.chars().all(|c| c.is_ascii_digit())));
    let conditional = (first == "if" || first == "when") && {
        let words: Vec<&str> = sentence.split_whitespace().collect();
        words.iter().position(|w| w.ends_with(',')).is_some_and(|comma| {
            let mut rest = words[comma + 1..].iter().map(|w| normalize_token(w));
            let head = rest.next();
            match head.as_deref() {
                Some("then") => is_verb(rest.next().as_ref()),
                _ => is_verb(head.as_ref()),
            }
        })
    };
    let modal = tokens.windows(2).any(|w| lexicon.modals.contains(&w[0]) && lexicon.verbs.contains(&w[1]))
        || tokens.windows(3).any(|w| {
            lexicon.modals.contains(&w[0])
                && matches!(w[1].as_str(), "always" | "never" | "not" | "first")
                && lexicon.verbs.contains(&w[2])
        });

    if imperative || step_marker || conditional || modal {
        SentenceKind::Procedural
    } else {
        SentenceKind::Declarative
    }
}
