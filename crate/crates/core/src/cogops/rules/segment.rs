const ABBREVIATIONS: [&str; 11] = ["e.g.", "i.e.", "dr.", "mr.", "mrs.", "ms.", "prof.", "vs.", "st.", "jr.", "sr."];

fn ends_with_abbreviation(text: &str) -> bool {
    let word = text.rsplit(char::is_whitespace).next().unwrap_or("");
    let word = word.trim_start_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
    ABBREVIATIONS.contains(&word.as_str())
}

/// Splits prose into sentences at `.`, `!` or `?` followed by whitespace or
/// the end of input. Common abbreviations do not end a sentence.
pub fn segment_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let boundary = match iter.peek() {
            None => true,
            Some((_, next)) => next.is_whitespace(),
        };
        let end = i + c.len_utf8();
        if boundary && !(c == '.' && ends_with_abbreviation(&text[start..end])) {
            push_trimmed(&mut out, &text[start..end]);
            start = end;
        }
    }
    push_trimmed(&mut out, &text[start..]);
    out
}

fn push_trimmed(out: &mut Vec<String>, s: &str) {
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}
