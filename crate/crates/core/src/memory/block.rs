//! Text encoding of memory: the five-field listing used in trace blocks and
//! the terminal `FINAL MEMORY` block.

use thiserror::Error;

use super::{ConflictPair, MemoryState};

pub const FINAL_MEMORY_HEADER: &str = "FINAL MEMORY";

/// Makes a value safe for a single trimmed line. Backslashes, line breaks
/// and tabs become escapes; edge spaces become `\s`; a value that reads as an
/// empty marker gets a leading `\e`, which decodes to nothing.
pub fn escape_line(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let last = s.chars().count().saturating_sub(1);
    for (i, c) in s.chars().enumerate() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            ' ' if i == 0 || i == last => out.push_str("\\s"),
            c => out.push(c),
        }
    }
    if is_empty_marker(&out) && !out.is_empty() {
        out.insert_str(0, "\\e");
    }
    out
}

/// Inverse of [`escape_line`]. Unknown escapes are kept as written.
pub fn unescape_line(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('t') => out.push('\t'),
            Some('s') => out.push(' '),
            Some('e') => {}
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

fn scalar(out: &mut String, name: &str, value: &str) {
    out.push_str(name);
    out.push(':');
    if !value.is_empty() {
        out.push(' ');
        out.push_str(&escape_line(value));
    }
    out.push('\n');
}

fn list(out: &mut String, name: &str, items: impl Iterator<Item = String>) {
    out.push_str(name);
    out.push_str(":\n");
    for item in items {
        out.push_str("- ");
        out.push_str(&escape_line(&item));
        out.push('\n');
    }
}

/// The five field lines (`working:` through `resolution:`), each ending in LF.
pub fn render_memory_fields(memory: &MemoryState) -> String {
    let mut out = String::new();
    scalar(&mut out, "working", &memory.working);
    list(&mut out, "declarative", memory.declarative.iter().cloned());
    list(&mut out, "procedural", memory.procedural.iter().cloned());
    list(&mut out, "conflicts", memory.conflicts.iter().map(ToString::to_string));
    scalar(&mut out, "resolution", &memory.resolution);
    out
}

/// `FINAL MEMORY` followed by the five fields, LF-terminated.
pub fn render_final_memory(memory: &MemoryState) -> String {
    format!("{FINAL_MEMORY_HEADER}\n{}", render_memory_fields(memory))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    None,
    Declarative,
    Procedural,
    Conflicts,
}

/// Incremental, lenient parser for the five memory fields.
///
/// Feed it lines one at a time; it reports whether each line belonged to the
/// memory listing. Malformed conflict lines are kept as warnings instead of
/// failing the parse.
#[derive(Debug)]
pub struct MemoryBlockParser {
    memory: MemoryState,
    section: Section,
    seen_any: bool,
    pub warnings: Vec<String>,
}

impl Default for MemoryBlockParser {
    fn default() -> Self {
        Self::new()
    }
}

fn is_empty_marker(s: &str) -> bool {
    matches!(s, "" | "[]" | "none" | "(none)" | "(empty)" | "\"\"")
}

impl MemoryBlockParser {
    pub fn new() -> Self {
        Self { memory: MemoryState::new(), section: Section::None, seen_any: false, warnings: Vec::new() }
    }

    pub fn seen_any(&self) -> bool {
        self.seen_any
    }

    fn push_item(&mut self, item: &str) {
        let item = unescape_line(item.trim());
        if item.is_empty() {
            return;
        }
        match self.section {
            Section::Declarative => self.memory.declarative.push(item),
            Section::Procedural => self.memory.procedural.push(item),
            Section::Conflicts => match ConflictPair::parse(&item) {
                Ok(p) => self.memory.conflicts.push(p),
                Err(e) => self.warnings.push(format!("ignored conflict entry {item:?}: {e}")),
            },
            Section::None => {}
        }
    }

    /// Consumes `line` if it is part of the memory listing.
    pub fn feed(&mut self, line: &str) -> bool {
        let line = line.trim();
        if let Some((key, rest)) = line.split_once(':') {
            let rest = rest.trim();
            let section = match key.trim() {
                "working" => {
                    self.memory.working = if is_empty_marker(rest) { String::new() } else { unescape_line(rest) };
                    self.section = Section::None;
                    self.seen_any = true;
                    return true;
                }
                "resolution" => {
                    self.memory.resolution = if is_empty_marker(rest) { String::new() } else { unescape_line(rest) };
                    self.section = Section::None;
                    self.seen_any = true;
                    return true;
                }
                "declarative" => Some(Section::Declarative),
                "procedural" => Some(Section::Procedural),
                "conflicts" => Some(Section::Conflicts),
                _ => None,
            };
            if let Some(section) = section {
                self.section = section;
                self.seen_any = true;
                if !is_empty_marker(rest) {
                    self.push_item(rest);
                }
                return true;
            }
        }
        if self.section != Section::None {
            if let Some(item) = line.strip_prefix("- ").or_else(|| line.strip_prefix("* ")) {
                self.push_item(item);
                return true;
            }
            if line == "-" {
                return true;
            }
        }
        false
    }

    pub fn finish(self) -> (MemoryState, Vec<String>) {
        (self.memory, self.warnings)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("no `FINAL MEMORY` header found")]
    MissingHeader,
}

/// Parses the last `FINAL MEMORY` block found in `text`.
pub fn parse_final_memory(text: &str) -> Result<MemoryState, BlockError> {
    let lines: Vec<&str> = text.lines().collect();
    let start = lines
        .iter()
        .rposition(|l| l.trim().trim_matches(|c| c == '#' || c == '*' || c == ':' || c == ' ') == FINAL_MEMORY_HEADER)
        .ok_or(BlockError::MissingHeader)?;
    let mut parser = MemoryBlockParser::new();
    for line in &lines[start + 1..] {
        let t = line.trim();
        if t.is_empty() || t.starts_with("```") {
            continue;
        }
        if !parser.feed(t) {
            break;
        }
    }
    Ok(parser.finish().0)
}
