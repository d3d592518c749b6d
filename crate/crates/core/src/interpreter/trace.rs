//! Trace encodings: the human-readable block listing (also the format a
//! model is asked to produce) and one-JSON-object-per-line records.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{NextLine, RunResult, TraceEntry};
use crate::memory::{
    render_final_memory, render_memory_fields, ConflictPair, MemoryBlockParser, MemoryState, FINAL_MEMORY_HEADER,
};

/// One entry block, blank-line terminated.
pub fn render_trace_entry(entry: &TraceEntry) -> String {
    format!(
        "LINE {}: {}\nRATIONALE: {}\n{}NEXT: {}\n\n",
        entry.line,
        entry.instruction,
        entry.rationale,
        render_memory_fields(&entry.memory),
        entry.next
    )
}

/// All entry blocks, an `OUTCOME:` line for runs that did not complete, and
/// the final memory block.
pub fn render_trace(result: &RunResult) -> String {
    let mut out: String = result.trace.iter().map(render_trace_entry).collect();
    if !result.outcome.is_completed() {
        out.push_str(&format!("OUTCOME: {}\n\n", result.outcome.label()));
    }
    out.push_str(&render_final_memory(&result.final_memory));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryRecord {
    pub working: String,
    pub declarative: Vec<String>,
    pub procedural: Vec<String>,
    pub conflicts: Vec<String>,
    pub resolution: String,
}

impl From<&MemoryState> for MemoryRecord {
    fn from(m: &MemoryState) -> Self {
        Self {
            working: m.working.clone(),
            declarative: m.declarative.clone(),
            procedural: m.procedural.clone(),
            conflicts: m.conflicts.iter().map(ToString::to_string).collect(),
            resolution: m.resolution.clone(),
        }
    }
}

impl MemoryRecord {
    fn into_memory(self) -> Result<MemoryState, String> {
        let conflicts = self
            .conflicts
            .iter()
            .map(|c| ConflictPair::parse(c).map_err(|e| format!("conflict {c:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MemoryState {
            working: self.working,
            declarative: self.declarative,
            procedural: self.procedural,
            conflicts,
            resolution: self.resolution,
        })
    }
}

/// `next` is a line number or the string `"END"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NextRecord {
    Line(u32),
    End(String),
}

/// A JSONL record: either a step or the terminal record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TraceRecord {
    Step { line: u32, instruction: String, rationale: String, memory: MemoryRecord, next: NextRecord },
    Final { memory: MemoryRecord, outcome: String },
}

impl From<&TraceEntry> for TraceRecord {
    fn from(e: &TraceEntry) -> Self {
        TraceRecord::Step {
            line: e.line,
            instruction: e.instruction.clone(),
            rationale: e.rationale.clone(),
            memory: (&e.memory).into(),
            next: match e.next {
                NextLine::Line(n) => NextRecord::Line(n),
                NextLine::End => NextRecord::End("END".into()),
            },
        }
    }
}

pub fn write_trace_jsonl<W: Write>(mut w: W, result: &RunResult) -> io::Result<()> {
    for entry in &result.trace {
        serde_json::to_writer(&mut w, &TraceRecord::from(entry))?;
        w.write_all(b"\n")?;
    }
    let last = TraceRecord::Final { memory: (&result.final_memory).into(), outcome: result.outcome.label() };
    serde_json::to_writer(&mut w, &last)?;
    w.write_all(b"\n")
}

#[derive(Debug, Error)]
pub enum TraceParseError {
    #[error("record {record}: {detail}")]
    BadRecord { record: usize, detail: String },
    #[error("trace has no final memory")]
    MissingFinalMemory,
}

/// A trace read back from text or JSONL.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParsedTrace {
    pub entries: Vec<TraceEntry>,
    pub final_memory: MemoryState,
    pub outcome: Option<String>,
    pub warnings: Vec<String>,
}

pub fn parse_trace_jsonl(text: &str) -> Result<ParsedTrace, TraceParseError> {
    let mut entries = Vec::new();
    let mut last = None;
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let bad = |detail: String| TraceParseError::BadRecord { record: i + 1, detail };
        let record: TraceRecord = serde_json::from_str(raw).map_err(|e| bad(e.to_string()))?;
        match record {
            TraceRecord::Step { line, instruction, rationale, memory, next } => {
                let next = match next {
                    NextRecord::Line(n) => NextLine::Line(n),
                    NextRecord::End(s) if s == "END" => NextLine::End,
                    NextRecord::End(s) => return Err(bad(format!("invalid next {s:?}"))),
                };
                entries.push(TraceEntry {
                    line,
                    instruction,
                    rationale,
                    memory: memory.into_memory().map_err(bad)?,
                    next,
                });
            }
            TraceRecord::Final { memory, outcome } => last = Some((memory.into_memory().map_err(bad)?, outcome)),
        }
    }
    let (final_memory, outcome) = last.ok_or(TraceParseError::MissingFinalMemory)?;
    Ok(ParsedTrace { entries, final_memory, outcome: Some(outcome), warnings: Vec::new() })
}

struct PendingEntry {
    line: u32,
    instruction: String,
    rationale: String,
    memory: MemoryBlockParser,
    next: Option<NextLine>,
}

/// Strips markdown emphasis and headings, and `---` rules, but not a
/// single `- ` bullet (memory list items start with one).
fn strip_decoration(line: &str) -> &str {
    let mut t = line.trim().trim_start_matches(['#', '*', '>', ' ']);
    if t.starts_with("--") {
        t = t.trim_start_matches(['-', ' ']);
    }
    t.trim_end_matches(['*', '-', ' '])
}

/// Recognizes `LINE 20: ...`, `LINE 20 - ...` and `--- LINE 20 ---`.
fn parse_header(line: &str) -> Option<(u32, String)> {
    let t = strip_decoration(line);
    let rest = t.strip_prefix("LINE").or_else(|| t.strip_prefix("Line"))?;
    if !rest.starts_with(char::is_whitespace) {
        return None;
    }
    let rest = rest.trim_start();
    let digits: String = rest.chars().take_while(char::is_ascii_digit).collect();
    let n = digits.parse().ok()?;
    let tail = rest[digits.len()..].trim_start().trim_start_matches([':', '-', ')', '.']).trim();
    Some((n, tail.trim_matches('`').to_string()))
}

fn field<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let t = strip_decoration(line);
    let (k, v) = t.split_once(':')?;
    k.trim().trim_matches('*').eq_ignore_ascii_case(key).then(|| v.trim_start_matches(['*', ' ']).trim())
}

fn parse_next(s: &str) -> Option<NextLine> {
    let s = s.trim().trim_matches(['`', '.', '*']);
    if s.eq_ignore_ascii_case("END") {
        Some(NextLine::End)
    } else {
        s.parse().ok().map(NextLine::Line)
    }
}

/// Leniently parses the block format produced by [`render_trace`] or by a
/// model following the same layout. Prose between blocks is ignored.
pub fn parse_trace_text(text: &str) -> Result<ParsedTrace, TraceParseError> {
    let mut pending: Vec<PendingEntry> = Vec::new();
    let mut warnings = Vec::new();
    let mut outcome = None;
    let mut final_parser: Option<MemoryBlockParser> = None;

    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with("```") {
            continue;
        }
        if strip_decoration(line).trim_end_matches(':') == FINAL_MEMORY_HEADER {
            final_parser = Some(MemoryBlockParser::new());
            continue;
        }
        if let Some(parser) = final_parser.as_mut() {
            parser.feed(line);
            continue;
        }
        if let Some((n, instruction)) = parse_header(line) {
            pending.push(PendingEntry {
                line: n,
                instruction,
                rationale: String::new(),
                memory: MemoryBlockParser::new(),
                next: None,
            });
            continue;
        }
        if let Some(v) = field(line, "OUTCOME") {
            outcome = Some(v.to_string());
            continue;
        }
        let Some(entry) = pending.last_mut() else { continue };
        if let Some(v) = field(line, "INSTRUCTION") {
            entry.instruction = v.trim_matches('`').to_string();
        } else if let Some(v) = field(line, "RATIONALE") {
            entry.rationale = v.to_string();
        } else if let Some(v) = field(line, "NEXT") {
            entry.next = parse_next(v);
            if entry.next.is_none() {
                warnings.push(format!("line {}: unreadable NEXT {v:?}", entry.line));
            }
        } else {
            entry.memory.feed(line);
        }
    }

    let final_parser = final_parser.ok_or(TraceParseError::MissingFinalMemory)?;
    let following: Vec<Option<u32>> = pending.iter().skip(1).map(|p| Some(p.line)).chain(Some(None)).collect();
    let mut entries = Vec::with_capacity(pending.len());
    for (p, after) in pending.into_iter().zip(following) {
        if !p.memory.seen_any() {
            warnings.push(format!("line {}: no memory snapshot", p.line));
        }
        let next = p.next.unwrap_or_else(|| {
            warnings.push(format!("line {}: missing NEXT", p.line));
            after.map_or(NextLine::End, NextLine::Line)
        });
        let (memory, w) = p.memory.finish();
        warnings.extend(w.into_iter().map(|w| format!("line {}: {w}", p.line)));
        entries.push(TraceEntry { line: p.line, instruction: p.instruction, rationale: p.rationale, memory, next });
    }
    let (final_memory, w) = final_parser.finish();
    warnings.extend(w);
    Ok(ParsedTrace { entries, final_memory, outcome, warnings })
}
