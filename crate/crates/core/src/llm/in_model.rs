//! Whole-program execution inside the model, guided by the interpreter file.

use std::path::Path;

use thiserror::Error;

use crate::interpreter::{parse_trace_text, TraceEntry, TraceParseError};
use crate::lang::{format_program, Program};
use crate::memory::MemoryState;

use super::client::{ChatBackend, ChatMessage, LlmError};

/// Natural-language specification of the language, sent as the system prompt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpreterFile {
    text: String,
}

pub const BUILTIN_INTERPRETER_FILE: &str = include_str!("../../assets/interpreter.md");

impl Default for InterpreterFile {
    fn default() -> Self {
        Self::builtin()
    }
}

impl InterpreterFile {
    pub fn builtin() -> Self {
        Self { text: BUILTIN_INTERPRETER_FILE.to_string() }
    }

    pub fn new(text: impl Into<String>) -> Self {
        Self { text: text.into() }
    }

    pub fn from_path(path: &Path) -> std::io::Result<Self> {
        std::fs::read_to_string(path).map(Self::new)
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

/// A trace written by the model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelTrace {
    pub entries: Vec<TraceEntry>,
    pub final_memory: MemoryState,
    pub raw: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Error)]
pub enum InModelError {
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error("could not parse model trace: {source}")]
    Parse { source: TraceParseError, raw: String },
}

impl InModelError {
    /// The model's verbatim reply, when there was one.
    pub fn raw(&self) -> Option<&str> {
        match self {
            InModelError::Parse { raw, .. } => Some(raw),
            InModelError::Llm(_) => None,
        }
    }
}

pub fn user_prompt(program: &Program, scenario: &str) -> String {
    format!(
        "Execute this program.\n\nPROGRAM:\n{}\n\nSCENARIO (the value of INPUT()):\n{}\n\n\
         Write the trace for every executed line, then the FINAL MEMORY block.",
        format_program(program),
        scenario.trim_end()
    )
}

/// Parses a model reply. Never panics; fails only when the reply has no
/// `FINAL MEMORY` block.
pub fn parse_model_trace(raw: &str) -> Result<ModelTrace, InModelError> {
    match parse_trace_text(raw) {
        Ok(t) => Ok(ModelTrace {
            entries: t.entries,
            final_memory: t.final_memory,
            raw: raw.to_string(),
            warnings: t.warnings,
        }),
        Err(source) => Err(InModelError::Parse { source, raw: raw.to_string() }),
    }
}

pub fn run_in_model(
    backend: &dyn ChatBackend,
    interpreter: &InterpreterFile,
    program: &Program,
    scenario: &str,
) -> Result<ModelTrace, InModelError> {
    let messages = [ChatMessage::system(interpreter.text()), ChatMessage::user(user_prompt(program, scenario))];
    let raw = backend.complete(&messages)?;
    parse_model_trace(&raw)
}
