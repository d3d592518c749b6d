//! Lexing, parsing and canonical formatting of Cognitive BASIC source.

mod ast;
mod lexer;
mod parser;

pub use ast::{Builtin, CompareOp, Comparison, Expression, LineNumber, ListField, Program, Statement};
pub use lexer::{is_identifier, tokenize, Keyword, LexError, LexErrorKind, Token};
pub use parser::{format_program, parse_program, parse_statement, LineError, ProgramError, StatementError};

/// The extract / detect / resolve program used by the benchmark.
pub const CONFLICT_RESOLUTION_PROGRAM: &str = include_str!("../../programs/conflict_resolution.cb");

/// Splits a scenario into facts and rules and prints both.
pub const EXTRACT_KNOWLEDGE_PROGRAM: &str = include_str!("../../programs/extract_knowledge.cb");
