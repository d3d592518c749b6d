//! The five-field cognitive memory and the values programs compute.
//!
//! `working` and `resolution` are single strings; `declarative`,
//! `procedural` and `conflicts` are insertion-ordered lists that only grow
//! through [`MemoryState::add`] and only shrink when conflicts are resolved.

mod block;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::ListField;

pub use block::{
    escape_line, parse_final_memory, render_final_memory, render_memory_fields, unescape_line, MemoryBlockParser,
    FINAL_MEMORY_HEADER,
};

/// The separator used by the `A || B` pair encoding.
pub const PAIR_SEPARATOR: &str = "||";

/// Which contradiction rule produced a pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConflictCategory {
    /// "always" against "sometimes" or "never".
    AbsoluteQualified,
    /// A statement against its negation.
    Negation,
    /// Same statement, different number, time or category.
    NumericCategorical,
    #[default]
    Unclassified,
}

impl ConflictCategory {
    pub const DETECTED: [ConflictCategory; 3] =
        [ConflictCategory::AbsoluteQualified, ConflictCategory::Negation, ConflictCategory::NumericCategorical];

    pub fn as_str(self) -> &'static str {
        match self {
            ConflictCategory::AbsoluteQualified => "absolute-qualified",
            ConflictCategory::Negation => "negation",
            ConflictCategory::NumericCategorical => "numeric-categorical",
            ConflictCategory::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for ConflictCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PairFormatError {
    #[error("expected exactly one `||` separator, found {0}")]
    SeparatorCount(usize),
    #[error("conflict pair side is empty")]
    EmptySide,
    #[error("conflict pair sides are identical: {0:?}")]
    IdenticalSides(String),
}

/// Two contradictory statements, serialized as `a || b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConflictPair {
    a: String,
    b: String,
    category: ConflictCategory,
}

impl ConflictPair {
    /// Builds a pair from two statements. Sides are trimmed, must be
    /// non-empty, distinct, and must not contain `||`.
    pub fn new(a: &str, b: &str, category: ConflictCategory) -> Result<Self, PairFormatError> {
        let (a, b) = (a.trim(), b.trim());
        let separators = a.matches(PAIR_SEPARATOR).count() + b.matches(PAIR_SEPARATOR).count();
        if separators > 0 {
            return Err(PairFormatError::SeparatorCount(separators + 1));
        }
        if a.is_empty() || b.is_empty() {
            return Err(PairFormatError::EmptySide);
        }
        if a == b {
            return Err(PairFormatError::IdenticalSides(a.to_string()));
        }
        Ok(Self { a: a.to_string(), b: b.to_string(), category })
    }

    /// Parses `a || b`. The category is always `Unclassified`.
    pub fn parse(text: &str) -> Result<Self, PairFormatError> {
        let parts: Vec<&str> = text.split(PAIR_SEPARATOR).collect();
        if parts.len() != 2 {
            return Err(PairFormatError::SeparatorCount(parts.len() - 1));
        }
        Self::new(parts[0], parts[1], ConflictCategory::Unclassified)
    }

    pub fn a(&self) -> &str {
        &self.a
    }

    pub fn b(&self) -> &str {
        &self.b
    }

    pub fn category(&self) -> ConflictCategory {
        self.category
    }

    pub fn with_category(mut self, category: ConflictCategory) -> Self {
        self.category = category;
        self
    }

    /// Same two statements, in either orientation, ignoring whitespace runs
    /// and category.
    pub fn same_statements(&self, other: &ConflictPair) -> bool {
        let (a, b) = (normalize_ws(&self.a), normalize_ws(&self.b));
        let (c, d) = (normalize_ws(&other.a), normalize_ws(&other.b));
        (a == c && b == d) || (a == d && b == c)
    }
}

impl fmt::Display for ConflictPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {PAIR_SEPARATOR} {}", self.a, self.b)
    }
}

/// Collapses whitespace runs to single spaces and trims.
pub fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A runtime value bound to a program variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Str(String),
    List(Vec<String>),
    Pairs(Vec<ConflictPair>),
    Int(i64),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Str(_) => "string",
            Value::List(_) => "string list",
            Value::Pairs(_) => "conflict-pair list",
            Value::Int(_) => "integer",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => f.write_str(s),
            Value::Int(n) => write!(f, "{n}"),
            Value::List(items) => write!(f, "[{}]", items.join("; ")),
            Value::Pairs(pairs) => {
                let items: Vec<String> = pairs.iter().map(ToString::to_string).collect();
                write!(f, "[{}]", items.join("; "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("cannot add a {found} to `{field}` (expected {expected})")]
pub struct TypeMismatch {
    pub field: ListField,
    pub expected: &'static str,
    pub found: &'static str,
}

/// Counts reported by [`MemoryState::add`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AddOutcome {
    pub added: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MemoryState {
    pub working: String,
    pub declarative: Vec<String>,
    pub procedural: Vec<String>,
    pub conflicts: Vec<ConflictPair>,
    pub resolution: String,
}

impl MemoryState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn conflicts_count(&self) -> usize {
        self.conflicts.len()
    }

    pub fn field_len(&self, field: ListField) -> usize {
        match field {
            ListField::Declarative => self.declarative.len(),
            ListField::Procedural => self.procedural.len(),
            ListField::Conflicts => self.conflicts.len(),
        }
    }

    /// Appends values to a list field in order. Entries equal to an existing
    /// one after whitespace normalization are skipped, as are empty strings.
    pub fn add(&mut self, field: ListField, values: &Value) -> Result<AddOutcome, TypeMismatch> {
        let mut outcome = AddOutcome::default();
        match (field, values) {
            (ListField::Declarative | ListField::Procedural, Value::List(_) | Value::Str(_)) => {
                let items: &[String] = match values {
                    Value::List(items) => items,
                    Value::Str(s) => std::slice::from_ref(s),
                    _ => unreachable!(),
                };
                let list = if field == ListField::Declarative { &mut self.declarative } else { &mut self.procedural };
                for item in items {
                    let item = item.trim();
                    let key = normalize_ws(item);
                    if key.is_empty() || list.iter().any(|e| normalize_ws(e) == key) {
                        outcome.skipped += 1;
                    } else {
                        list.push(item.to_string());
                        outcome.added += 1;
                    }
                }
            }
            (ListField::Conflicts, Value::Pairs(pairs)) => {
                for pair in pairs {
                    if self.conflicts.iter().any(|p| p.same_statements(pair)) {
                        outcome.skipped += 1;
                    } else {
                        self.conflicts.push(pair.clone());
                        outcome.added += 1;
                    }
                }
            }
            (field, other) => {
                let expected = if field == ListField::Conflicts { "conflict-pair list" } else { "string list" };
                return Err(TypeMismatch { field, expected, found: other.type_name() });
            }
        }
        Ok(outcome)
    }

    /// Equality that ignores conflict categories, which the text encoding
    /// does not carry.
    pub fn same_content(&self, other: &MemoryState) -> bool {
        self.working == other.working
            && self.declarative == other.declarative
            && self.procedural == other.procedural
            && self.resolution == other.resolution
            && self.conflicts.len() == other.conflicts.len()
            && self.conflicts.iter().zip(&other.conflicts).all(|(x, y)| x.a == y.a && x.b == y.b)
    }
}

/// Variable bindings of one execution. The five memory field names are not
/// stored here; the interpreter resolves them against [`MemoryState`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Environment {
    bindings: HashMap<String, Value>,
}

pub const MEMORY_FIELDS: [&str; 5] = ["working", "declarative", "procedural", "conflicts", "resolution"];

pub fn is_memory_field(name: &str) -> bool {
    MEMORY_FIELDS.contains(&name)
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Looks a name up, resolving memory fields against `memory`.
    pub fn lookup(&self, name: &str, memory: &MemoryState) -> Option<Value> {
        match name {
            "working" => Some(Value::Str(memory.working.clone())),
            "declarative" => Some(Value::List(memory.declarative.clone())),
            "procedural" => Some(Value::List(memory.procedural.clone())),
            "conflicts" => Some(Value::Pairs(memory.conflicts.clone())),
            "resolution" => Some(Value::Str(memory.resolution.clone())),
            _ => self.bindings.get(name).cloned(),
        }
    }

    /// Binds an ordinary variable. Memory field names are rejected; callers
    /// write those through [`MemoryState`].
    pub fn bind(&mut self, name: &str, value: Value) {
        debug_assert!(!is_memory_field(name));
        self.bindings.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }
}
