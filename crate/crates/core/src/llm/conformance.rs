//! Checks a claimed trace against the program's control flow and the
//! memory rules.

use std::fmt;

use crate::interpreter::{NextLine, TraceEntry};
use crate::lang::{Builtin, Expression, LineNumber, ListField, Program, Statement};
use crate::memory::MemoryState;

use super::in_model::ModelTrace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    /// (a) an executed or claimed next line is not in the program
    UnknownLine,
    /// (b) control did not move to the statement's successor
    WrongSuccessor,
    /// (c) an IF went the other way than the snapshot's conflict count implies
    BranchMismatch,
    /// (d) a list field shrank outside conflict resolution
    MemoryShrank,
    /// (e) conflicts remain after a resolution step
    UnresolvedConflicts,
    /// (f) the trace does not finish at END
    MissingEnd,
}

impl ViolationKind {
    pub const ALL: [ViolationKind; 6] = [
        ViolationKind::UnknownLine,
        ViolationKind::WrongSuccessor,
        ViolationKind::BranchMismatch,
        ViolationKind::MemoryShrank,
        ViolationKind::UnresolvedConflicts,
        ViolationKind::MissingEnd,
    ];

    /// Letter code `a` through `f`.
    pub fn code(self) -> char {
        match self {
            ViolationKind::UnknownLine => 'a',
            ViolationKind::WrongSuccessor => 'b',
            ViolationKind::BranchMismatch => 'c',
            ViolationKind::MemoryShrank => 'd',
            ViolationKind::UnresolvedConflicts => 'e',
            ViolationKind::MissingEnd => 'f',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Program line of the offending entry, if any.
    pub line: Option<LineNumber>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "({}) line {n}: {}", self.kind.code(), self.detail),
            None => write!(f, "({}) {}", self.kind.code(), self.detail),
        }
    }
}

fn natural_next(program: &Program, line: LineNumber) -> NextLine {
    program.successor(line).map_or(NextLine::End, NextLine::Line)
}

/// Integer value of an IF operand, if it can be read off a snapshot.
fn operand(expr: &Expression, memory: &MemoryState) -> Option<i64> {
    match expr {
        Expression::Integer(n) => i64::try_from(*n).ok(),
        Expression::Call(Builtin::ConflictsCount, _) => Some(memory.conflicts.len() as i64),
        _ => None,
    }
}

fn list_len(m: &MemoryState, field: ListField) -> usize {
    m.field_len(field)
}

fn shrinks(prev: &MemoryState, cur: &MemoryState) -> Vec<String> {
    ListField::ALL
        .iter()
        .filter(|f| list_len(cur, **f) < list_len(prev, **f))
        .map(|f| format!("{f} went from {} to {} item(s)", list_len(prev, *f), list_len(cur, *f)))
        .collect()
}

/// Reports every violation found; an empty list means the trace conforms.
pub fn check_conformance(program: &Program, entries: &[TraceEntry], final_memory: &MemoryState) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |kind, line, detail: String| out.push(Violation { kind, line, detail });

    if let (Some(first), Some(start)) = (entries.first(), program.first_line()) {
        if first.line != start {
            push(ViolationKind::WrongSuccessor, Some(first.line), format!("execution must start at line {start}"));
        }
    }

    let initial = MemoryState::new();
    let mut last_resolve: Option<usize> = None;
    let mut last_conflict_add: Option<usize> = None;

    for (i, entry) in entries.iter().enumerate() {
        let line = Some(entry.line);
        let prev_memory = if i == 0 { &initial } else { &entries[i - 1].memory };

        if let NextLine::Line(n) = entry.next {
            if !program.contains(n) {
                push(ViolationKind::UnknownLine, line, format!("claimed next line {n} is not in the program"));
            }
        }
        if let Some(following) = entries.get(i + 1) {
            if entry.next != NextLine::Line(following.line) {
                push(
                    ViolationKind::WrongSuccessor,
                    Some(following.line),
                    format!("trace continues at {} but the previous entry claimed next {}", following.line, entry.next),
                );
            }
        }

        let Some(stmt) = program.get(entry.line) else {
            push(ViolationKind::UnknownLine, line, format!("line {} is not in the program", entry.line));
            continue;
        };

        match stmt {
            Statement::End | Statement::Goto(_) => {
                let expected = if let Statement::Goto(t) = stmt { NextLine::Line(*t) } else { NextLine::End };
                if entry.next != expected {
                    push(
                        ViolationKind::WrongSuccessor,
                        line,
                        format!("next must be {expected}, trace claims {}", entry.next),
                    );
                }
            }
            Statement::If { condition, target } => {
                let taken = NextLine::Line(*target);
                let fallthrough = natural_next(program, entry.line);
                let values = (operand(&condition.lhs, &entry.memory), operand(&condition.rhs, &entry.memory));
                if let (Some(l), Some(r)) = values {
                    let expected = if condition.op.apply(l, r) { taken } else { fallthrough };
                    if entry.next != expected {
                        push(
                            ViolationKind::BranchMismatch,
                            line,
                            format!(
                                "{condition} is {} with {l} and {r}, so next must be {expected}, trace claims {}",
                                condition.op.apply(l, r),
                                entry.next
                            ),
                        );
                    }
                } else if entry.next != taken && entry.next != fallthrough {
                    push(
                        ViolationKind::WrongSuccessor,
                        line,
                        format!("next must be {taken} or {fallthrough}, trace claims {}", entry.next),
                    );
                }
            }
            _ => {
                let expected = natural_next(program, entry.line);
                if entry.next != expected {
                    push(
                        ViolationKind::WrongSuccessor,
                        line,
                        format!("next must be {expected}, trace claims {}", entry.next),
                    );
                }
            }
        }

        if stmt.is_resolve() {
            last_resolve = Some(i);
            if !entry.memory.conflicts.is_empty() {
                push(
                    ViolationKind::UnresolvedConflicts,
                    line,
                    format!("{} conflict(s) remain after resolution", entry.memory.conflicts.len()),
                );
            }
        } else {
            for detail in shrinks(prev_memory, &entry.memory) {
                push(ViolationKind::MemoryShrank, line, detail);
            }
        }
        if stmt.adds_conflicts() {
            last_conflict_add = Some(i);
        }
    }

    if let Some(last) = entries.last() {
        for detail in shrinks(&last.memory, final_memory) {
            push(ViolationKind::MemoryShrank, None, format!("final memory: {detail}"));
        }
    }
    if let Some(r) = last_resolve {
        if !final_memory.conflicts.is_empty() && last_conflict_add.is_none_or(|a| a < r) {
            push(
                ViolationKind::UnresolvedConflicts,
                None,
                format!("final memory keeps {} conflict(s) after resolution", final_memory.conflicts.len()),
            );
        }
    }

    match entries.last() {
        None => push(ViolationKind::MissingEnd, None, "trace has no entries".into()),
        Some(last) => {
            let ends = program.get(last.line) == Some(&Statement::End) && last.next == NextLine::End;
            if !ends {
                push(ViolationKind::MissingEnd, Some(last.line), "trace does not finish at an END statement".into());
            }
        }
    }
    out
}

pub fn check_model_trace(program: &Program, trace: &ModelTrace) -> Vec<Violation> {
    check_conformance(program, &trace.entries, &trace.final_memory)
}
