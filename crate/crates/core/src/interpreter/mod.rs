//! Deterministic execution engine.
//!
//! A [`Machine`] executes one statement per [`Machine::step`], starting at
//! the lowest line and advancing in ascending order unless an `IF` or
//! `GOTO` redirects it. Cognitive builtins are delegated to a
//! [`CognitiveOps`] provider; `INPUT` and `CONFLICTS_COUNT` are native.

mod trace;

use thiserror::Error;

use crate::cogops::{CognitiveOps, ProviderError, Resolution};
use crate::lang::{Builtin, Comparison, Expression, LineNumber, ListField, Program, Statement};
use crate::memory::{is_memory_field, normalize_ws, Environment, MemoryState, TypeMismatch, Value};

pub use trace::{
    parse_trace_jsonl, parse_trace_text, render_trace, render_trace_entry, write_trace_jsonl, MemoryRecord, NextRecord,
    ParsedTrace, TraceParseError, TraceRecord,
};

pub const DEFAULT_STEP_LIMIT: usize = 1_000;

/// Resolution text used when `RESOLVE_CONFLICTS` runs with nothing to resolve.
pub const NOTHING_TO_RESOLVE: &str = "No conflicts to resolve.";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub step_limit: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { step_limit: DEFAULT_STEP_LIMIT }
    }
}

/// Where control goes after a statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NextLine {
    Line(LineNumber),
    End,
}

impl std::fmt::Display for NextLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NextLine::Line(n) => write!(f, "{n}"),
            NextLine::End => f.write_str("END"),
        }
    }
}

/// One executed statement and the memory right after it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub line: LineNumber,
    pub instruction: String,
    pub rationale: String,
    pub memory: MemoryState,
    pub next: NextLine,
}

#[derive(Debug, Error)]
pub enum RuntimeError {
    #[error("line {line}: jump target {target} does not exist")]
    MissingLine { line: LineNumber, target: LineNumber },
    #[error("line {line}: variable `{name}` is not bound")]
    UnboundVariable { line: LineNumber, name: String },
    #[error("line {line}: {detail}")]
    TypeMismatch { line: LineNumber, detail: String },
    #[error("line {line}: provider failed: {source}")]
    Provider { line: LineNumber, source: ProviderError },
    #[error("line {line}: execution ran past the last line without END")]
    RanOffEnd { line: LineNumber },
    #[error("step limit of {limit} reached")]
    StepLimit { limit: usize },
    #[error("program has no lines")]
    EmptyProgram,
    #[error("execution has already stopped")]
    NotRunning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Running,
    Ended,
    Failed(String),
}

#[derive(Debug)]
pub enum Outcome {
    Completed,
    StepLimitExceeded,
    RuntimeError(RuntimeError),
    /// Stopped from outside before reaching END.
    Interrupted,
}

impl Outcome {
    pub fn is_completed(&self) -> bool {
        matches!(self, Outcome::Completed)
    }

    /// `completed`, `step-limit-exceeded`, `interrupted`, or `runtime-error: <detail>`.
    pub fn label(&self) -> String {
        match self {
            Outcome::Completed => "completed".into(),
            Outcome::StepLimitExceeded => "step-limit-exceeded".into(),
            Outcome::RuntimeError(e) => format!("runtime-error: {e}"),
            Outcome::Interrupted => "interrupted".into(),
        }
    }
}

#[derive(Debug)]
pub struct RunResult {
    pub final_memory: MemoryState,
    pub trace: Vec<TraceEntry>,
    pub output: Vec<String>,
    pub outcome: Outcome,
}

impl RunResult {
    pub fn steps(&self) -> usize {
        self.trace.len()
    }

    /// The largest `conflicts` list observed during the run.
    pub fn peak_conflicts(&self) -> Vec<crate::memory::ConflictPair> {
        self.trace
            .iter()
            .map(|e| &e.memory.conflicts)
            .chain(Some(&self.final_memory.conflicts))
            .max_by_key(|c| c.len())
            .cloned()
            .unwrap_or_default()
    }
}

/// Execution state of one program run.
#[derive(Clone, Debug)]
pub struct Machine {
    program: Program,
    scenario: String,
    limits: Limits,
    memory: MemoryState,
    env: Environment,
    current: Option<LineNumber>,
    steps: usize,
    status: Status,
    output: Vec<String>,
}

impl Machine {
    pub fn new(program: Program, scenario: impl Into<String>, limits: Limits) -> Self {
        let current = program.first_line();
        let status =
            if current.is_some() { Status::Running } else { Status::Failed(RuntimeError::EmptyProgram.to_string()) };
        Self {
            program,
            scenario: scenario.into(),
            limits,
            memory: MemoryState::new(),
            env: Environment::new(),
            current,
            steps: 0,
            status,
            output: Vec::new(),
        }
    }

    pub fn memory(&self) -> &MemoryState {
        &self.memory
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    pub fn current_line(&self) -> Option<LineNumber> {
        self.current
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    pub fn output(&self) -> &[String] {
        &self.output
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    /// Ends the run, returning the final state with the given trace.
    pub fn into_result(self, trace: Vec<TraceEntry>, outcome: Outcome) -> RunResult {
        RunResult { final_memory: self.memory, trace, output: self.output, outcome }
    }

    fn fail(&mut self, err: RuntimeError) -> RuntimeError {
        self.status = Status::Failed(err.to_string());
        err
    }

    /// Executes exactly the statement at the current line.
    pub fn step(&mut self, ops: &dyn CognitiveOps) -> Result<TraceEntry, RuntimeError> {
        if self.status != Status::Running {
            return Err(RuntimeError::NotRunning);
        }
        if self.steps >= self.limits.step_limit {
            return Err(self.fail(RuntimeError::StepLimit { limit: self.limits.step_limit }));
        }
        let line = self.current.expect("running machine has a current line");
        let stmt = self.program.get(line).expect("current line exists").clone();
        let (rationale, jump) = match self.execute(line, &stmt, ops) {
            Ok(r) => r,
            Err(e) => return Err(self.fail(e)),
        };

        let next = match (&stmt, jump) {
            (Statement::End, _) => NextLine::End,
            (_, Some(target)) => NextLine::Line(target),
            (_, None) => self.program.successor(line).map_or(NextLine::End, NextLine::Line),
        };
        self.steps += 1;
        match next {
            NextLine::Line(n) => self.current = Some(n),
            NextLine::End if stmt == Statement::End => {
                self.current = None;
                self.status = Status::Ended;
            }
            NextLine::End => {
                self.current = None;
                self.status = Status::Failed(RuntimeError::RanOffEnd { line }.to_string());
            }
        }
        Ok(TraceEntry { line, instruction: stmt.to_string(), rationale, memory: self.memory.clone(), next })
    }

    /// Applies a statement; returns the rationale and an explicit jump target.
    fn execute(
        &mut self,
        line: LineNumber,
        stmt: &Statement,
        ops: &dyn CognitiveOps,
    ) -> Result<(String, Option<LineNumber>), RuntimeError> {
        match stmt {
            Statement::Rem(_) => Ok(("Comment; no state change.".into(), None)),
            Statement::Assign { target, value, .. } => {
                let v = self.eval(line, value, ops)?;
                let rationale = assign_rationale(target, value, &v);
                match target.as_str() {
                    "working" | "resolution" => {
                        let Value::Str(s) = v else {
                            return Err(RuntimeError::TypeMismatch {
                                line,
                                detail: format!("`{target}` holds a string, not a {}", v.type_name()),
                            });
                        };
                        if target == "working" {
                            self.memory.working = s;
                        } else {
                            self.memory.resolution = s;
                        }
                    }
                    _ => {
                        debug_assert!(!is_memory_field(target));
                        self.env.bind(target, v);
                    }
                }
                Ok((rationale, None))
            }
            Statement::Add { field, source } => {
                let v = self.lookup(line, source)?;
                let outcome = self
                    .memory
                    .add(*field, &v)
                    .map_err(|e: TypeMismatch| RuntimeError::TypeMismatch { line, detail: e.to_string() })?;
                let mut rationale = format!("Appended {} to {field}", count(outcome.added, noun(*field)));
                if outcome.skipped > 0 {
                    rationale.push_str(&format!(" (skipped {} duplicate or empty)", outcome.skipped));
                }
                rationale.push('.');
                Ok((rationale, None))
            }
            Statement::Print(expr) => {
                let v = self.eval(line, expr, ops)?;
                let text = v.to_string();
                self.output.push(text.clone());
                Ok((format!("Printed {text:?}."), None))
            }
            Statement::If { condition, target } => {
                let holds = self.compare(line, condition, ops)?;
                if holds {
                    self.require_line(line, *target)?;
                    Ok((format!("Condition {condition} holds; jumping to {target}."), Some(*target)))
                } else {
                    Ok((format!("Condition {condition} is false; continuing."), None))
                }
            }
            Statement::Goto(target) => {
                self.require_line(line, *target)?;
                Ok((format!("Jumping to {target}."), Some(*target)))
            }
            Statement::Call(Builtin::DetectConflicts) => {
                let pairs = ops
                    .detect_conflicts(&self.memory.declarative)
                    .map_err(|source| RuntimeError::Provider { line, source })?;
                let found = pairs.len();
                let outcome =
                    self.memory.add(ListField::Conflicts, &Value::Pairs(pairs)).expect("pairs into conflicts");
                Ok((
                    format!(
                        "Detected {} among declarative facts; appended {} to conflicts.",
                        count(found, "conflict"),
                        outcome.added
                    ),
                    None,
                ))
            }
            Statement::Call(Builtin::ResolveConflicts) => {
                let resolved = self.memory.conflicts.len();
                self.resolve(line, ops)?;
                Ok((resolve_rationale(resolved), None))
            }
            Statement::Call(Builtin::ConflictsCount) => {
                Ok((format!("Counted {}.", count(self.memory.conflicts_count(), "conflict")), None))
            }
            Statement::Call(other) => {
                Err(RuntimeError::TypeMismatch { line, detail: format!("{other} cannot be used as a statement") })
            }
            Statement::End => Ok(("Program finished.".into(), None)),
        }
    }

    fn require_line(&self, line: LineNumber, target: LineNumber) -> Result<(), RuntimeError> {
        if self.program.contains(target) {
            Ok(())
        } else {
            Err(RuntimeError::MissingLine { line, target })
        }
    }

    fn lookup(&self, line: LineNumber, name: &str) -> Result<Value, RuntimeError> {
        self.env
            .lookup(name, &self.memory)
            .ok_or_else(|| RuntimeError::UnboundVariable { line, name: name.to_string() })
    }

    fn compare(&mut self, line: LineNumber, c: &Comparison, ops: &dyn CognitiveOps) -> Result<bool, RuntimeError> {
        let lhs = self.eval_int(line, &c.lhs, ops)?;
        let rhs = self.eval_int(line, &c.rhs, ops)?;
        Ok(c.op.apply(lhs, rhs))
    }

    fn eval_int(&mut self, line: LineNumber, expr: &Expression, ops: &dyn CognitiveOps) -> Result<i64, RuntimeError> {
        match self.eval(line, expr, ops)? {
            Value::Int(n) => Ok(n),
            other => Err(RuntimeError::TypeMismatch {
                line,
                detail: format!("comparison operand `{expr}` is a {}, not an integer", other.type_name()),
            }),
        }
    }

    fn eval_str(
        &mut self,
        line: LineNumber,
        expr: &Expression,
        ops: &dyn CognitiveOps,
    ) -> Result<String, RuntimeError> {
        match self.eval(line, expr, ops)? {
            Value::Str(s) => Ok(s),
            other => Err(RuntimeError::TypeMismatch {
                line,
                detail: format!("argument `{expr}` is a {}, not a string", other.type_name()),
            }),
        }
    }

    /// Evaluates an expression. Only `RESOLVE_CONFLICTS` changes memory.
    pub fn eval(&mut self, line: LineNumber, expr: &Expression, ops: &dyn CognitiveOps) -> Result<Value, RuntimeError> {
        let provider = |source| RuntimeError::Provider { line, source };
        match expr {
            Expression::Variable(name) => self.lookup(line, name),
            Expression::Integer(n) => i64::try_from(*n)
                .map(Value::Int)
                .map_err(|_| RuntimeError::TypeMismatch { line, detail: format!("integer {n} is out of range") }),
            Expression::Str(s) => Ok(Value::Str(s.clone())),
            Expression::Call(builtin, args) => match builtin {
                Builtin::Input => Ok(Value::Str(self.scenario.clone())),
                Builtin::ExtractDeclarative => {
                    let text = self.eval_str(line, &args[0], ops)?;
                    ops.extract_declarative(&text).map(Value::List).map_err(provider)
                }
                Builtin::ExtractProcedural => {
                    let text = self.eval_str(line, &args[0], ops)?;
                    ops.extract_procedural(&text).map(Value::List).map_err(provider)
                }
                Builtin::DetectConflicts => {
                    ops.detect_conflicts(&self.memory.declarative).map(Value::Pairs).map_err(provider)
                }
                Builtin::ConflictsCount => Ok(Value::Int(self.memory.conflicts_count() as i64)),
                Builtin::ResolveConflicts => self.resolve(line, ops).map(Value::Str),
            },
        }
    }

    /// Resolves all current conflicts: merges each pair into `declarative`,
    /// clears `conflicts` and stores the summary in `resolution`.
    fn resolve(&mut self, line: LineNumber, ops: &dyn CognitiveOps) -> Result<String, RuntimeError> {
        if self.memory.conflicts.is_empty() {
            self.memory.resolution = NOTHING_TO_RESOLVE.to_string();
            return Ok(self.memory.resolution.clone());
        }
        let resolution =
            ops.resolve_conflicts(&self.memory.conflicts).map_err(|source| RuntimeError::Provider { line, source })?;
        if resolution.reconciled.len() != self.memory.conflicts.len() || resolution.summary.trim().is_empty() {
            return Err(RuntimeError::Provider {
                line,
                source: ProviderError::Backend(
                    format!(
                        "expected {} merged statement(s) and a summary, got {}",
                        self.memory.conflicts.len(),
                        resolution.reconciled.len()
                    )
                    .into(),
                ),
            });
        }
        apply_resolution(&mut self.memory, &resolution);
        Ok(resolution.summary)
    }
}

/// Replaces each resolved pair's statements in `declarative` with the merged
/// statement (at the first member's position), clears `conflicts` and writes
/// the summary to `resolution`.
pub fn apply_resolution(memory: &mut MemoryState, resolution: &Resolution) {
    let position = |list: &[String], s: &str| {
        let key = normalize_ws(s);
        list.iter().position(|e| normalize_ws(e) == key)
    };
    for (pair, merged) in &resolution.reconciled {
        let merged = merged.trim();
        if merged.is_empty() {
            continue;
        }
        let already = position(&memory.declarative, merged);
        match (position(&memory.declarative, pair.a()), already) {
            (Some(i), None) => memory.declarative[i] = merged.to_string(),
            (Some(i), Some(_)) => {
                memory.declarative.remove(i);
            }
            (None, _) => {}
        }
        let already = position(&memory.declarative, merged);
        match (position(&memory.declarative, pair.b()), already) {
            (Some(i), None) => memory.declarative[i] = merged.to_string(),
            (Some(i), Some(_)) => {
                memory.declarative.remove(i);
            }
            (None, None) => memory.declarative.push(merged.to_string()),
            (None, Some(_)) => {}
        }
    }
    memory.conflicts.clear();
    memory.resolution = resolution.summary.trim().to_string();
}

fn count(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

fn noun(field: ListField) -> &'static str {
    match field {
        ListField::Declarative => "fact",
        ListField::Procedural => "rule",
        ListField::Conflicts => "conflict",
    }
}

fn resolve_rationale(resolved: usize) -> String {
    if resolved == 0 {
        "No conflicts to resolve; resolution noted.".into()
    } else {
        format!(
            "Resolved {}: merged reconciled statements into declarative, cleared conflicts, wrote summary to resolution.",
            count(resolved, "conflict")
        )
    }
}

fn assign_rationale(target: &str, expr: &Expression, v: &Value) -> String {
    match (expr, v) {
        (Expression::Call(Builtin::Input, _), Value::Str(s)) => {
            format!("Loaded the scenario text into {target} ({} characters).", s.chars().count())
        }
        (Expression::Call(Builtin::ExtractDeclarative, _), Value::List(items)) => {
            format!("Extracted {} into {target}.", count(items.len(), "declarative fact"))
        }
        (Expression::Call(Builtin::ExtractProcedural, _), Value::List(items)) => {
            format!("Extracted {} into {target}.", count(items.len(), "procedural rule"))
        }
        (Expression::Call(Builtin::DetectConflicts, _), Value::Pairs(pairs)) => {
            format!("Detected {} among declarative facts into {target}.", count(pairs.len(), "conflict"))
        }
        (Expression::Call(Builtin::ConflictsCount, _), Value::Int(n)) => {
            format!("Stored the conflict count {n} in {target}.")
        }
        (Expression::Call(Builtin::ResolveConflicts, _), _) => {
            format!("Resolved conflicts and stored the summary in {target}; declarative updated, conflicts cleared.")
        }
        (_, v) => format!("Assigned a {} to {target}.", v.type_name()),
    }
}

/// Runs a program to completion, step limit, or error.
pub fn run(program: &Program, scenario: &str, ops: &dyn CognitiveOps, limits: Limits) -> RunResult {
    let mut machine = Machine::new(program.clone(), scenario, limits);
    let mut trace = Vec::new();
    let outcome = if program.is_empty() {
        Outcome::RuntimeError(RuntimeError::EmptyProgram)
    } else {
        loop {
            match machine.step(ops) {
                Ok(entry) => {
                    trace.push(entry);
                    match machine.status() {
                        Status::Running => continue,
                        Status::Ended => break Outcome::Completed,
                        Status::Failed(_) => {
                            let line = trace.last().map_or(0, |e| e.line);
                            break Outcome::RuntimeError(RuntimeError::RanOffEnd { line });
                        }
                    }
                }
                Err(RuntimeError::StepLimit { .. }) => break Outcome::StepLimitExceeded,
                Err(e) => break Outcome::RuntimeError(e),
            }
        }
    };
    RunResult { final_memory: machine.memory, trace, output: machine.output, outcome }
}
