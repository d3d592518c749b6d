//! Parsed representation of a Cognitive BASIC program.

use std::collections::BTreeMap;
use std::fmt;

/// A program line number. Always positive.
pub type LineNumber = u32;

/// Memory fields that accept `ADD <field> FROM <var>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ListField {
    Declarative,
    Procedural,
    Conflicts,
}

impl ListField {
    pub const ALL: [ListField; 3] = [ListField::Declarative, ListField::Procedural, ListField::Conflicts];

    pub fn name(self) -> &'static str {
        match self {
            ListField::Declarative => "declarative",
            ListField::Procedural => "procedural",
            ListField::Conflicts => "conflicts",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "declarative" => Some(ListField::Declarative),
            "procedural" => Some(ListField::Procedural),
            "conflicts" => Some(ListField::Conflicts),
            _ => None,
        }
    }
}

impl fmt::Display for ListField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The built-in cognitive operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Input,
    ExtractDeclarative,
    ExtractProcedural,
    DetectConflicts,
    ConflictsCount,
    ResolveConflicts,
}

impl Builtin {
    pub const ALL: [Builtin; 6] = [
        Builtin::Input,
        Builtin::ExtractDeclarative,
        Builtin::ExtractProcedural,
        Builtin::DetectConflicts,
        Builtin::ConflictsCount,
        Builtin::ResolveConflicts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Input => "INPUT",
            Builtin::ExtractDeclarative => "EXTRACT_DECLARATIVE",
            Builtin::ExtractProcedural => "EXTRACT_PROCEDURAL",
            Builtin::DetectConflicts => "DETECT_CONFLICTS",
            Builtin::ConflictsCount => "CONFLICTS_COUNT",
            Builtin::ResolveConflicts => "RESOLVE_CONFLICTS",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::ExtractDeclarative | Builtin::ExtractProcedural => 1,
            _ => 0,
        }
    }

    /// Builtins allowed as bare call statements.
    pub fn is_statement(self) -> bool {
        matches!(self, Builtin::DetectConflicts | Builtin::ConflictsCount | Builtin::ResolveConflicts)
    }

    /// Whether evaluating the builtin mutates memory.
    pub fn mutates(self) -> bool {
        self == Builtin::ResolveConflicts
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expression {
    Variable(String),
    Call(Builtin, Vec<Expression>),
    Integer(u64),
    Str(String),
}

impl Expression {
    pub fn call(builtin: Builtin) -> Self {
        Expression::Call(builtin, Vec::new())
    }

    /// True if this expression, or any argument, calls a mutating builtin.
    pub fn mutates(&self) -> bool {
        match self {
            Expression::Call(b, args) => b.mutates() || args.iter().any(Expression::mutates),
            _ => false,
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Variable(name) => f.write_str(name),
            Expression::Call(b, args) => {
                write!(f, "{b}(")?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{arg}")?;
                }
                f.write_str(")")
            }
            Expression::Integer(n) => write!(f, "{n}"),
            Expression::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareOp {
    Gt,
    Lt,
    Ge,
    Le,
    Eq,
    Ne,
}

impl CompareOp {
    pub const ALL: [CompareOp; 6] =
        [CompareOp::Gt, CompareOp::Lt, CompareOp::Ge, CompareOp::Le, CompareOp::Eq, CompareOp::Ne];

    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Gt => ">",
            CompareOp::Lt => "<",
            CompareOp::Ge => ">=",
            CompareOp::Le => "<=",
            CompareOp::Eq => "==",
            CompareOp::Ne => "!=",
        }
    }

    pub fn apply(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CompareOp::Gt => lhs > rhs,
            CompareOp::Lt => lhs < rhs,
            CompareOp::Ge => lhs >= rhs,
            CompareOp::Le => lhs <= rhs,
            CompareOp::Eq => lhs == rhs,
            CompareOp::Ne => lhs != rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub lhs: Expression,
    pub op: CompareOp,
    pub rhs: Expression,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), self.rhs)
    }
}

/// One statement of a program.
///
/// `Assign` remembers whether it was written with `LET` so that canonical
/// formatting reproduces hand-written listings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Rem(String),
    Assign { target: String, value: Expression, with_let: bool },
    Add { field: ListField, source: String },
    Print(Expression),
    If { condition: Comparison, target: LineNumber },
    Goto(LineNumber),
    Call(Builtin),
    End,
}

impl Statement {
    /// Jump target, if this statement can transfer control.
    pub fn branch_target(&self) -> Option<LineNumber> {
        match self {
            Statement::If { target, .. } | Statement::Goto(target) => Some(*target),
            _ => None,
        }
    }

    /// True for statements that run `RESOLVE_CONFLICTS` and may therefore
    /// shrink `declarative` and `conflicts`.
    pub fn is_resolve(&self) -> bool {
        match self {
            Statement::Assign { value, .. } => value.mutates(),
            Statement::Call(b) => b.mutates(),
            _ => false,
        }
    }

    /// True for statements that may append to `conflicts`.
    pub fn adds_conflicts(&self) -> bool {
        matches!(self, Statement::Add { field: ListField::Conflicts, .. } | Statement::Call(Builtin::DetectConflicts))
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Rem(text) if text.is_empty() => f.write_str("REM"),
            Statement::Rem(text) => write!(f, "REM {text}"),
            Statement::Assign { target, value, with_let: true } => write!(f, "LET {target} = {value}"),
            Statement::Assign { target, value, with_let: false } => write!(f, "{target} = {value}"),
            Statement::Add { field, source } => write!(f, "ADD {field} FROM {source}"),
            Statement::Print(expr) => write!(f, "PRINT {expr}"),
            Statement::If { condition, target } => write!(f, "IF {condition} THEN {target}"),
            Statement::Goto(target) => write!(f, "GOTO {target}"),
            Statement::Call(b) => write!(f, "{b}()"),
            Statement::End => f.write_str("END"),
        }
    }
}

/// A parsed program: statements keyed by ascending line number.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    lines: BTreeMap<LineNumber, Statement>,
}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a line, returning the statement it replaced (if any).
    pub fn insert(&mut self, line: LineNumber, statement: Statement) -> Option<Statement> {
        self.lines.insert(line, statement)
    }

    pub fn get(&self, line: LineNumber) -> Option<&Statement> {
        self.lines.get(&line)
    }

    pub fn contains(&self, line: LineNumber) -> bool {
        self.lines.contains_key(&line)
    }

    pub fn first_line(&self) -> Option<LineNumber> {
        self.lines.keys().next().copied()
    }

    /// The smallest line number strictly greater than `line`.
    pub fn successor(&self, line: LineNumber) -> Option<LineNumber> {
        self.lines.range(line.saturating_add(1)..).next().map(|(n, _)| *n).filter(|n| *n > line)
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (LineNumber, &Statement)> {
        self.lines.iter().map(|(n, s)| (*n, s))
    }

    pub fn line_numbers(&self) -> impl Iterator<Item = LineNumber> + '_ {
        self.lines.keys().copied()
    }
}

impl FromIterator<(LineNumber, Statement)> for Program {
    fn from_iter<I: IntoIterator<Item = (LineNumber, Statement)>>(iter: I) -> Self {
        Program { lines: iter.into_iter().collect() }
    }
}
