//! Recursive-descent parser over the token stream of a single line.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::ast::{Builtin, Comparison, Expression, LineNumber, ListField, Program, Statement};
use super::lexer::{tokenize, Keyword, LexError, Token};

/// A syntax error on one line of source.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LineError {
    #[error("source line {physical}: {error}")]
    Lex { physical: usize, error: LexError },
    #[error("source line {physical}{}: expected {expected}, found {found}", fmt_line(*.line))]
    Syntax { physical: usize, line: Option<LineNumber>, expected: String, found: String },
}

fn fmt_line(line: Option<LineNumber>) -> String {
    line.map(|n| format!(" (line {n})")).unwrap_or_default()
}

impl LineError {
    pub fn physical_line(&self) -> usize {
        match self {
            LineError::Lex { physical, .. } | LineError::Syntax { physical, .. } => *physical,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("{}", AllErrors(.0))]
    Syntax(Vec<LineError>),
    #[error("duplicate line number {0}")]
    DuplicateLine(LineNumber),
}

struct AllErrors<'a>(&'a [LineError]);

impl fmt::Display for AllErrors<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Syntax failure of `parse_statement` before a physical line number is known.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("expected {expected}, found {found}")]
pub struct StatementError {
    pub line: Option<LineNumber>,
    pub expected: String,
    pub found: String,
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: Option<LineNumber>,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn fail<T>(&self, expected: impl Into<String>) -> Result<T, StatementError> {
        let found = match self.tokens.get(self.pos) {
            Some(t) => t.to_string(),
            None => "end of line".to_string(),
        };
        Err(StatementError { line: self.line, expected: expected.into(), found })
    }

    fn expect(&mut self, want: &Token, what: &str) -> Result<(), StatementError> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn finish(&self) -> Result<(), StatementError> {
        if self.pos < self.tokens.len() {
            self.fail("end of line")
        } else {
            Ok(())
        }
    }

    fn line_number(&mut self, what: &str) -> Result<LineNumber, StatementError> {
        match self.peek() {
            Some(Token::Number(n)) if *n > 0 && *n <= LineNumber::MAX as u64 => {
                self.pos += 1;
                Ok(*n as LineNumber)
            }
            _ => self.fail(what),
        }
    }
}

/// Parses the tokens of one non-blank line into its line number and statement.
pub fn parse_statement(tokens: &[Token]) -> Result<(LineNumber, Statement), StatementError> {
    let mut cur = Cursor { tokens, pos: 0, line: None };
    let line = cur.line_number("a positive line number")?;
    cur.line = Some(line);
    let stmt = statement(&mut cur)?;
    cur.finish()?;
    Ok((line, stmt))
}

fn statement(cur: &mut Cursor<'_>) -> Result<Statement, StatementError> {
    match cur.peek() {
        Some(Token::Keyword(Keyword::Rem)) => {
            cur.bump();
            match cur.bump() {
                Some(Token::Comment(text)) => Ok(Statement::Rem(text.clone())),
                _ => Ok(Statement::Rem(String::new())),
            }
        }
        Some(Token::Keyword(Keyword::Let)) => {
            cur.bump();
            assignment(cur, true)
        }
        Some(Token::Ident(_)) => assignment(cur, false),
        Some(Token::Keyword(Keyword::Add)) => {
            cur.bump();
            let field = match cur.peek() {
                Some(Token::Ident(name)) => ListField::from_name(name),
                _ => None,
            };
            let Some(field) = field else {
                return cur.fail("one of `declarative`, `procedural`, `conflicts`");
            };
            cur.bump();
            cur.expect(&Token::Keyword(Keyword::From), "FROM")?;
            match cur.bump() {
                Some(Token::Ident(source)) => Ok(Statement::Add { field, source: source.clone() }),
                _ => {
                    cur.pos -= 1;
                    cur.fail("a variable name after FROM")
                }
            }
        }
        Some(Token::Keyword(Keyword::Print)) => {
            cur.bump();
            let expr = expression(cur)?;
            if expr.mutates() {
                return cur.fail("a side-effect-free expression (RESOLVE_CONFLICTS cannot be printed)");
            }
            Ok(Statement::Print(expr))
        }
        Some(Token::Keyword(Keyword::If)) => {
            cur.bump();
            let lhs = operand(cur)?;
            let op = match cur.peek() {
                Some(Token::Compare(op)) => *op,
                _ => return cur.fail("a comparison operator (>, <, >=, <=, ==, !=)"),
            };
            cur.bump();
            let rhs = operand(cur)?;
            cur.expect(&Token::Keyword(Keyword::Then), "THEN")?;
            let target = cur.line_number("a target line number after THEN")?;
            Ok(Statement::If { condition: Comparison { lhs, op, rhs }, target })
        }
        Some(Token::Keyword(Keyword::Goto)) => {
            cur.bump();
            Ok(Statement::Goto(cur.line_number("a target line number after GOTO")?))
        }
        Some(Token::Keyword(Keyword::End)) => {
            cur.bump();
            Ok(Statement::End)
        }
        Some(Token::Builtin(b)) if b.is_statement() => {
            let b = *b;
            cur.bump();
            call_args(cur, b)?;
            Ok(Statement::Call(b))
        }
        _ => cur.fail("a command (REM, LET, ADD, PRINT, IF, GOTO, END, a builtin call, or an assignment)"),
    }
}

fn assignment(cur: &mut Cursor<'_>, with_let: bool) -> Result<Statement, StatementError> {
    let target = match cur.peek() {
        Some(Token::Ident(name)) => name.clone(),
        _ => return cur.fail("a lowercase variable name"),
    };
    if ListField::from_name(&target).is_some() {
        return cur.fail(format!("an assignable variable (`{target}` only changes through ADD)"));
    }
    cur.bump();
    cur.expect(&Token::Assign, "`=`")?;
    let value = expression(cur)?;
    Ok(Statement::Assign { target, value, with_let })
}

fn operand(cur: &mut Cursor<'_>) -> Result<Expression, StatementError> {
    let start = cur.pos;
    let expr = expression(cur)?;
    if expr.mutates() {
        cur.pos = start;
        return cur.fail("a comparison operand without side effects");
    }
    Ok(expr)
}

fn expression(cur: &mut Cursor<'_>) -> Result<Expression, StatementError> {
    match cur.peek() {
        Some(Token::Ident(name)) => {
            cur.bump();
            Ok(Expression::Variable(name.clone()))
        }
        Some(Token::Number(n)) => {
            cur.bump();
            Ok(Expression::Integer(*n))
        }
        Some(Token::Str(s)) => {
            cur.bump();
            Ok(Expression::Str(s.clone()))
        }
        Some(Token::Builtin(b)) => {
            let b = *b;
            cur.bump();
            let args = call_args(cur, b)?;
            Ok(Expression::Call(b, args))
        }
        _ => cur.fail("an expression (variable, builtin call, integer, or string)"),
    }
}

fn call_args(cur: &mut Cursor<'_>, builtin: Builtin) -> Result<Vec<Expression>, StatementError> {
    cur.expect(&Token::LParen, "`(`")?;
    let mut args = Vec::new();
    if cur.peek() != Some(&Token::RParen) {
        loop {
            args.push(operand(cur)?);
            if cur.peek() == Some(&Token::Comma) {
                cur.bump();
            } else {
                break;
            }
        }
    }
    cur.expect(&Token::RParen, "`)`")?;
    if args.len() != builtin.arity() {
        return Err(StatementError {
            line: cur.line,
            expected: format!("{} argument(s) for {builtin}", builtin.arity()),
            found: format!("{} argument(s)", args.len()),
        });
    }
    Ok(args)
}

/// Parses a whole program. CRLF line endings are accepted; blank lines are
/// skipped. All line-level errors are collected before failing.
pub fn parse_program(source: &str) -> Result<Program, ProgramError> {
    let mut errors = Vec::new();
    let mut lines = Vec::new();
    for (idx, raw) in source.split('\n').enumerate() {
        let physical = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let tokens = match tokenize(raw) {
            Ok(t) => t,
            Err(error) => {
                errors.push(LineError::Lex { physical, error });
                continue;
            }
        };
        if tokens.is_empty() {
            continue;
        }
        match parse_statement(&tokens) {
            Ok(parsed) => lines.push(parsed),
            Err(e) => errors.push(LineError::Syntax { physical, line: e.line, expected: e.expected, found: e.found }),
        }
    }
    if !errors.is_empty() {
        return Err(ProgramError::Syntax(errors));
    }
    let mut seen = BTreeSet::new();
    let mut program = Program::new();
    for (n, stmt) in lines {
        if !seen.insert(n) {
            return Err(ProgramError::DuplicateLine(n));
        }
        program.insert(n, stmt);
    }
    Ok(program)
}

/// Canonical source text: one statement per line, ascending, LF-terminated
/// lines joined without a trailing newline.
pub fn format_program(program: &Program) -> String {
    program.iter().map(|(n, s)| format!("{n} {s}")).collect::<Vec<_>>().join("\n")
}
