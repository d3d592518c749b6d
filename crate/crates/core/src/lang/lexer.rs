//! Line-oriented tokenizer.

use std::fmt;

use thiserror::Error;

use super::ast::{Builtin, CompareOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keyword {
    Let,
    Add,
    From,
    Print,
    Rem,
    If,
    Then,
    Goto,
    End,
}

impl Keyword {
    fn from_word(word: &str) -> Option<Self> {
        Some(match word {
            "LET" => Keyword::Let,
            "ADD" => Keyword::Add,
            "FROM" => Keyword::From,
            "PRINT" => Keyword::Print,
            "REM" => Keyword::Rem,
            "IF" => Keyword::If,
            "THEN" => Keyword::Then,
            "GOTO" => Keyword::Goto,
            "END" => Keyword::End,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Let => "LET",
            Keyword::Add => "ADD",
            Keyword::From => "FROM",
            Keyword::Print => "PRINT",
            Keyword::Rem => "REM",
            Keyword::If => "IF",
            Keyword::Then => "THEN",
            Keyword::Goto => "GOTO",
            Keyword::End => "END",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Number(u64),
    Keyword(Keyword),
    Builtin(Builtin),
    Ident(String),
    /// A word that is neither a keyword, a builtin, nor a valid identifier.
    Word(String),
    Str(String),
    /// Verbatim remainder of a `REM` line.
    Comment(String),
    Assign,
    Compare(CompareOp),
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Number(n) => write!(f, "number {n}"),
            Token::Keyword(k) => write!(f, "keyword {}", k.as_str()),
            Token::Builtin(b) => write!(f, "builtin {b}"),
            Token::Ident(s) => write!(f, "identifier `{s}`"),
            Token::Word(s) => write!(f, "word `{s}`"),
            Token::Str(_) => f.write_str("string literal"),
            Token::Comment(_) => f.write_str("comment text"),
            Token::Assign => f.write_str("`=`"),
            Token::Compare(op) => write!(f, "`{}`", op.symbol()),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::Comma => f.write_str("`,`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LexErrorKind {
    MalformedNumber,
    UnterminatedString,
    UnexpectedChar(char),
}

impl fmt::Display for LexErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexErrorKind::MalformedNumber => f.write_str("malformed numeric literal"),
            LexErrorKind::UnterminatedString => f.write_str("unterminated string literal"),
            LexErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
        }
    }
}

/// Tokenization failure. `column` is 1-based, counted in characters.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind} at column {column} in `{line}`")]
pub struct LexError {
    pub kind: LexErrorKind,
    pub line: String,
    pub column: usize,
}

/// Returns true for `[a-z][a-z0-9_]*`.
pub fn is_identifier(word: &str) -> bool {
    let mut chars = word.chars();
    matches!(chars.next(), Some('a'..='z')) && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
}

/// Splits one physical line into tokens. Blank lines yield no tokens.
pub fn tokenize(line: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = line.chars().collect();
    let err = |kind, idx: usize| LexError { kind, line: line.to_string(), column: idx + 1 };
    let mut tokens = Vec::new();
    let mut i = 0;

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        match c {
            '0'..='9' => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                    return Err(err(LexErrorKind::MalformedNumber, start));
                }
                let digits: String = chars[start..i].iter().collect();
                let n = digits.parse().map_err(|_| err(LexErrorKind::MalformedNumber, start))?;
                tokens.push(Token::Number(n));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if let Some(kw) = Keyword::from_word(&word) {
                    tokens.push(Token::Keyword(kw));
                    if kw == Keyword::Rem {
                        let rest: String = chars[i..].iter().collect();
                        tokens.push(Token::Comment(rest.trim().to_string()));
                        return Ok(tokens);
                    }
                } else if let Some(b) = Builtin::from_name(&word) {
                    tokens.push(Token::Builtin(b));
                } else if is_identifier(&word) {
                    tokens.push(Token::Ident(word));
                } else {
                    tokens.push(Token::Word(word));
                }
            }
            '"' => {
                i += 1;
                let mut text = String::new();
                loop {
                    match chars.get(i) {
                        None => return Err(err(LexErrorKind::UnterminatedString, start)),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') if matches!(chars.get(i + 1), Some('"' | '\\')) => {
                            text.push(chars[i + 1]);
                            i += 2;
                        }
                        Some(&c) => {
                            text.push(c);
                            i += 1;
                        }
                    }
                }
                tokens.push(Token::Str(text));
            }
            '=' | '!' | '<' | '>' => {
                let next_eq = chars.get(i + 1) == Some(&'=');
                let tok = match (c, next_eq) {
                    ('=', true) => Token::Compare(CompareOp::Eq),
                    ('=', false) => Token::Assign,
                    ('!', true) => Token::Compare(CompareOp::Ne),
                    ('!', false) => return Err(err(LexErrorKind::UnexpectedChar('!'), start)),
                    ('<', true) => Token::Compare(CompareOp::Le),
                    ('<', false) => Token::Compare(CompareOp::Lt),
                    ('>', true) => Token::Compare(CompareOp::Ge),
                    (_, false) => Token::Compare(CompareOp::Gt),
                    (_, true) => unreachable!(),
                };
                i += if next_eq { 2 } else { 1 };
                tokens.push(tok);
            }
            '(' => {
                i += 1;
                tokens.push(Token::LParen);
            }
            ')' => {
                i += 1;
                tokens.push(Token::RParen);
            }
            ',' => {
                i += 1;
                tokens.push(Token::Comma);
            }
            other => return Err(err(LexErrorKind::UnexpectedChar(other), start)),
        }
    }
    Ok(tokens)
}
