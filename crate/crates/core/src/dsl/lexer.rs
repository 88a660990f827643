use std::fmt;

use super::{DslError, Span};
use crate::kernel::is_skolem_symbol;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Var(String),
    Int(usize),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Slash,
    Amp,
    Eq,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub(crate) fn tokenize(path: &str, text: &str) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, len, message: String| DslError::Syntax {
        path: path.to_string(),
        span: Span { line, column, len },
        message,
        expected: Vec::new(),
    };

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start_col = col;
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            ':' => Some(Tok::Colon),
            '/' => Some(Tok::Slash),
            '&' => Some(Tok::Amp),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token {
                tok,
                span: Span::new(line, start_col, 1),
            });
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                out.push(Token {
                    tok: Tok::Arrow,
                    span: Span::new(line, start_col, 2),
                });
                i += 2;
                col += 2;
                continue;
            }
            return Err(err(line, start_col, 1, "unexpected character `-`".into()));
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let len = i - start;
            col += len;
            let tok = classify(&word).map_err(|m| err(line, start_col, len, m))?;
            out.push(Token {
                tok,
                span: Span::new(line, start_col, len),
            });
            continue;
        }
        return Err(err(
            line,
            start_col,
            1,
            format!("unexpected character `{c}`"),
        ));
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, col, 0),
    });
    Ok(out)
}

fn classify(word: &str) -> Result<Tok, String> {
    let first = word.chars().next().expect("non-empty word");
    match first {
        'a'..='z' => {
            if word.chars().any(|c| c.is_ascii_uppercase()) {
                Err(format!(
                    "invalid identifier `{word}`: instances are lower case with `_` for spaces"
                ))
            } else if is_skolem_symbol(word) {
                Err(format!("`{word}` uses the reserved prefix `sk_`"))
            } else {
                Ok(Tok::Ident(word.to_string()))
            }
        }
        'A'..='Z' => Ok(Tok::Var(word.to_string())),
        '0'..='9' => word
            .parse()
            .map(Tok::Int)
            .map_err(|_| format!("invalid number `{word}`")),
        _ => Err(format!("identifiers cannot start with `{first}`")),
    }
}
