use std::fmt;

use crate::error::FrontendError;
use crate::frontend::ast::Span;

pub const KEYWORDS: [&str; 6] = ["class", "void", "this", "if", "else", "loop"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Keyword(&'static str),
    Punct(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Keyword(k) => write!(f, "`{k}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const PUNCT: &str = "{}();,.@?";

pub fn tokenize(source: &str) -> Result<Vec<Token>, FrontendError> {
    tokenize_file(source, 0)
}

pub fn tokenize_file(source: &str, file: usize) -> Result<Vec<Token>, FrontendError> {
    let mut out = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let span = Span { file, line, col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '/' {
            chars.next();
            col += 1;
            if chars.peek() != Some(&'/') {
                return Err(FrontendError::SyntaxError {
                    line: span.line,
                    col: span.col,
                    expected: "`//` comment".into(),
                    found: "`/`".into(),
                });
            }
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Keyword(k),
                None => Tok::Ident(word),
            };
            out.push(Token { tok, span });
        } else if PUNCT.contains(c) {
            chars.next();
            col += 1;
            out.push(Token {
                tok: Tok::Punct(c),
                span,
            });
        } else {
            return Err(FrontendError::SyntaxError {
                line: span.line,
                col: span.col,
                expected: "a token".into(),
                found: format!("`{c}`"),
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { file, line, col },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let toks = tokenize("class A { // hi\n  void m(); }").unwrap();
        assert_eq!(toks[0].tok, Tok::Keyword("class"));
        assert_eq!(toks[1].tok, Tok::Ident("A".into()));
        assert_eq!(toks[1].span, Span::new(1, 7));
        assert_eq!(toks[3].tok, Tok::Keyword("void"));
        assert_eq!(toks[3].span, Span::new(2, 3));
        assert_eq!(toks.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn rejects_stray_characters() {
        assert!(matches!(
            tokenize("a = b"),
            Err(FrontendError::SyntaxError { line: 1, col: 3, .. })
        ));
        assert!(tokenize("a / b").is_err());
    }
}
