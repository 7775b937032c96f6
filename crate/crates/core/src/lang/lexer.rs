//! Tokenizer shared by the model, formula and never-claim parsers.
//!
//! Keywords are not reserved; parsers match identifier spellings in
//! position. `//` starts a comment running to end of line.

use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Loc {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TokenKind {
    Ident(String),
    Int(u32),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    /// `->`
    Arrow,
    /// `-` (the open endpoint marker)
    Dash,
    Bang,
    AndAnd,
    OrOr,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier '{s}'"),
            TokenKind::Int(n) => write!(f, "integer '{n}'"),
            TokenKind::LParen => write!(f, "'('"),
            TokenKind::RParen => write!(f, "')'"),
            TokenKind::LBrace => write!(f, "'{{'"),
            TokenKind::RBrace => write!(f, "'}}'"),
            TokenKind::LBracket => write!(f, "'['"),
            TokenKind::RBracket => write!(f, "']'"),
            TokenKind::Comma => write!(f, "','"),
            TokenKind::Semi => write!(f, "';'"),
            TokenKind::Arrow => write!(f, "'->'"),
            TokenKind::Dash => write!(f, "'-'"),
            TokenKind::Bang => write!(f, "'!'"),
            TokenKind::AndAnd => write!(f, "'&&'"),
            TokenKind::OrOr => write!(f, "'||'"),
            TokenKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub kind: TokenKind,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub message: String,
    pub loc: Loc,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.loc, self.message)
    }
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let mut tokens = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! push {
        ($kind:expr, $len:expr) => {{
            tokens.push(Token { kind: $kind, loc: Loc { line, col } });
            i += $len;
            col += $len as u32;
        }};
    }

    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                col += 1;
            }
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' => push!(TokenKind::LParen, 1),
            b')' => push!(TokenKind::RParen, 1),
            b'{' => push!(TokenKind::LBrace, 1),
            b'}' => push!(TokenKind::RBrace, 1),
            b'[' => push!(TokenKind::LBracket, 1),
            b']' => push!(TokenKind::RBracket, 1),
            b',' => push!(TokenKind::Comma, 1),
            b';' => push!(TokenKind::Semi, 1),
            b'!' => push!(TokenKind::Bang, 1),
            b'&' if bytes.get(i + 1) == Some(&b'&') => push!(TokenKind::AndAnd, 2),
            b'|' if bytes.get(i + 1) == Some(&b'|') => push!(TokenKind::OrOr, 2),
            b'-' if bytes.get(i + 1) == Some(&b'>') => push!(TokenKind::Arrow, 2),
            b'-' => push!(TokenKind::Dash, 1),
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let s = &text[start..i];
                let n: u32 = s.parse().map_err(|_| LexError {
                    message: format!("integer literal '{s}' out of range"),
                    loc: Loc { line, col },
                })?;
                tokens.push(Token { kind: TokenKind::Int(n), loc: Loc { line, col } });
                col += (i - start) as u32;
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let s = text[start..i].to_string();
                tokens.push(Token { kind: TokenKind::Ident(s), loc: Loc { line, col } });
                col += (i - start) as u32;
            }
            _ => {
                return Err(LexError {
                    message: format!("unexpected character '{}'", text[i..].chars().next().unwrap()),
                    loc: Loc { line, col },
                })
            }
        }
    }
    tokens.push(Token { kind: TokenKind::Eof, loc: Loc { line, col } });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_model_fragment() {
        let toks = tokenize("automaton A (1) { // comment\n q0 -> q1 (-, a, 2); }").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| &t.kind).collect();
        assert!(matches!(kinds[0], TokenKind::Ident(s) if s == "automaton"));
        assert!(kinds.contains(&&TokenKind::Arrow));
        assert!(kinds.contains(&&TokenKind::Dash));
        assert!(kinds.iter().any(|k| matches!(k, TokenKind::Int(2))));
        assert!(matches!(kinds.last().unwrap(), TokenKind::Eof));
    }

    #[test]
    fn tracks_line_and_column() {
        let toks = tokenize("ab\n  cd").unwrap();
        assert_eq!(toks[0].loc, Loc { line: 1, col: 1 });
        assert_eq!(toks[1].loc, Loc { line: 2, col: 3 });
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("a # b").unwrap_err();
        assert_eq!(err.loc.line, 1);
        assert!(err.message.contains('#'));
    }
}
