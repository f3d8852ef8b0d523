use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Ident,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Number => "number",
            TokenKind::Ident => "identifier",
            TokenKind::Plus => "`+`",
            TokenKind::Minus => "`-`",
            TokenKind::Star => "`*`",
            TokenKind::Slash => "`/`",
            TokenKind::Caret => "`^`",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::Comma => "`,`",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// Character offset into the input.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lex error at offset {position}: {message}")]
pub struct LexError {
    pub position: usize,
    pub message: String,
}

/// Splits an expression into tokens. Whitespace separates tokens and is
/// otherwise ignored.
pub fn tokenize(input: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(TokenKind::Plus),
            '-' => Some(TokenKind::Minus),
            '*' => Some(TokenKind::Star),
            '/' => Some(TokenKind::Slash),
            '^' => Some(TokenKind::Caret),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            ',' => Some(TokenKind::Comma),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Token {
                kind,
                lexeme: c.to_string(),
                position: i,
            });
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            let mut seen_dot = false;
            let mut digits = 0;
            while i < chars.len() && (chars[i].is_ascii_digit() || (chars[i] == '.' && !seen_dot)) {
                if chars[i] == '.' {
                    seen_dot = true;
                } else {
                    digits += 1;
                }
                i += 1;
            }
            if digits == 0 {
                return Err(LexError {
                    position: start,
                    message: "number has no digits".into(),
                });
            }
            out.push(Token {
                kind: TokenKind::Number,
                lexeme: chars[start..i].iter().collect(),
                position: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                kind: TokenKind::Ident,
                lexeme: chars[start..i].iter().collect(),
                position: start,
            });
            continue;
        }
        return Err(LexError {
            position: i,
            message: format!("unexpected character {c:?}"),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use TokenKind::*;

    fn kinds(s: &str) -> Vec<(TokenKind, String)> {
        tokenize(s)
            .unwrap()
            .into_iter()
            .map(|t| (t.kind, t.lexeme))
            .collect()
    }

    #[test]
    fn power_with_ratio() {
        let got = kinds("z^(4/3)");
        let want = [
            (Ident, "z"),
            (Caret, "^"),
            (LParen, "("),
            (Number, "4"),
            (Slash, "/"),
            (Number, "3"),
            (RParen, ")"),
        ];
        assert_eq!(got.len(), want.len());
        for ((k, l), (wk, wl)) in got.iter().zip(want) {
            assert_eq!((*k, l.as_str()), (wk, wl));
        }
    }

    #[test]
    fn linear() {
        let got: Vec<_> = kinds("2*z+1").into_iter().map(|(k, _)| k).collect();
        assert_eq!(got, vec![Number, Star, Ident, Plus, Number]);
    }

    #[test]
    fn bad_character_position() {
        let err = tokenize("z @ 3").unwrap_err();
        assert_eq!(err.position, 2);
    }

    #[test]
    fn decimals_and_positions() {
        let toks = tokenize(" 1.25 + .5").unwrap();
        assert_eq!(toks[0].lexeme, "1.25");
        assert_eq!(toks[0].position, 1);
        assert_eq!(toks[2].lexeme, ".5");
        assert_eq!(toks[2].position, 8);
        assert!(tokenize(".").is_err());
    }

    #[test]
    fn positions_are_char_offsets() {
        let toks = tokenize("ζ").unwrap_err();
        assert_eq!(toks.position, 0);
        let toks = tokenize("z+ζ").unwrap_err();
        assert_eq!(toks.position, 2);
    }
}
