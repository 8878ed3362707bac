//! Tokenizer for the surface language. `#` starts a line comment.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(usize),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    Comma,
    Colon,
    Pipe,
    Equals,
    Arrow,
    StarHat,
    Caret,
    Underscore,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::LAngle => write!(f, "`<`"),
            Tok::RAngle => write!(f, "`>`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Pipe => write!(f, "`|`"),
            Tok::Equals => write!(f, "`=`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::StarHat => write!(f, "`*^`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::Underscore => write!(f, "`_`"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

fn ident_start(c: char) -> bool {
    c.is_alphabetic()
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            '#' => {
                while let Some(&c) = chars.peek() {
                    bump(&mut chars);
                    if c == '\n' {
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {
                bump(&mut chars);
            }
            '(' => {
                bump(&mut chars);
                out.push(Token { tok: Tok::LParen, pos });
            }
            ')' => {
                bump(&mut chars);
                out.push(Token { tok: Tok::RParen, pos });
            }
            '[' => {
                bump(&mut chars);
                out.push(Token { tok: Tok::LBracket, pos });
            }
            ']' => {
                bump(&mut chars);
                out.push(Token { tok: Tok::RBracket, pos });
            }
            '<' => {
                bump(&mut chars);
                out.push(Token { tok: Tok::LAngle, pos });
            }
            '>' => {
                bump(&mut chars);
                out.push(Token { tok: Tok::RAngle, pos });
            }
            ',' => {
                bump(&mut chars);
                out.push(Token { tok: Tok::Comma, pos });
            }
            ':' => {
                bump(&mut chars);
                out.push(Token { tok: Tok::Colon, pos });
            }
            '|' => {
                bump(&mut chars);
                out.push(Token { tok: Tok::Pipe, pos });
            }
            '=' => {
                bump(&mut chars);
                out.push(Token { tok: Tok::Equals, pos });
            }
            '^' => {
                bump(&mut chars);
                out.push(Token { tok: Tok::Caret, pos });
            }
            '-' => {
                bump(&mut chars);
                match chars.peek() {
                    Some('>') => {
                        bump(&mut chars);
                        out.push(Token { tok: Tok::Arrow, pos });
                    }
                    _ => {
                        return Err(ParseError { pos, msg: "expected `->`".into() });
                    }
                }
            }
            '*' => {
                bump(&mut chars);
                match chars.peek() {
                    Some('^') => {
                        bump(&mut chars);
                        out.push(Token { tok: Tok::StarHat, pos });
                    }
                    _ => {
                        return Err(ParseError { pos, msg: "expected `*^`".into() });
                    }
                }
            }
            c if c.is_ascii_digit() => {
                let mut n = 0usize;
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        n = n * 10 + (c as usize - '0' as usize);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                out.push(Token { tok: Tok::Num(n), pos });
            }
            '_' => {
                bump(&mut chars);
                out.push(Token { tok: Tok::Underscore, pos });
            }
            c if ident_start(c) => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if ident_continue(c) {
                        s.push(c);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                out.push(Token { tok: Tok::Ident(s), pos });
            }
            other => {
                return Err(ParseError { pos, msg: format!("unexpected character `{other}`") });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_a_context_declaration() {
        let toks = lex("ctx G1 = (x : Ob, f : x -> y)").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("ctx".into()));
        assert!(toks.iter().any(|t| t.tok == Tok::Arrow));
    }

    #[test]
    fn lexes_units_and_composites() {
        let toks = lex("(α *^2_1 1_(p_x))").unwrap();
        assert!(toks.iter().any(|t| t.tok == Tok::StarHat));
        assert!(toks.iter().any(|t| t.tok == Tok::Underscore));
        assert!(toks.iter().any(|t| t.tok == Tok::Ident("p_x".into())));
    }

    #[test]
    fn rejects_a_broken_arrow() {
        let err = lex("f : x - y").unwrap_err();
        assert_eq!(err.pos.col, 7);
    }

    #[test]
    fn comments_are_skipped() {
        let toks = lex("# hello\nctx").unwrap();
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].pos.line, 2);
    }
}
