use std::fmt;

use crate::formula::StrategyKind;

use super::{ParseError, Position};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Lowercase- or digit-initial identifier, or a numeric literal.
    Word(String),
    /// Uppercase- or underscore-initial identifier.
    Var(String),
    Conn(StrategyKind, String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Dot,
    Slash,
    Neq,
    Arrow,
    Eq,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Var(v) => write!(f, "variable `{v}`"),
            Tok::Conn(k, n) => write!(f, "`{}{}`", k.connective(), n),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Arrow => f.write_str("`<-`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Position,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let take_while = |i: &mut usize, col: &mut usize, pred: &dyn Fn(char) -> bool| -> String {
        let start = *i;
        while *i < chars.len() && pred(chars[*i]) {
            *i += 1;
            *col += 1;
        }
        chars[start..*i].iter().collect()
    };

    while i < chars.len() {
        let c = chars[i];
        let pos = Position { line, col };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let single = |t: Tok| Token { tok: t, pos };
        let tok = match c {
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '[' => single(Tok::LBracket),
            ']' => single(Tok::RBracket),
            ',' => single(Tok::Comma),
            ':' => single(Tok::Colon),
            '.' => single(Tok::Dot),
            '/' => single(Tok::Slash),
            '=' => single(Tok::Eq),
            '≠' => single(Tok::Neq),
            '←' => single(Tok::Arrow),
            '!' if chars.get(i + 1) == Some(&'=') => {
                i += 2;
                col += 2;
                out.push(Token { tok: Tok::Neq, pos });
                continue;
            }
            '<' if chars.get(i + 1) == Some(&'-') => {
                i += 2;
                col += 2;
                out.push(Token { tok: Tok::Arrow, pos });
                continue;
            }
            '&' | '|' => {
                let kind = if c == '&' { StrategyKind::Conjunctive } else { StrategyKind::Disjunctive };
                i += 1;
                col += 1;
                let name = take_while(&mut i, &mut col, &is_ident_char);
                if name.is_empty() {
                    return Err(ParseError::Syntax {
                        pos,
                        expected: "a strategy name after the connective".into(),
                        found: format!("`{c}`"),
                    });
                }
                out.push(Token { tok: Tok::Conn(kind, name), pos });
                continue;
            }
            c if c.is_ascii_digit() => {
                let mut word = take_while(&mut i, &mut col, &is_ident_char);
                let all_digits = word.bytes().all(|b| b.is_ascii_digit());
                if all_digits && chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                    i += 1;
                    col += 1;
                    word.push('.');
                    word.push_str(&take_while(&mut i, &mut col, &|d: char| d.is_ascii_digit()));
                }
                out.push(Token { tok: Tok::Word(word), pos });
                continue;
            }
            c if c.is_ascii_lowercase() => {
                let word = take_while(&mut i, &mut col, &is_ident_char);
                out.push(Token { tok: Tok::Word(word), pos });
                continue;
            }
            c if c.is_ascii_uppercase() || c == '_' => {
                let word = take_while(&mut i, &mut col, &is_ident_char);
                out.push(Token { tok: Tok::Var(word), pos });
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    expected: "a clause".into(),
                    found: format!("character `{other}`"),
                })
            }
        };
        out.push(tok);
        i += 1;
        col += 1;
    }
    out.push(Token { tok: Tok::Eof, pos: Position { line, col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn decimals_and_terminators() {
        assert_eq!(
            toks("p : [0.5, 1]."),
            vec![
                Tok::Word("p".into()),
                Tok::Colon,
                Tok::LBracket,
                Tok::Word("0.5".into()),
                Tok::Comma,
                Tok::Word("1".into()),
                Tok::RBracket,
                Tok::Dot,
                Tok::Eof
            ]
        );
        assert_eq!(toks("X != 3.")[..3], [Tok::Var("X".into()), Tok::Neq, Tok::Word("3".into())]);
    }

    #[test]
    fn connectives_and_comments() {
        assert_eq!(
            toks("(a &igc b) % trailing\n<-"),
            vec![
                Tok::LParen,
                Tok::Word("a".into()),
                Tok::Conn(StrategyKind::Conjunctive, "igc".into()),
                Tok::Word("b".into()),
                Tok::RParen,
                Tok::Arrow,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let t = tokenize("a\n  b").unwrap();
        assert_eq!(t[1].pos, Position { line: 2, col: 3 });
        assert!(tokenize("a $").is_err());
    }
}
