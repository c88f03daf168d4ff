//! Shared tokenizer for the line-oriented theory and schema languages.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// `*` or a named wildcard `*u`.
    Wild(Option<String>),
    LParen,
    RParen,
    Comma,
    Amp,
    Arrow,
    Bang,
    Eq,
    Neq,
    Assign,
    Lt,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub col: usize,
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Tokenizes one line; `#` starts a comment. Columns are 1-based.
pub(crate) fn lex_line(line: &str, lineno: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, width) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '&' => (Tok::Amp, 1),
            '<' => (Tok::Lt, 1),
            '=' => (Tok::Eq, 1),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '!' if next == Some('=') => (Tok::Neq, 2),
            '!' => (Tok::Bang, 1),
            ':' if next == Some('=') => (Tok::Assign, 2),
            '*' => {
                let mut j = i + 1;
                while j < chars.len() && ident_char(chars[j]) {
                    j += 1;
                }
                let name: String = chars[i + 1..j].iter().collect();
                let name = if name.is_empty() { None } else { Some(name) };
                (Tok::Wild(name), j - i)
            }
            c if ident_char(c) => {
                // Inner hyphens are allowed: `random-graph`, `order-type`.
                let mut j = i;
                while j < chars.len()
                    && (ident_char(chars[j])
                        || (chars[j] == '-' && chars.get(j + 1).is_some_and(|c| c.is_alphanumeric())))
                {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            other => {
                return Err(Error::Syntax {
                    line: lineno,
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push(Token { tok, col });
        i += width;
    }
    Ok(out)
}

/// Cursor over one line's tokens.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor {
    pub fn new(text: &str, line: usize) -> Result<Self> {
        Ok(Cursor {
            toks: lex_line(text, line)?,
            pos: 0,
            line,
            end_col: text.chars().count() + 1,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.toks.is_empty()
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.col).unwrap_or(self.end_col)
    }

    pub fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            line: self.line,
            col: self.col(),
            msg: msg.into(),
        })
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok, what: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    pub fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    pub fn keyword_is(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    pub fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.keyword(kw) {
            Ok(())
        } else {
            self.error(format!("expected `{kw}`"))
        }
    }

    pub fn number(&mut self, what: &str) -> Result<usize> {
        let col = self.col();
        let s = self.ident(what)?;
        s.parse().map_err(|_| Error::Syntax {
            line: self.line,
            col,
            msg: format!("expected {what}, found `{s}`"),
        })
    }

    pub fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.error("unexpected trailing input")
        }
    }

    /// Comma-separated identifiers (at least one).
    pub fn ident_list(&mut self, what: &str) -> Result<Vec<String>> {
        let mut out = vec![self.ident(what)?];
        while self.eat(&Tok::Comma) {
            out.push(self.ident(what)?);
        }
        Ok(out)
    }
}

/// A literal as written: `!R(a,b)`, `a = b` or `a != b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RawLit {
    pub positive: bool,
    /// `None` is equality.
    pub rel: Option<String>,
    pub args: Vec<RawArg>,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum RawArg {
    Name(String),
    Wild(Option<String>),
}

fn raw_arg(cur: &mut Cursor) -> Result<RawArg> {
    let arg = match cur.peek() {
        Some(Tok::Ident(s)) => RawArg::Name(s.clone()),
        Some(Tok::Wild(w)) => RawArg::Wild(w.clone()),
        _ => return cur.error("expected a variable, constant or wildcard"),
    };
    cur.next();
    Ok(arg)
}

pub(crate) fn raw_lit(cur: &mut Cursor) -> Result<RawLit> {
    let col = cur.col();
    let negated = cur.eat(&Tok::Bang);
    let first = match cur.peek() {
        Some(Tok::Ident(_)) | Some(Tok::Wild(_)) => raw_arg(cur)?,
        _ => return cur.error("expected a literal"),
    };
    if cur.eat(&Tok::LParen) {
        let RawArg::Name(rel) = first else {
            return cur.error("a wildcard cannot name a relation");
        };
        let mut args = vec![raw_arg(cur)?];
        while cur.eat(&Tok::Comma) {
            args.push(raw_arg(cur)?);
        }
        cur.expect(&Tok::RParen, "`)`")?;
        return Ok(RawLit {
            positive: !negated,
            rel: Some(rel),
            args,
            col,
        });
    }
    if negated {
        return cur.error("`!` must prefix a relational literal");
    }
    let positive = if cur.eat(&Tok::Eq) {
        true
    } else if cur.eat(&Tok::Neq) {
        false
    } else {
        return cur.error("expected `(`, `=` or `!=`");
    };
    let second = raw_arg(cur)?;
    Ok(RawLit {
        positive,
        rel: None,
        args: vec![first, second],
        col,
    })
}

/// `lit & lit & ...`
pub(crate) fn raw_conj(cur: &mut Cursor) -> Result<Vec<RawLit>> {
    let mut out = vec![raw_lit(cur)?];
    while cur.eat(&Tok::Amp) {
        out.push(raw_lit(cur)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_operators() {
        let toks: Vec<Tok> = lex_line("rule E(x,y) & !R(*u, *) -> a != b := # c", 1)
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect();
        assert!(toks.contains(&Tok::Arrow));
        assert!(toks.contains(&Tok::Neq));
        assert!(toks.contains(&Tok::Assign));
        assert!(toks.contains(&Tok::Wild(Some("u".into()))));
        assert!(toks.contains(&Tok::Wild(None)));
        assert!(!toks.contains(&Tok::Ident("c".into())));
    }

    #[test]
    fn reports_column() {
        let e = lex_line("relation E $", 4).unwrap_err();
        assert_eq!(
            e,
            Error::Syntax {
                line: 4,
                col: 12,
                msg: "unexpected character `$`".into()
            }
        );
    }
}
