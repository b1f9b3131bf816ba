use crate::error::{MilError, Result};
use crate::term::{GroundAtom, GroundTerm};

/// Character-level scanner shared by the problem-file, meta-rule, and
/// hypothesis parsers. Operates on a single line; `line_no` is carried
/// into every error.
pub struct Scanner<'a> {
    chars: Vec<char>,
    pos: usize,
    line_no: usize,
    src: &'a str,
}

impl<'a> Scanner<'a> {
    pub fn new(src: &'a str, line_no: usize) -> Self {
        Scanner {
            chars: src.chars().collect(),
            pos: 0,
            line_no,
            src,
        }
    }

    pub fn err(&self, msg: impl Into<String>) -> MilError {
        MilError::Parse {
            line: self.line_no,
            msg: format!("{} (in `{}`)", msg.into(), self.src.trim()),
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_raw();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    pub fn skip_ws(&mut self) {
        while matches!(self.peek_raw(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    /// Next non-whitespace character without consuming it.
    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    /// Consume `c` if it is the next non-whitespace character.
    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    /// Consume the literal string `s` (no whitespace inside it).
    pub fn expect_str(&mut self, s: &str) -> Result<()> {
        self.skip_ws();
        for want in s.chars() {
            if self.bump() != Some(want) {
                return Err(self.err(format!("expected `{s}`")));
            }
        }
        Ok(())
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// Remaining unconsumed input.
    pub fn rest(&self) -> String {
        self.chars[self.pos..].iter().collect()
    }

    pub fn expect_end(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("trailing input"))
        }
    }

    fn ident_tail(&mut self, first: char) -> String {
        let mut s = String::new();
        s.push(first);
        while matches!(self.peek_raw(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            s.push(self.bump().unwrap());
        }
        s
    }

    /// Identifier starting with a lowercase letter (predicate / symbol names).
    pub fn lower_ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => {
                self.bump();
                Ok(self.ident_tail(c))
            }
            _ => Err(self.err("expected lowercase identifier")),
        }
    }

    /// Identifier starting with an uppercase letter (variables / rule slots).
    pub fn upper_ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(c) if c.is_ascii_uppercase() => {
                self.bump();
                Ok(self.ident_tail(c))
            }
            _ => Err(self.err("expected uppercase identifier")),
        }
    }

    pub fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let mut s = String::new();
        if self.peek_raw() == Some('-') {
            s.push(self.bump().unwrap());
        }
        while matches!(self.peek_raw(), Some(c) if c.is_ascii_digit()) {
            s.push(self.bump().unwrap());
        }
        if s.is_empty() || s == "-" {
            return Err(self.err("expected integer"));
        }
        s.parse::<i64>()
            .map_err(|_| self.err(format!("integer out of range: {s}")))
    }

    /// Ground term: symbol, integer, list `[t,...]`, or compound `f(t,...)`.
    pub fn ground_term(&mut self) -> Result<GroundTerm> {
        match self.peek() {
            Some('[') => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat(']') {
                    loop {
                        items.push(self.ground_term()?);
                        if self.eat(']') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                Ok(GroundTerm::List(items))
            }
            Some(c) if c == '-' || c.is_ascii_digit() => Ok(GroundTerm::Int(self.integer()?)),
            Some(c) if c.is_ascii_lowercase() => {
                let name = self.lower_ident()?;
                if self.peek_raw() == Some('(') {
                    self.bump();
                    let mut args = Vec::new();
                    loop {
                        args.push(self.ground_term()?);
                        if self.eat(')') {
                            break;
                        }
                        self.expect(',')?;
                    }
                    Ok(GroundTerm::Compound(name, args))
                } else {
                    Ok(GroundTerm::Sym(name))
                }
            }
            Some(c) if c.is_ascii_uppercase() => {
                Err(self.err("variables are not allowed in ground terms"))
            }
            _ => Err(self.err("expected term")),
        }
    }

    /// Ground atom `pred(t1,...,tn)`; a bare predicate name is a 0-ary atom.
    pub fn ground_atom(&mut self) -> Result<GroundAtom> {
        let pred = self.lower_ident()?;
        let mut args = Vec::new();
        if self.peek_raw() == Some('(') {
            self.bump();
            loop {
                args.push(self.ground_term()?);
                if self.eat(')') {
                    break;
                }
                self.expect(',')?;
            }
        }
        Ok(GroundAtom { pred, args })
    }
}

/// Parse a complete string as one ground term.
pub fn parse_ground_term(s: &str) -> Result<GroundTerm> {
    let mut sc = Scanner::new(s, 1);
    let t = sc.ground_term()?;
    sc.expect_end()?;
    Ok(t)
}

/// Parse a complete string as one ground atom.
pub fn parse_ground_atom(s: &str) -> Result<GroundAtom> {
    let mut sc = Scanner::new(s, 1);
    let a = sc.ground_atom()?;
    sc.expect_end()?;
    Ok(a)
}
