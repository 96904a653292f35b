//! Concrete formula grammar.
//!
//! ```text
//! f ::= f -> f | f '|' f | f & f | ~f | X f | X[t] f | Y f | G f | F f
//!     | true | false | atom | ( f )
//!     | nabla{f, ...} | nablam{t: f, ...} | nablas(f)
//!     | zip(f; f) | eat(/regex/; f; f) | chg(n; f; f; f)
//!     | mind(n; f) | mind'(n; f) | maxd(n; f) | maxd'(n; f) | U(f; f)
//! ```
//!
//! Binding from tightest: prefix operators, `&`, `|`, `->` (right
//! associative).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::formula::Formula;
use crate::language::{LanguageError, Regex};
use crate::time::TimeValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula syntax error at offset {pos}: {message}")]
pub struct FormulaSyntaxError {
    pub pos: usize,
    pub message: String,
}

const KEYWORDS: &[&str] = &[
    "X", "Y", "G", "F", "U", "true", "false", "nabla", "nablam", "nablas", "zip", "eat", "chg",
    "mind", "mind'", "maxd", "maxd'",
];

pub fn is_keyword(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

pub fn parse_formula(text: &str) -> Result<Formula, FormulaSyntaxError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let f = p.implication()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: &str) -> FormulaSyntaxError {
        FormulaSyntaxError {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        let n = token.chars().count();
        if self.chars.len() >= self.pos + n
            && self.chars[self.pos..self.pos + n].iter().copied().eq(token.chars())
        {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), FormulaSyntaxError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{token}`")))
        }
    }

    fn implication(&mut self) -> Result<Formula, FormulaSyntaxError> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaSyntaxError> {
        let mut items = vec![self.conjunction()?];
        while self.eat("|") {
            items.push(self.conjunction()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::Or(items)
        })
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaSyntaxError> {
        let mut items = vec![self.unary()?];
        while self.eat("&") {
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::And(items)
        })
    }

    fn identifier(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        match self.chars.get(self.pos) {
            Some(c) if c.is_alphabetic() || *c == '_' => self.pos += 1,
            _ => return None,
        }
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_alphanumeric() || *c == '_' || *c == '\'')
        {
            self.pos += 1;
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    /// Raw text up to (not including) `stop`, which is consumed.
    fn raw_until(&mut self, stop: char) -> Result<(usize, String), FormulaSyntaxError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(&c) = self.chars.get(self.pos) {
            if c == stop {
                let text = self.chars[start..self.pos].iter().collect();
                self.pos += 1;
                return Ok((start, text));
            }
            self.pos += 1;
        }
        Err(self.error(&format!("expected `{stop}`")))
    }

    fn time_literal(&mut self, stop: char) -> Result<TimeValue, FormulaSyntaxError> {
        let (start, text) = self.raw_until(stop)?;
        TimeValue::parse_literal(&text).ok_or(FormulaSyntaxError {
            pos: start,
            message: format!("invalid time literal `{}`", text.trim()),
        })
    }

    fn natural(&mut self) -> Result<u64, FormulaSyntaxError> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| FormulaSyntaxError {
            pos: start,
            message: "expected a natural number".into(),
        })
    }

    fn unary(&mut self) -> Result<Formula, FormulaSyntaxError> {
        if self.eat("~") {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if self.peek() == Some('(') {
            self.pos += 1;
            let f = self.implication()?;
            self.expect(")")?;
            return Ok(f);
        }
        let start = self.pos;
        let Some(word) = self.identifier() else {
            return Err(self.error("expected a formula"));
        };
        let boxed = |f: Formula| Box::new(f);
        Ok(match word.as_str() {
            "true" => Formula::Top,
            "false" => Formula::Bot,
            "X" => {
                if self.chars.get(self.pos) == Some(&'[') {
                    self.pos += 1;
                    let t = self.time_literal(']')?;
                    Formula::NextVia(t, boxed(self.unary()?))
                } else {
                    Formula::Next(boxed(self.unary()?))
                }
            }
            "Y" => Formula::Prev(boxed(self.unary()?)),
            "G" => Formula::Always(boxed(self.unary()?)),
            "F" => Formula::Eventually(boxed(self.unary()?)),
            "nabla" => {
                self.expect("{")?;
                let mut set = BTreeSet::new();
                if !self.eat("}") {
                    loop {
                        set.insert(self.implication()?);
                        if self.eat("}") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                Formula::NablaOrbit(set)
            }
            "nablam" => {
                self.expect("{")?;
                let mut map = BTreeMap::new();
                if !self.eat("}") {
                    loop {
                        let key_pos = self.pos;
                        let t = self.time_literal(':')?;
                        if map.insert(t, self.implication()?).is_some() {
                            return Err(FormulaSyntaxError {
                                pos: key_pos,
                                message: "duplicate key in nablam".into(),
                            });
                        }
                        if self.eat("}") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                Formula::NablaMulti(map)
            }
            "nablas" => {
                self.expect("(")?;
                let f = self.implication()?;
                self.expect(")")?;
                Formula::NablaStep(boxed(f))
            }
            "zip" | "U" => {
                let [f, g] = self.arguments::<2>()?;
                if word == "zip" {
                    Formula::Zip(boxed(f), boxed(g))
                } else {
                    Formula::Until(boxed(f), boxed(g))
                }
            }
            "eat" => {
                self.expect("(")?;
                self.expect("/")?;
                let (re_start, pattern) = self.raw_until('/')?;
                let re = Regex::parse(&pattern).map_err(|e| match e {
                    LanguageError::Syntax { pos, message } => FormulaSyntaxError {
                        pos: re_start + pos,
                        message,
                    },
                    other => FormulaSyntaxError {
                        pos: re_start,
                        message: other.to_string(),
                    },
                })?;
                self.expect(";")?;
                let f = self.implication()?;
                self.expect(";")?;
                let g = self.implication()?;
                self.expect(")")?;
                Formula::Eat(re, boxed(f), boxed(g))
            }
            "chg" => {
                self.expect("(")?;
                let t = self.natural()?;
                self.expect(";")?;
                let [f, g, h] = self.rest_arguments::<3>()?;
                Formula::Chg(t, boxed(f), boxed(g), boxed(h))
            }
            "mind" | "mind'" | "maxd" | "maxd'" => {
                self.expect("(")?;
                let t = self.natural()?;
                self.expect(";")?;
                let [f] = self.rest_arguments::<1>()?;
                match word.as_str() {
                    "mind" => Formula::MinDur(t, boxed(f)),
                    "mind'" => Formula::MinDurIncl(t, boxed(f)),
                    "maxd" => Formula::MaxDur(t, boxed(f)),
                    _ => Formula::MaxDurExcl(t, boxed(f)),
                }
            }
            _ if is_keyword(&word) => {
                self.pos = start;
                return Err(self.error(&format!("keyword `{word}` cannot be used as an atom")));
            }
            _ => Formula::Atom(word),
        })
    }

    /// `( f ; f ; ... )` with exactly `N` formulas.
    fn arguments<const N: usize>(&mut self) -> Result<[Formula; N], FormulaSyntaxError> {
        self.expect("(")?;
        self.rest_arguments()
    }

    fn rest_arguments<const N: usize>(&mut self) -> Result<[Formula; N], FormulaSyntaxError> {
        let mut out = Vec::with_capacity(N);
        for i in 0..N {
            if i > 0 {
                self.expect(";")?;
            }
            out.push(self.implication()?);
        }
        self.expect(")")?;
        Ok(out.try_into().unwrap_or_else(|_| unreachable!()))
    }
}
