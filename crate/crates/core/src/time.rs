//! Discrete time monoids and their derived order.
//!
//! A time monoid is finitely generated: ℕ by `1`, ℤ by `±1`, and the free
//! monoids Σ* (named symbols) and `FreeIdx(K)` (numbered generators
//! `0..K`). Elements are represented by [`TimeValue`], which is either an
//! integer (ℕ, ℤ) or a finite word of symbol names (Σ*, `FreeIdx`).

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeError {
    #[error("time value `{value}` is not valid for {monoid} time")]
    InvalidValue { value: String, monoid: String },
    #[error("symbol `{symbol}` is not a generator of {monoid} time")]
    UnknownSymbol { symbol: String, monoid: String },
}

/// A finitely generated discrete time structure `(T, 0, +)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TimeMonoid {
    Nat,
    Int,
    /// Free monoid over an ordered alphabet of named symbols.
    Word(Vec<String>),
    /// Free monoid over `K` numbered generators `0..K`.
    FreeIdx(usize),
}

/// An element of some time monoid.
///
/// `Num` is used by ℕ and ℤ; `Word` by Σ* and `FreeIdx`, whose symbols are
/// the decimal generator indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum TimeValue {
    Num(i64),
    Word(Vec<String>),
}

/// Order-theoretic classification of a monoid's derived order `≤`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderProfile {
    pub linear: bool,
    pub symmetric: bool,
    pub nonbranching: bool,
}

impl TimeValue {
    pub fn word<S: AsRef<str>>(symbols: &[S]) -> Self {
        TimeValue::Word(symbols.iter().map(|s| s.as_ref().to_string()).collect())
    }

    /// Parses the textual literal used in formulas and on the command line.
    ///
    /// `~` is the empty word, an optionally signed decimal is a number, a
    /// literal containing `.` is a dot-separated word, and anything else is
    /// read as one symbol per character.
    pub fn parse_literal(text: &str) -> Option<Self> {
        let text = text.trim();
        if text.is_empty() {
            return None;
        }
        if text == "~" {
            return Some(TimeValue::Word(Vec::new()));
        }
        let digits = text.strip_prefix('-').unwrap_or(text);
        if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            return text.parse().ok().map(TimeValue::Num);
        }
        let symbol_ok = |s: &str| {
            !s.is_empty()
                && s.chars()
                    .all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
        };
        if text.contains('.') {
            let mut parts: Vec<&str> = text.split('.').collect();
            if parts.last() == Some(&"") {
                parts.pop();
            }
            if parts.is_empty() || !parts.iter().all(|p| symbol_ok(p)) {
                return None;
            }
            return Some(TimeValue::word(&parts));
        }
        if !symbol_ok(text) {
            return None;
        }
        Some(TimeValue::Word(text.chars().map(|c| c.to_string()).collect()))
    }
}

impl fmt::Display for TimeValue {
    /// Inverse of [`TimeValue::parse_literal`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeValue::Num(n) => write!(f, "{n}"),
            TimeValue::Word(w) if w.is_empty() => f.write_str("~"),
            TimeValue::Word(w) => {
                let compact = w.iter().all(|s| {
                    let mut chars = s.chars();
                    matches!((chars.next(), chars.next()), (Some(c), None) if !c.is_ascii_digit())
                });
                if compact {
                    for s in w {
                        f.write_str(s)?;
                    }
                    Ok(())
                } else {
                    f.write_str(&w.join("."))?;
                    if w.len() == 1 {
                        f.write_str(".")?;
                    }
                    Ok(())
                }
            }
        }
    }
}

impl fmt::Display for TimeMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeMonoid::Nat => f.write_str("nat"),
            TimeMonoid::Int => f.write_str("int"),
            TimeMonoid::Word(alphabet) => write!(f, "word {}", alphabet.join(" ")),
            TimeMonoid::FreeIdx(k) => write!(f, "free {k}"),
        }
    }
}

impl TimeMonoid {
    pub fn identity(&self) -> TimeValue {
        match self {
            TimeMonoid::Nat | TimeMonoid::Int => TimeValue::Num(0),
            TimeMonoid::Word(_) | TimeMonoid::FreeIdx(_) => TimeValue::Word(Vec::new()),
        }
    }

    /// Generator symbols of the free monoids, in declaration order.
    pub fn alphabet(&self) -> Option<Vec<String>> {
        match self {
            TimeMonoid::Word(alphabet) => Some(alphabet.clone()),
            TimeMonoid::FreeIdx(k) => Some((0..*k).map(|i| i.to_string()).collect()),
            _ => None,
        }
    }

    /// The generating set, in the order used for step tables.
    pub fn generators(&self) -> Vec<TimeValue> {
        match self {
            TimeMonoid::Nat => vec![TimeValue::Num(1)],
            TimeMonoid::Int => vec![TimeValue::Num(1), TimeValue::Num(-1)],
            _ => self
                .alphabet()
                .unwrap_or_default()
                .into_iter()
                .map(|s| TimeValue::Word(vec![s]))
                .collect(),
        }
    }

    pub fn generator_count(&self) -> usize {
        match self {
            TimeMonoid::Nat => 1,
            TimeMonoid::Int => 2,
            TimeMonoid::Word(alphabet) => alphabet.len(),
            TimeMonoid::FreeIdx(k) => *k,
        }
    }

    fn invalid(&self, value: &TimeValue) -> TimeError {
        TimeError::InvalidValue {
            value: value.to_string(),
            monoid: self.to_string(),
        }
    }

    fn symbol_index(&self, symbol: &str) -> Result<usize, TimeError> {
        let found = match self {
            TimeMonoid::Word(alphabet) => alphabet.iter().position(|s| s == symbol),
            TimeMonoid::FreeIdx(k) => symbol
                .parse::<usize>()
                .ok()
                .filter(|i| i < k && i.to_string() == symbol),
            _ => None,
        };
        found.ok_or_else(|| TimeError::UnknownSymbol {
            symbol: symbol.to_string(),
            monoid: self.to_string(),
        })
    }

    /// Checks that `value` belongs to this monoid and returns its canonical
    /// form. A bare number `n` is accepted for `FreeIdx` as the one-letter
    /// word `n`.
    pub fn normalize(&self, value: &TimeValue) -> Result<TimeValue, TimeError> {
        match (self, value) {
            (TimeMonoid::Nat, TimeValue::Num(n)) if *n >= 0 => Ok(value.clone()),
            (TimeMonoid::Int, TimeValue::Num(_)) => Ok(value.clone()),
            (TimeMonoid::FreeIdx(_), TimeValue::Num(n)) if *n >= 0 => {
                let symbol = n.to_string();
                self.symbol_index(&symbol)?;
                Ok(TimeValue::Word(vec![symbol]))
            }
            (TimeMonoid::Word(_) | TimeMonoid::FreeIdx(_), TimeValue::Word(w)) => {
                for s in w {
                    self.symbol_index(s)?;
                }
                Ok(value.clone())
            }
            _ => Err(self.invalid(value)),
        }
    }

    /// Decomposes `value` into a sequence of generator indices (positions in
    /// [`TimeMonoid::generators`]) whose sum is `value`.
    pub fn decompose(&self, value: &TimeValue) -> Result<Vec<usize>, TimeError> {
        match (self, self.normalize(value)?) {
            (TimeMonoid::Nat, TimeValue::Num(n)) => Ok(vec![0; n as usize]),
            (TimeMonoid::Int, TimeValue::Num(n)) => {
                let generator = if n >= 0 { 0 } else { 1 };
                Ok(vec![generator; n.unsigned_abs() as usize])
            }
            (_, TimeValue::Word(w)) => w.iter().map(|s| self.symbol_index(s)).collect(),
            (_, v) => Err(self.invalid(&v)),
        }
    }

    /// The monoid operation.
    pub fn add(&self, a: &TimeValue, b: &TimeValue) -> Result<TimeValue, TimeError> {
        let (a, b) = (self.normalize(a)?, self.normalize(b)?);
        match (a, b) {
            (TimeValue::Num(x), TimeValue::Num(y)) => x
                .checked_add(y)
                .map(TimeValue::Num)
                .ok_or_else(|| self.invalid(&TimeValue::Num(x))),
            (TimeValue::Word(mut x), TimeValue::Word(y)) => {
                x.extend(y);
                Ok(TimeValue::Word(x))
            }
            (a, _) => Err(self.invalid(&a)),
        }
    }

    /// The derived order: returns `c` with `a + c = b` if `a ≤ b`.
    pub fn leq(&self, a: &TimeValue, b: &TimeValue) -> Result<Option<TimeValue>, TimeError> {
        let (a, b) = (self.normalize(a)?, self.normalize(b)?);
        Ok(match (self, a, b) {
            (TimeMonoid::Nat, TimeValue::Num(x), TimeValue::Num(y)) => {
                (x <= y).then(|| TimeValue::Num(y - x))
            }
            (TimeMonoid::Int, TimeValue::Num(x), TimeValue::Num(y)) => {
                y.checked_sub(x).map(TimeValue::Num)
            }
            (_, TimeValue::Word(x), TimeValue::Word(y)) => y
                .strip_prefix(x.as_slice())
                .map(|rest| TimeValue::Word(rest.to_vec())),
            _ => None,
        })
    }

    /// Classifies the derived order `≤`.
    pub fn classify(&self) -> OrderProfile {
        let (linear, symmetric, nonbranching) = match self {
            TimeMonoid::Nat => (true, false, true),
            TimeMonoid::Int => (true, true, true),
            TimeMonoid::Word(_) | TimeMonoid::FreeIdx(_) => {
                // With at most one generator the free monoid is ℕ (or trivial).
                let small = self.generator_count() <= 1;
                (small, false, small)
            }
        };
        OrderProfile {
            linear,
            symmetric,
            nonbranching,
        }
    }

    /// All elements of generator-length at most `bound`, in a fixed order.
    pub fn elements_up_to(&self, bound: usize) -> Vec<TimeValue> {
        match self {
            TimeMonoid::Nat => (0..=bound as i64).map(TimeValue::Num).collect(),
            TimeMonoid::Int => {
                let b = bound as i64;
                let mut out = vec![TimeValue::Num(0)];
                for i in 1..=b {
                    out.push(TimeValue::Num(i));
                    out.push(TimeValue::Num(-i));
                }
                out
            }
            _ => {
                let alphabet = self.alphabet().unwrap_or_default();
                let mut out = vec![Vec::new()];
                let mut layer: Vec<Vec<String>> = vec![Vec::new()];
                for _ in 0..bound {
                    if alphabet.is_empty() {
                        break;
                    }
                    layer = layer
                        .iter()
                        .flat_map(|w| {
                            alphabet.iter().map(move |s| {
                                let mut next = w.clone();
                                next.push(s.clone());
                                next
                            })
                        })
                        .collect();
                    out.extend(layer.iter().cloned());
                }
                out.into_iter().map(TimeValue::Word).collect()
            }
        }
    }
}
