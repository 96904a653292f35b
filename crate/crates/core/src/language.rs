//! Regular languages over a word-time alphabet.
//!
//! Patterns use literals (one character per symbol), juxtaposition, `|`,
//! postfix `*`, parentheses and `~` for the empty word. They compile to a
//! total, minimal [`Dfa`] through a Thompson NFA and the subset
//! construction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LanguageError {
    #[error("regex syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("regex literal `{0}` is not a symbol of the alphabet")]
    AlphabetMismatch(char),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regex {
    /// The empty word.
    Epsilon,
    Lit(char),
    Concat(Vec<Regex>),
    Alt(Vec<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn parse(pattern: &str) -> Result<Regex, LanguageError> {
        let chars: Vec<char> = pattern.chars().collect();
        let mut parser = RegexParser { chars, pos: 0 };
        let re = parser.alternation()?;
        if parser.pos < parser.chars.len() {
            return Err(parser.error("unexpected `)`"));
        }
        Ok(re)
    }

    /// Literal characters occurring in the pattern.
    pub fn literals(&self) -> BTreeSet<char> {
        let mut out = BTreeSet::new();
        self.collect_literals(&mut out);
        out
    }

    fn collect_literals(&self, out: &mut BTreeSet<char>) {
        match self {
            Regex::Epsilon => {}
            Regex::Lit(c) => {
                out.insert(*c);
            }
            Regex::Concat(items) | Regex::Alt(items) => {
                items.iter().for_each(|r| r.collect_literals(out))
            }
            Regex::Star(inner) => inner.collect_literals(out),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: alternation, 1: concatenation item, 2: star operand
        let own = match self {
            Regex::Alt(_) => 0,
            Regex::Concat(_) => 1,
            Regex::Star(_) => 2,
            Regex::Epsilon | Regex::Lit(_) => 3,
        };
        let paren = own < prec || (prec == 1 && matches!(self, Regex::Concat(_)));
        if paren {
            f.write_str("(")?;
        }
        match self {
            Regex::Epsilon => f.write_str("~")?,
            Regex::Lit(c) => write!(f, "{c}")?,
            Regex::Concat(items) => {
                for item in items {
                    item.fmt_prec(f, 1)?;
                }
            }
            Regex::Alt(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    item.fmt_prec(f, if matches!(item, Regex::Alt(_)) { 1 } else { 0 })?;
                }
            }
            Regex::Star(inner) => {
                inner.fmt_prec(f, 2)?;
                f.write_str("*")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

struct RegexParser {
    chars: Vec<char>,
    pos: usize,
}

impl RegexParser {
    fn error(&self, message: &str) -> LanguageError {
        LanguageError::Syntax {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn alternation(&mut self) -> Result<Regex, LanguageError> {
        let mut items = vec![self.concatenation()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            items.push(self.concatenation()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Regex::Alt(
                items
                    .into_iter()
                    .flat_map(|r| match r {
                        Regex::Alt(inner) => inner,
                        other => vec![other],
                    })
                    .collect(),
            )
        })
    }

    fn concatenation(&mut self) -> Result<Regex, LanguageError> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            match self.postfix()? {
                Regex::Concat(inner) => items.extend(inner),
                other => items.push(other),
            }
        }
        Ok(match items.len() {
            0 => Regex::Epsilon,
            1 => items.pop().unwrap(),
            _ => Regex::Concat(items),
        })
    }

    fn postfix(&mut self) -> Result<Regex, LanguageError> {
        let mut re = self.atom()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            re = Regex::Star(Box::new(re));
        }
        Ok(re)
    }

    fn atom(&mut self) -> Result<Regex, LanguageError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.alternation()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('~') => {
                self.pos += 1;
                Ok(Regex::Epsilon)
            }
            Some(c) if c.is_alphanumeric() || c == '_' => {
                self.pos += 1;
                Ok(Regex::Lit(c))
            }
            Some('*') => Err(self.error("`*` without operand")),
            Some(c) => Err(self.error(&format!("unexpected character `{c}`"))),
            None => Err(self.error("unexpected end of pattern")),
        }
    }
}

/// A complete deterministic automaton over an ordered alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Vec<String>,
    initial: usize,
    accepting: Vec<bool>,
    /// `delta[state][symbol index]`
    delta: Vec<Vec<usize>>,
}

impl Dfa {
    pub fn new(
        alphabet: Vec<String>,
        initial: usize,
        accepting: Vec<bool>,
        delta: Vec<Vec<usize>>,
    ) -> Option<Dfa> {
        let n = delta.len();
        let ok = initial < n
            && accepting.len() == n
            && delta
                .iter()
                .all(|row| row.len() == alphabet.len() && row.iter().all(|&t| t < n));
        ok.then_some(Dfa {
            alphabet,
            initial,
            accepting,
            delta,
        })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn next(&self, q: usize, symbol: usize) -> usize {
        self.delta[q][symbol]
    }

    /// Membership of a word given as symbol indices.
    pub fn accepts(&self, word: &[usize]) -> bool {
        self.accepting[word.iter().fold(self.initial, |q, &a| self.delta[q][a])]
    }

    /// Moore partition refinement followed by renumbering of the reachable
    /// part in breadth-first order.
    pub fn minimize(&self) -> Dfa {
        let reachable = self.reachable_order();
        let mut class: BTreeMap<usize, usize> = reachable
            .iter()
            .map(|&q| (q, usize::from(self.accepting[q])))
            .collect();
        loop {
            let mut ids: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
            let mut next = BTreeMap::new();
            for &q in &reachable {
                let signature = (
                    class[&q],
                    self.delta[q].iter().map(|t| class[t]).collect::<Vec<_>>(),
                );
                let fresh = ids.len();
                next.insert(q, *ids.entry(signature).or_insert(fresh));
            }
            let before = class.values().collect::<BTreeSet<_>>().len();
            let stable = ids.len() == before;
            class = next;
            if stable {
                break;
            }
        }
        // Quotient, then renumber by BFS from the initial class.
        let mut representative = BTreeMap::new();
        for &q in &reachable {
            representative.entry(class[&q]).or_insert(q);
        }
        let quotient = Dfa {
            alphabet: self.alphabet.clone(),
            initial: class[&self.initial],
            accepting: (0..representative.len())
                .map(|c| self.accepting[representative[&c]])
                .collect(),
            delta: (0..representative.len())
                .map(|c| {
                    self.delta[representative[&c]]
                        .iter()
                        .map(|t| class[t])
                        .collect()
                })
                .collect(),
        };
        quotient.renumbered()
    }

    fn reachable_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.delta.len()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut i = 0;
        while i < order.len() {
            for &t in &self.delta[order[i]] {
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
            i += 1;
        }
        order
    }

    fn renumbered(&self) -> Dfa {
        let order = self.reachable_order();
        let mut index = vec![usize::MAX; self.delta.len()];
        for (i, &q) in order.iter().enumerate() {
            index[q] = i;
        }
        Dfa {
            alphabet: self.alphabet.clone(),
            initial: 0,
            accepting: order.iter().map(|&q| self.accepting[q]).collect(),
            delta: order
                .iter()
                .map(|&q| self.delta[q].iter().map(|&t| index[t]).collect())
                .collect(),
        }
    }
}

/// Thompson NFA: `eps[q]` epsilon moves, `sym[q]` labelled moves.
struct Nfa {
    eps: Vec<Vec<usize>>,
    sym: Vec<Vec<(usize, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.sym.push(Vec::new());
        self.eps.len() - 1
    }

    /// Returns (entry, exit) of the fragment for `re`.
    fn build(&mut self, re: &Regex, symbol_of: &BTreeMap<char, usize>) -> (usize, usize) {
        match re {
            Regex::Epsilon => {
                let s = self.state();
                (s, s)
            }
            Regex::Lit(c) => {
                let (s, t) = (self.state(), self.state());
                self.sym[s].push((symbol_of[c], t));
                (s, t)
            }
            Regex::Concat(items) => {
                let s = self.state();
                let mut end = s;
                for item in items {
                    let (a, b) = self.build(item, symbol_of);
                    self.eps[end].push(a);
                    end = b;
                }
                (s, end)
            }
            Regex::Alt(items) => {
                let (s, t) = (self.state(), self.state());
                for item in items {
                    let (a, b) = self.build(item, symbol_of);
                    self.eps[s].push(a);
                    self.eps[b].push(t);
                }
                (s, t)
            }
            Regex::Star(inner) => {
                let (s, t) = (self.state(), self.state());
                let (a, b) = self.build(inner, symbol_of);
                self.eps[s].extend([a, t]);
                self.eps[b].extend([a, t]);
                (s, t)
            }
        }
    }

    fn closure(&self, set: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut out: BTreeSet<usize> = BTreeSet::new();
        let mut stack: Vec<usize> = set.into_iter().collect();
        while let Some(q) = stack.pop() {
            if out.insert(q) {
                stack.extend(&self.eps[q]);
            }
        }
        out
    }
}

/// Compiles `pattern` to the minimal complete DFA over `alphabet`.
///
/// Every literal of the pattern must be a one-character symbol of the
/// alphabet.
pub fn regex_to_dfa(pattern: &str, alphabet: &[String]) -> Result<Dfa, LanguageError> {
    compile(&Regex::parse(pattern)?, alphabet)
}

pub fn compile(re: &Regex, alphabet: &[String]) -> Result<Dfa, LanguageError> {
    let mut symbol_of = BTreeMap::new();
    for c in re.literals() {
        let idx = alphabet
            .iter()
            .position(|s| s.chars().eq(std::iter::once(c)))
            .ok_or(LanguageError::AlphabetMismatch(c))?;
        symbol_of.insert(c, idx);
    }
    let mut nfa = Nfa {
        eps: Vec::new(),
        sym: Vec::new(),
    };
    let (entry, exit) = nfa.build(re, &symbol_of);

    let start = nfa.closure([entry]);
    let mut ids: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start]);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut accepting = Vec::new();
    while let Some(set) = queue.pop_front() {
        accepting.push(set.contains(&exit));
        let mut row = Vec::with_capacity(alphabet.len());
        for a in 0..alphabet.len() {
            let moved = nfa.closure(
                set.iter()
                    .flat_map(|&q| nfa.sym[q].iter().filter(|(s, _)| *s == a).map(|&(_, t)| t)),
            );
            let fresh = ids.len();
            let id = *ids.entry(moved.clone()).or_insert_with(|| {
                queue.push_back(moved);
                fresh
            });
            row.push(id);
        }
        delta.push(row);
    }
    Ok(Dfa {
        alphabet: alphabet.to_vec(),
        initial: 0,
        accepting,
        delta,
    }
    .minimize())
}
