//! Formula syntax: boolean connectives, the three `∇` modalities (step,
//! multi-step, orbit), and the derived temporal operators that desugar
//! into them.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::language::Regex;
use crate::time::TimeValue;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Top,
    Bot,
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// `∇` of the unit-step coalgebra.
    NablaStep(Box<Formula>),
    /// `∇` of the multi-step coalgebra over the keys; absent keys are `⊤`.
    NablaMulti(BTreeMap<TimeValue, Formula>),
    /// Finitary `∇` of the orbit coalgebra (Egli–Milner over the orbit).
    NablaOrbit(BTreeSet<Formula>),
    Next(Box<Formula>),
    NextVia(TimeValue, Box<Formula>),
    Prev(Box<Formula>),
    Always(Box<Formula>),
    Eventually(Box<Formula>),
    /// Even trajectory positions satisfy the first argument, odd ones the
    /// second.
    Zip(Box<Formula>, Box<Formula>),
    /// Words in the language lead to the first argument, all others to the
    /// second.
    Eat(Regex, Box<Formula>, Box<Formula>),
    /// Positions before the threshold, at it, and after it.
    Chg(u64, Box<Formula>, Box<Formula>, Box<Formula>),
    MinDur(u64, Box<Formula>),
    MinDurIncl(u64, Box<Formula>),
    MaxDur(u64, Box<Formula>),
    MaxDurExcl(u64, Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
}

fn b(f: Formula) -> Box<Formula> {
    Box::new(f)
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn negate(self) -> Formula {
        Formula::Not(b(self))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(b(self), b(other))
    }

    pub fn next(self) -> Formula {
        Formula::Next(b(self))
    }

    pub fn always(self) -> Formula {
        Formula::Always(b(self))
    }

    pub fn eventually(self) -> Formula {
        Formula::Eventually(b(self))
    }

    pub fn nabla_orbit<I: IntoIterator<Item = Formula>>(args: I) -> Formula {
        Formula::NablaOrbit(args.into_iter().collect())
    }

    pub fn zip(self, odd: Formula) -> Formula {
        Formula::Zip(b(self), b(odd))
    }

    pub fn until(self, goal: Formula) -> Formula {
        Formula::Until(b(self), b(goal))
    }

    pub fn chg(t: u64, before: Formula, at: Formula, after: Formula) -> Formula {
        Formula::Chg(t, b(before), b(at), b(after))
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            Atom(_) | Top | Bot => vec![],
            Not(f) | NablaStep(f) | Next(f) | NextVia(_, f) | Prev(f) | Always(f)
            | Eventually(f) | MinDur(_, f) | MinDurIncl(_, f) | MaxDur(_, f)
            | MaxDurExcl(_, f) => vec![f],
            Implies(f, g) | Zip(f, g) | Eat(_, f, g) | Until(f, g) => vec![f, g],
            Chg(_, f, g, h) => vec![f, g, h],
            And(fs) | Or(fs) => fs.iter().collect(),
            NablaMulti(map) => map.values().collect(),
            NablaOrbit(set) => set.iter().collect(),
        }
    }

    /// True for the operators that quantify over whole trajectories.
    pub fn is_trajectory_operator(&self) -> bool {
        use Formula::*;
        matches!(
            self,
            Zip(..)
                | Eat(..)
                | Chg(..)
                | MinDur(..)
                | MinDurIncl(..)
                | MaxDur(..)
                | MaxDurExcl(..)
                | Until(..)
        )
    }

    /// Nesting depth of modal and trajectory operators.
    pub fn modal_depth(&self) -> usize {
        let inner = self
            .children()
            .into_iter()
            .map(Formula::modal_depth)
            .max()
            .unwrap_or(0);
        use Formula::*;
        match self {
            Atom(_) | Top | Bot | Not(_) | Implies(..) | And(_) | Or(_) => inner,
            _ => inner + 1,
        }
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        for f in self.subformulas() {
            if let Formula::Atom(a) = f {
                out.insert(a.as_str());
            }
        }
        out
    }

    /// Rewrites every derived operator into the core `∇` forms.
    pub fn desugar(&self) -> Formula {
        use Formula::*;
        let d = |f: &Formula| f.desugar();
        match self {
            Atom(_) | Top | Bot => self.clone(),
            Not(f) => Not(b(d(f))),
            Implies(f, g) => Implies(b(d(f)), b(d(g))),
            And(fs) => And(fs.iter().map(d).collect()),
            Or(fs) => Or(fs.iter().map(d).collect()),
            NablaStep(f) | Next(f) => NablaStep(b(d(f))),
            NablaMulti(map) => NablaMulti(map.iter().map(|(t, f)| (t.clone(), d(f))).collect()),
            NablaOrbit(set) => NablaOrbit(set.iter().map(d).collect()),
            NextVia(t, f) => NablaMulti(BTreeMap::from([(t.clone(), d(f))])),
            Prev(f) => NablaMulti(BTreeMap::from([(TimeValue::Num(-1), d(f))])),
            Always(f) => Or(vec![
                NablaOrbit(BTreeSet::from([d(f)])),
                NablaOrbit(BTreeSet::new()),
            ]),
            Eventually(f) => NablaOrbit(BTreeSet::from([d(f), Top])),
            Zip(f, g) => Zip(b(d(f)), b(d(g))),
            Eat(re, f, g) => Eat(re.clone(), b(d(f)), b(d(g))),
            Chg(t, f, g, h) => Chg(*t, b(d(f)), b(d(g)), b(d(h))),
            MinDur(t, f) => Formula::chg(*t, d(f), Top, Top),
            MinDurIncl(t, f) => Formula::chg(*t, d(f), d(f), Top),
            MaxDur(t, f) => Formula::chg(*t, Top, Top, d(f).negate()),
            MaxDurExcl(t, f) => Formula::chg(*t, Top, d(f).negate(), d(f).negate()),
            Until(f, g) => Until(b(d(f)), b(d(g))),
        }
    }

    /// Post-order listing of distinct subformulas, children first.
    pub fn subformulas(&self) -> Vec<&Formula> {
        fn walk<'a>(f: &'a Formula, seen: &mut HashSet<&'a Formula>, out: &mut Vec<&'a Formula>) {
            if seen.contains(f) {
                return;
            }
            for c in f.children() {
                walk(c, seen, out);
            }
            if seen.insert(f) {
                out.push(f);
            }
        }
        let mut out = Vec::new();
        walk(self, &mut HashSet::new(), &mut out);
        out
    }

    fn precedence(&self) -> u8 {
        use Formula::*;
        match self {
            Implies(..) => 0,
            Or(fs) if fs.len() >= 2 => 1,
            And(fs) if fs.len() >= 2 => 2,
            Or(fs) | And(fs) if fs.len() == 1 => fs[0].precedence(),
            Not(_) | Next(_) | NextVia(..) | Prev(_) | Always(_) | Eventually(_) => 3,
            _ => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        use Formula::*;
        match self {
            Atom(a) => f.write_str(a),
            Top => f.write_str("true"),
            Bot => f.write_str("false"),
            Implies(l, r) => {
                l.fmt_at(f, 1)?;
                f.write_str(" -> ")?;
                r.fmt_at(f, 0)
            }
            And(fs) | Or(fs) if fs.is_empty() => {
                f.write_str(if matches!(self, And(_)) { "true" } else { "false" })
            }
            And(fs) | Or(fs) if fs.len() == 1 => fs[0].fmt_at(f, min),
            And(fs) | Or(fs) => {
                let (sep, level) = if matches!(self, And(_)) {
                    (" & ", 3)
                } else {
                    (" | ", 2)
                };
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    g.fmt_at(f, level)?;
                }
                Ok(())
            }
            Not(g) => {
                f.write_str("~")?;
                g.fmt_at(f, 3)
            }
            Next(g) => prefix(f, "X ", g),
            NextVia(t, g) => prefix(f, &format!("X[{t}] "), g),
            Prev(g) => prefix(f, "Y ", g),
            Always(g) => prefix(f, "G ", g),
            Eventually(g) => prefix(f, "F ", g),
            NablaStep(g) => write!(f, "nablas({g})"),
            NablaMulti(map) => {
                f.write_str("nablam{")?;
                for (i, (t, g)) in map.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}: {g}")?;
                }
                f.write_str("}")
            }
            NablaOrbit(set) => {
                f.write_str("nabla{")?;
                for (i, g) in set.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{g}")?;
                }
                f.write_str("}")
            }
            Zip(g, h) => write!(f, "zip({g}; {h})"),
            Eat(re, g, h) => write!(f, "eat(/{re}/; {g}; {h})"),
            Chg(t, g, h, k) => write!(f, "chg({t}; {g}; {h}; {k})"),
            MinDur(t, g) => write!(f, "mind({t}; {g})"),
            MinDurIncl(t, g) => write!(f, "mind'({t}; {g})"),
            MaxDur(t, g) => write!(f, "maxd({t}; {g})"),
            MaxDurExcl(t, g) => write!(f, "maxd'({t}; {g})"),
            Until(g, h) => write!(f, "U({g}; {h})"),
        }
    }
}

fn prefix(f: &mut fmt::Formatter<'_>, op: &str, arg: &Formula) -> fmt::Result {
    f.write_str(op)?;
    arg.fmt_at(f, 3)
}

impl fmt::Display for Formula {
    /// Prints in the concrete formula grammar accepted by
    /// [`crate::syntax::parse_formula`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
