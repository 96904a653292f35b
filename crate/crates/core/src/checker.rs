//! Satisfaction of formulas over a labelled dynamical system.
//!
//! Evaluation is bottom-up over the subformulas of the desugared formula.
//! Trajectory operators are decided on the finite lasso of each state (for
//! ℕ and ℤ time) or on the product with a regular language (for word time).

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::formula::Formula;
use crate::language::{compile, Dfa, LanguageError};
use crate::system::{DynSystem, Lasso, State, StateSet, SystemError};
use crate::time::{TimeError, TimeMonoid};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("operator `{operator}` is not available for {time} time")]
    TimeMismatch { operator: &'static str, time: String },
    #[error("automaton alphabet does not match the system's word alphabet")]
    AlphabetMismatch,
    #[error(transparent)]
    Time(#[from] TimeError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Language(#[from] LanguageError),
}

/// Satisfying set of a formula together with the sets of all its
/// (desugared) subformulas.
#[derive(Debug, Clone)]
pub struct SatResult {
    pub formula: Formula,
    pub states: StateSet,
    pub memo: HashMap<Formula, StateSet>,
}

fn require(
    sys: &DynSystem,
    operator: &'static str,
    allowed: fn(&TimeMonoid) -> bool,
) -> Result<(), CheckError> {
    if allowed(sys.time()) {
        Ok(())
    } else {
        Err(CheckError::TimeMismatch {
            operator,
            time: sys.time().to_string(),
        })
    }
}

fn discrete(t: &TimeMonoid) -> bool {
    matches!(t, TimeMonoid::Nat | TimeMonoid::Int)
}

fn naturals(t: &TimeMonoid) -> bool {
    *t == TimeMonoid::Nat
}

fn words(t: &TimeMonoid) -> bool {
    matches!(t, TimeMonoid::Word(_))
}

fn lassos(sys: &DynSystem) -> Result<Vec<Lasso>, CheckError> {
    (0..sys.len())
        .map(|s| sys.trajectory_lasso(s).map_err(CheckError::from))
        .collect()
}

fn lcm2(n: usize) -> usize {
    if n.is_multiple_of(2) {
        n
    } else {
        2 * n
    }
}

/// Evaluates `f` and keeps every intermediate satisfying set.
pub fn check(sys: &DynSystem, f: &Formula) -> Result<SatResult, CheckError> {
    let core = f.desugar();
    let mut memo: HashMap<Formula, StateSet> = HashMap::new();
    let all = sys.all_states();
    let mut orbits: Option<Vec<StateSet>> = None;
    for sub in core.subformulas() {
        let get = |g: &Formula| -> &StateSet { &memo[g] };
        use Formula::*;
        let sat: StateSet = match sub {
            Atom(a) => sys
                .label(a)
                .cloned()
                .ok_or_else(|| CheckError::UnknownAtom(a.clone()))?,
            Top => all.clone(),
            Bot => StateSet::new(),
            Not(g) => all.difference(get(g)).copied().collect(),
            Implies(g, h) => {
                let (g, h) = (get(g), get(h));
                all.iter()
                    .copied()
                    .filter(|s| !g.contains(s) || h.contains(s))
                    .collect()
            }
            And(gs) => all
                .iter()
                .copied()
                .filter(|s| gs.iter().all(|g| get(g).contains(s)))
                .collect(),
            Or(gs) => all
                .iter()
                .copied()
                .filter(|s| gs.iter().any(|g| get(g).contains(s)))
                .collect(),
            NablaStep(g) => {
                require(sys, "next", discrete)?;
                let table = sys.step_table(0);
                let target = get(g);
                all.iter()
                    .copied()
                    .filter(|&s| target.contains(&table[s]))
                    .collect()
            }
            NablaMulti(map) => {
                let mut sat = all.clone();
                for (t, g) in map {
                    let t = sys.time().normalize(t)?;
                    let target = get(g);
                    let mut keep = StateSet::new();
                    for &s in &sat {
                        if target.contains(&sys.apply(s, &t)?) {
                            keep.insert(s);
                        }
                    }
                    sat = keep;
                }
                sat
            }
            NablaOrbit(args) => {
                let orbits =
                    orbits.get_or_insert_with(|| (0..sys.len()).map(|s| sys.orbit(s)).collect());
                let sets: Vec<&StateSet> = args.iter().map(get).collect();
                all.iter()
                    .copied()
                    .filter(|&s| egli_milner_sat(&orbits[s], &sets))
                    .collect()
            }
            Zip(g, h) => eval_zip(sys, get(g), get(h))?,
            Eat(re, g, h) => {
                require(sys, "eat", words)?;
                let alphabet = sys.time().alphabet().unwrap_or_default();
                let dfa = compile(re, &alphabet)?;
                eval_eat(sys, &dfa, get(g), get(h))?
            }
            Chg(t, g, h, k) => eval_chg(sys, *t, get(g), get(h), get(k))?,
            Until(g, h) => eval_until(sys, get(g), get(h))?,
            Next(_) | NextVia(..) | Prev(_) | Always(_) | Eventually(_) | MinDur(..)
            | MinDurIncl(..) | MaxDur(..) | MaxDurExcl(..) => {
                unreachable!("removed by desugaring")
            }
        };
        memo.insert(sub.clone(), sat);
    }
    let states = memo[&core].clone();
    Ok(SatResult {
        formula: f.clone(),
        states,
        memo,
    })
}

/// Egli–Milner: every orbit element satisfies some argument, and every
/// argument is satisfied somewhere in the orbit.
fn egli_milner_sat(orbit: &StateSet, args: &[&StateSet]) -> bool {
    orbit.iter().all(|y| args.iter().any(|a| a.contains(y)))
        && args.iter().all(|a| orbit.iter().any(|y| a.contains(y)))
}

pub fn eval(sys: &DynSystem, f: &Formula) -> Result<StateSet, CheckError> {
    Ok(check(sys, f)?.states)
}

/// `f` holds at every state.
pub fn valid(sys: &DynSystem, f: &Formula) -> Result<bool, CheckError> {
    Ok(eval(sys, f)?.len() == sys.len())
}

/// States whose trajectory satisfies `even` at even and `odd` at odd
/// positions. For ℤ time all integer positions count; since the step is a
/// bijection the trajectory is a pure cycle and the residues modulo
/// `lcm(|cycle|, 2)` cover them.
pub fn eval_zip(sys: &DynSystem, even: &StateSet, odd: &StateSet) -> Result<StateSet, CheckError> {
    require(sys, "zip", discrete)?;
    let mut out = StateSet::new();
    for (s, lasso) in lassos(sys)?.iter().enumerate() {
        let horizon = lasso.prefix.len() + lcm2(lasso.cycle.len());
        let ok = (0..horizon as u64).all(|t| {
            let want = if t % 2 == 0 { even } else { odd };
            want.contains(&lasso.at(t))
        });
        if ok {
            out.insert(s);
        }
    }
    Ok(out)
}

/// States `s` such that every word `w` leads to `accept` when `w` is in the
/// language of `dfa` and to `reject` otherwise. Decided by exploring the
/// product of the step tables with `dfa` from `(s, initial)`.
pub fn eval_eat(
    sys: &DynSystem,
    dfa: &Dfa,
    accept: &StateSet,
    reject: &StateSet,
) -> Result<StateSet, CheckError> {
    require(sys, "eat", words)?;
    let alphabet = sys.time().alphabet().unwrap_or_default();
    if dfa.alphabet() != alphabet.as_slice() {
        return Err(CheckError::AlphabetMismatch);
    }
    let mut out = StateSet::new();
    for s in 0..sys.len() {
        let mut seen: BTreeSet<(State, usize)> = BTreeSet::from([(s, dfa.initial())]);
        let mut queue = VecDeque::from([(s, dfa.initial())]);
        let mut ok = true;
        while let Some((q, d)) = queue.pop_front() {
            let want = if dfa.is_accepting(d) { accept } else { reject };
            if !want.contains(&q) {
                ok = false;
                break;
            }
            for a in 0..alphabet.len() {
                let next = (sys.step_table(a)[q], dfa.next(d, a));
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        if ok {
            out.insert(s);
        }
    }
    Ok(out)
}

/// `chg(t, before, at, after)`: positions below `t` satisfy `before`,
/// position `t` satisfies `at`, all later positions satisfy `after`.
pub fn eval_chg(
    sys: &DynSystem,
    t: u64,
    before: &StateSet,
    at: &StateSet,
    after: &StateSet,
) -> Result<StateSet, CheckError> {
    require(sys, "chg", naturals)?;
    let mut out = StateSet::new();
    for (s, lasso) in lassos(sys)?.iter().enumerate() {
        let len = lasso.len() as u64;
        let p = lasso.prefix.len() as u64;
        // Positions at and after `t` only depend on `t` modulo the cycle.
        let shifted = if t >= p {
            p + (t - p) % lasso.cycle.len() as u64
        } else {
            t
        };
        let ok = (0..t.min(len)).all(|u| before.contains(&lasso.at(u)))
            && at.contains(&lasso.at(shifted))
            && (shifted + 1..=shifted + len).all(|u| after.contains(&lasso.at(u)));
        if ok {
            out.insert(s);
        }
    }
    Ok(out)
}

/// `hold U goal`: some position satisfies `goal` and all earlier ones
/// satisfy `hold`. A witness, if any, lies within the first lasso period.
pub fn eval_until(sys: &DynSystem, hold: &StateSet, goal: &StateSet) -> Result<StateSet, CheckError> {
    require(sys, "until", naturals)?;
    let mut out = StateSet::new();
    for (s, lasso) in lassos(sys)?.iter().enumerate() {
        for t in 0..lasso.len() as u64 {
            let x = lasso.at(t);
            if goal.contains(&x) {
                out.insert(s);
                break;
            }
            if !hold.contains(&x) {
                break;
            }
        }
    }
    Ok(out)
}
