//! Finite dynamical systems presented by generating steps.
//!
//! The dynamics `Φ : S × T → S` is never tabulated over `T`; it is the
//! homomorphic extension of one step table per generator of the time
//! monoid, so `apply` folds the generator decomposition of `t`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::time::{TimeError, TimeMonoid, TimeValue};

/// Index of a state in declaration order.
pub type State = usize;
pub type StateSet = BTreeSet<State>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("state space is empty")]
    NoStates,
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("expected {expected} step tables for {monoid} time, found {found}")]
    StepCount {
        monoid: String,
        expected: usize,
        found: usize,
    },
    #[error("step table for generator `{generator}` is not total over {states} states")]
    PartialStep { generator: String, states: usize },
    #[error("step 1 of an int-time system is not a bijection (`{0}` has two preimages)")]
    NonBijectiveStep(String),
    #[error("label `{atom}` refers to state index {state} outside the state space")]
    LabelOutOfRange { atom: String, state: State },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("{0} time has no single successor step")]
    NoLinearStep(String),
    #[error(transparent)]
    Time(#[from] TimeError),
}

/// A right monoid action of a discrete time monoid on a finite state set,
/// with a labelling of states by atomic propositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynSystem {
    time: TimeMonoid,
    states: Vec<String>,
    /// One table per generator, indexed as in [`TimeMonoid::generators`].
    steps: Vec<Vec<State>>,
    labels: BTreeMap<String, StateSet>,
}

/// Eventually periodic trajectory: `prefix` followed by `cycle` repeated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lasso {
    pub prefix: Vec<State>,
    pub cycle: Vec<State>,
}

impl Lasso {
    /// State at non-negative position `t`.
    pub fn at(&self, t: u64) -> State {
        let p = self.prefix.len() as u64;
        if t < p {
            self.prefix[t as usize]
        } else {
            self.cycle[((t - p) % self.cycle.len() as u64) as usize]
        }
    }

    /// Number of distinct positions before the trajectory repeats.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// One failure of the action laws found by [`DynSystem::validate_action`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionViolation {
    pub state: State,
    pub first: TimeValue,
    pub second: TimeValue,
    /// `apply(apply(state, first), second)`
    pub stepwise: State,
    /// `apply(state, first + second)`
    pub combined: State,
}

impl DynSystem {
    /// Builds a validated system.
    ///
    /// For `Int` time only the table of step `1` is given; it must be a
    /// bijection and step `-1` is computed as its inverse. For every other
    /// time monoid one table per generator is expected.
    pub fn new(
        time: TimeMonoid,
        states: Vec<String>,
        steps: Vec<Vec<State>>,
        labels: BTreeMap<String, StateSet>,
    ) -> Result<Self, SystemError> {
        let steps = if time == TimeMonoid::Int {
            if steps.len() != 1 {
                return Err(SystemError::StepCount {
                    monoid: time.to_string(),
                    expected: 1,
                    found: steps.len(),
                });
            }
            let forward = steps.into_iter().next().unwrap_or_default();
            check_total(&forward, states.len(), "1")?;
            let mut inverse = vec![usize::MAX; states.len()];
            for (s, &t) in forward.iter().enumerate() {
                if inverse[t] != usize::MAX {
                    return Err(SystemError::NonBijectiveStep(states[t].clone()));
                }
                inverse[t] = s;
            }
            vec![forward, inverse]
        } else {
            steps
        };
        Self::from_tables(time, states, steps, labels)
    }

    /// Builds a system from one table per generator (including `-1` for
    /// `Int`) checking only totality. Use [`DynSystem::validate_action`] to
    /// detect tables that do not define a monoid action.
    pub fn from_tables(
        time: TimeMonoid,
        states: Vec<String>,
        steps: Vec<Vec<State>>,
        labels: BTreeMap<String, StateSet>,
    ) -> Result<Self, SystemError> {
        if states.is_empty() {
            return Err(SystemError::NoStates);
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s) {
                return Err(SystemError::DuplicateState(s.clone()));
            }
        }
        let generators = time.generators();
        if steps.len() != generators.len() {
            return Err(SystemError::StepCount {
                monoid: time.to_string(),
                expected: generators.len(),
                found: steps.len(),
            });
        }
        for (table, generator) in steps.iter().zip(&generators) {
            check_total(table, states.len(), &generator.to_string())?;
        }
        for (atom, set) in &labels {
            if let Some(&bad) = set.iter().find(|&&s| s >= states.len()) {
                return Err(SystemError::LabelOutOfRange {
                    atom: atom.clone(),
                    state: bad,
                });
            }
        }
        Ok(DynSystem {
            time,
            states,
            steps,
            labels,
        })
    }

    pub fn time(&self) -> &TimeMonoid {
        &self.time
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn all_states(&self) -> StateSet {
        (0..self.len()).collect()
    }

    pub fn state_name(&self, s: State) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Result<State, SystemError> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| SystemError::UnknownState(name.to_string()))
    }

    pub fn steps(&self) -> &[Vec<State>] {
        &self.steps
    }

    pub fn step_table(&self, generator: usize) -> &[State] {
        &self.steps[generator]
    }

    pub fn labels(&self) -> &BTreeMap<String, StateSet> {
        &self.labels
    }

    pub fn label(&self, atom: &str) -> Option<&StateSet> {
        self.labels.get(atom)
    }

    /// Atoms true at `s`.
    pub fn atoms_at(&self, s: State) -> BTreeSet<&str> {
        self.labels
            .iter()
            .filter(|(_, set)| set.contains(&s))
            .map(|(a, _)| a.as_str())
            .collect()
    }

    pub fn with_labels(mut self, labels: BTreeMap<String, StateSet>) -> Result<Self, SystemError> {
        self.labels = labels;
        Self::from_tables(self.time, self.states, self.steps, self.labels)
    }

    /// `Φ(s, t)`.
    pub fn apply(&self, s: State, t: &TimeValue) -> Result<State, SystemError> {
        if let TimeValue::Num(n) = self.time.normalize(t)? {
            if matches!(self.time, TimeMonoid::Nat | TimeMonoid::Int) {
                let table = &self.steps[usize::from(n < 0)];
                return Ok(power(table, s, n.unsigned_abs()));
            }
        }
        let gens = self.time.decompose(t)?;
        Ok(gens.iter().fold(s, |s, &g| self.steps[g][s]))
    }

    /// Checks the unit law and the composition law for all states and all
    /// pairs of elements of generator-length at most `bound`.
    pub fn validate_action(&self, bound: usize) -> Vec<ActionViolation> {
        let elems = self.time.elements_up_to(bound);
        let zero = self.time.identity();
        let mut out = Vec::new();
        for s in 0..self.len() {
            let unit = self.apply(s, &zero).expect("identity is valid");
            if unit != s {
                out.push(ActionViolation {
                    state: s,
                    first: zero.clone(),
                    second: zero.clone(),
                    stepwise: unit,
                    combined: s,
                });
            }
            for t in &elems {
                let after_t = self.apply(s, t).expect("enumerated value");
                for u in &elems {
                    let stepwise = self.apply(after_t, u).expect("enumerated value");
                    let sum = self.time.add(t, u).expect("enumerated value");
                    let combined = self.apply(s, &sum).expect("enumerated value");
                    if stepwise != combined {
                        out.push(ActionViolation {
                            state: s,
                            first: t.clone(),
                            second: u.clone(),
                            stepwise,
                            combined,
                        });
                    }
                }
            }
        }
        out
    }

    /// The trajectory of `s` under step `1` as a lasso. Only defined for
    /// `Nat` and `Int` time.
    pub fn trajectory_lasso(&self, s: State) -> Result<Lasso, SystemError> {
        if !matches!(self.time, TimeMonoid::Nat | TimeMonoid::Int) {
            return Err(SystemError::NoLinearStep(self.time.to_string()));
        }
        Ok(lasso(&self.steps[0], s))
    }

    /// All states reachable from `s`: forward closure under every step.
    pub fn orbit(&self, s: State) -> StateSet {
        let mut seen = StateSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for table in &self.steps {
                if seen.insert(table[x]) {
                    queue.push_back(table[x]);
                }
            }
        }
        seen
    }
}

fn check_total(table: &[State], n: usize, generator: &str) -> Result<(), SystemError> {
    if table.len() != n || table.iter().any(|&t| t >= n) {
        return Err(SystemError::PartialStep {
            generator: generator.to_string(),
            states: n,
        });
    }
    Ok(())
}

fn lasso(table: &[State], s: State) -> Lasso {
    let mut first_seen = vec![usize::MAX; table.len()];
    let mut walk = Vec::new();
    let mut x = s;
    while first_seen[x] == usize::MAX {
        first_seen[x] = walk.len();
        walk.push(x);
        x = table[x];
    }
    let cycle = walk.split_off(first_seen[x]);
    Lasso {
        prefix: walk,
        cycle,
    }
}

/// `k`-fold application of one step table.
fn power(table: &[State], s: State, k: u64) -> State {
    if k <= table.len() as u64 {
        (0..k).fold(s, |x, _| table[x])
    } else {
        lasso(table, s).at(k)
    }
}
