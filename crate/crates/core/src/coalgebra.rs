//! Coalgebraic views of a dynamical system and bisimilarity.
//!
//! A view pairs a transition structure on the state space (one step, a
//! finite family of steps, or the orbit) with the labelling coalgebra.
//! Bisimilarity is the coarsest partition that respects labels and whose
//! induced relation lifts through the view's functor.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::formula::Formula;
use crate::system::{DynSystem, State, StateSet, SystemError};
use crate::time::{TimeMonoid, TimeValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoalgebraError {
    #[error("lifting arguments have mismatched shapes")]
    ShapeMismatch,
    #[error("states `{0}` and `{1}` are bisimilar")]
    Bisimilar(String, String),
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViewKind {
    /// Identity functor: `s ↦ Φ(s, t)`.
    Step(TimeValue),
    /// Hom functor over a finite index set: `s ↦ (u ↦ Φ(s, u))`.
    MultiStep(Vec<TimeValue>),
    /// Powerset functor: `s ↦ orbit(s)`.
    Orbit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViewTable {
    Step(Vec<State>),
    MultiStep(Vec<Vec<State>>),
    Orbit(Vec<StateSet>),
}

/// One coalgebra structure on the states of a system, composed in parallel
/// with its labelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalgView {
    kind: ViewKind,
    table: ViewTable,
    labels: Vec<BTreeSet<String>>,
}

/// An element of `F(S)` for one of the functors in use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    State(State),
    Indexed(Vec<State>),
    Set(StateSet),
    Atoms(BTreeSet<String>),
}

pub type Relation = BTreeSet<(State, State)>;

/// Identity functor lifting: the relation itself.
pub fn lift_identity<X, Y>(rel: impl Fn(&X, &Y) -> bool, x: &X, y: &Y) -> bool {
    rel(x, y)
}

/// Constant functor lifting: equality.
pub fn lift_constant<C: PartialEq>(x: &C, y: &C) -> bool {
    x == y
}

/// Hom functor lifting: pointwise relatedness on a common index set.
pub fn lift_hom<K: Ord, X, Y>(
    rel: impl Fn(&X, &Y) -> bool,
    x: &BTreeMap<K, X>,
    y: &BTreeMap<K, Y>,
) -> Result<bool, CoalgebraError> {
    if x.len() != y.len() || !x.keys().eq(y.keys()) {
        return Err(CoalgebraError::ShapeMismatch);
    }
    Ok(x.values().zip(y.values()).all(|(a, b)| rel(a, b)))
}

/// Powerset lifting (Egli–Milner): every element on each side is related
/// to some element on the other.
pub fn lift_powerset<X, Y>(rel: impl Fn(&X, &Y) -> bool, xs: &[X], ys: &[Y]) -> bool {
    xs.iter().all(|x| ys.iter().any(|y| rel(x, y)))
        && ys.iter().all(|y| xs.iter().any(|x| rel(x, y)))
}

/// Lifts a relation on states to the functor determined by the shapes.
pub fn lift_check(relation: &Relation, lhs: &Shape, rhs: &Shape) -> Result<bool, CoalgebraError> {
    let rel = |a: &State, b: &State| relation.contains(&(*a, *b));
    match (lhs, rhs) {
        (Shape::State(a), Shape::State(b)) => Ok(lift_identity(rel, a, b)),
        (Shape::Indexed(a), Shape::Indexed(b)) => {
            let index = |v: &Vec<State>| v.iter().copied().enumerate().collect::<BTreeMap<_, _>>();
            lift_hom(rel, &index(a), &index(b))
        }
        (Shape::Set(a), Shape::Set(b)) => {
            let (a, b): (Vec<_>, Vec<_>) = (a.iter().copied().collect(), b.iter().copied().collect());
            Ok(lift_powerset(rel, &a, &b))
        }
        (Shape::Atoms(a), Shape::Atoms(b)) => Ok(lift_constant(a, b)),
        _ => Err(CoalgebraError::ShapeMismatch),
    }
}

impl CoalgView {
    pub fn build(sys: &DynSystem, kind: ViewKind) -> Result<CoalgView, CoalgebraError> {
        let states = 0..sys.len();
        let table = match &kind {
            ViewKind::Step(t) => ViewTable::Step(
                states
                    .map(|s| sys.apply(s, t))
                    .collect::<Result<_, _>>()?,
            ),
            ViewKind::MultiStep(us) => ViewTable::MultiStep(
                states
                    .map(|s| us.iter().map(|u| sys.apply(s, u)).collect())
                    .collect::<Result<_, _>>()?,
            ),
            ViewKind::Orbit => ViewTable::Orbit(states.map(|s| sys.orbit(s)).collect()),
        };
        let labels = (0..sys.len())
            .map(|s| sys.atoms_at(s).into_iter().map(str::to_string).collect())
            .collect();
        Ok(CoalgView {
            kind,
            table,
            labels,
        })
    }

    /// Step view along the unit step (ℕ, ℤ) or the first generator.
    pub fn default_step(time: &TimeMonoid) -> ViewKind {
        ViewKind::Step(
            time.generators()
                .into_iter()
                .next()
                .unwrap_or_else(|| time.identity()),
        )
    }

    /// Multi-step view over the generating set.
    pub fn generator_steps(time: &TimeMonoid) -> ViewKind {
        ViewKind::MultiStep(time.generators())
    }

    pub fn kind(&self) -> &ViewKind {
        &self.kind
    }

    pub fn table(&self) -> &ViewTable {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels_at(&self, s: State) -> &BTreeSet<String> {
        &self.labels[s]
    }

    /// The structure map applied to `s`.
    pub fn successor_shape(&self, s: State) -> Shape {
        match &self.table {
            ViewTable::Step(t) => Shape::State(t[s]),
            ViewTable::MultiStep(t) => Shape::Indexed(t[s].clone()),
            ViewTable::Orbit(t) => Shape::Set(t[s].clone()),
        }
    }

    /// Block-level signature of `s` relative to `class`.
    fn signature(&self, s: State, class: &[usize]) -> Vec<usize> {
        match &self.table {
            ViewTable::Step(t) => vec![class[t[s]]],
            ViewTable::MultiStep(t) => t[s].iter().map(|&x| class[x]).collect(),
            ViewTable::Orbit(t) => t[s]
                .iter()
                .map(|&x| class[x])
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        }
    }

    /// All refinement rounds, from the label partition to the fixpoint.
    pub fn refinement_rounds(&self) -> Vec<Partition> {
        let n = self.len();
        let mut rounds = vec![Partition::from_keys((0..n).map(|s| &self.labels[s]))];
        loop {
            let prev = rounds.last().expect("nonempty");
            let next = Partition::from_keys(
                (0..n).map(|s| (prev.class[s], self.signature(s, &prev.class))),
            );
            if next.blocks.len() == prev.blocks.len() {
                return rounds;
            }
            rounds.push(next);
        }
    }

    pub fn bisimilarity(&self) -> Partition {
        self.refinement_rounds().pop().expect("nonempty")
    }

    /// A formula satisfied by `x` and not by `y`.
    pub fn distinguishing_formula(
        &self,
        sys: &DynSystem,
        x: State,
        y: State,
    ) -> Result<Formula, CoalgebraError> {
        let rounds = self.refinement_rounds();
        if rounds.last().expect("nonempty").same_block(x, y) {
            return Err(CoalgebraError::Bisimilar(
                sys.state_name(x).into(),
                sys.state_name(y).into(),
            ));
        }
        Ok(self.separate(sys, &rounds, x, y))
    }

    fn separate(&self, sys: &DynSystem, rounds: &[Partition], x: State, y: State) -> Formula {
        let k = rounds
            .iter()
            .position(|p| !p.same_block(x, y))
            .expect("states are separated");
        if k == 0 {
            let (lx, ly) = (&self.labels[x], &self.labels[y]);
            if let Some(a) = lx.difference(ly).next() {
                return Formula::Atom(a.clone());
            }
            let a = ly.difference(lx).next().expect("labels differ");
            return Formula::Atom(a.clone()).negate();
        }
        match (&self.table, &self.kind) {
            (ViewTable::Step(t), ViewKind::Step(via)) => {
                let inner = self.separate(sys, rounds, t[x], t[y]);
                next_via(sys.time(), via, inner)
            }
            (ViewTable::MultiStep(t), ViewKind::MultiStep(us)) => {
                let i = (0..us.len())
                    .find(|&i| !rounds[k - 1].same_block(t[x][i], t[y][i]))
                    .expect("some index separates");
                let inner = self.separate(sys, rounds, t[x][i], t[y][i]);
                next_via(sys.time(), &us[i], inner)
            }
            (ViewTable::Orbit(t), _) => {
                let prev = &rounds[k - 1];
                let blocks = |s: State| t[s].iter().map(|&z| prev.class[z]).collect::<BTreeSet<_>>();
                let (bx, by) = (blocks(x), blocks(y));
                // A block reached from one side only; characterise it against
                // everything reached from the other side.
                let (witness_side, other_side, positive) = match bx.difference(&by).next() {
                    Some(&b) => (t[x].iter().find(|&&z| prev.class[z] == b), &t[y], true),
                    None => {
                        let b = *by.difference(&bx).next().expect("orbit blocks differ");
                        (t[y].iter().find(|&&z| prev.class[z] == b), &t[x], false)
                    }
                };
                let z = *witness_side.expect("block has a member");
                let parts: BTreeSet<Formula> = other_side
                    .iter()
                    .map(|&w| self.separate(sys, rounds, z, w))
                    .collect();
                let characteristic = conjunction(parts);
                let f = characteristic.eventually();
                if positive {
                    f
                } else {
                    f.negate()
                }
            }
            _ => unreachable!("table matches kind"),
        }
    }
}

fn conjunction(parts: BTreeSet<Formula>) -> Formula {
    let mut parts: Vec<Formula> = parts.into_iter().collect();
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Formula::And(parts)
    }
}

fn next_via(time: &TimeMonoid, t: &TimeValue, inner: Formula) -> Formula {
    let unit = matches!(time, TimeMonoid::Nat | TimeMonoid::Int) && *t == TimeValue::Num(1);
    if unit {
        inner.next()
    } else {
        Formula::NextVia(t.clone(), Box::new(inner))
    }
}

/// Disjoint blocks covering the states, numbered by first member in
/// declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub blocks: Vec<Vec<State>>,
    pub class: Vec<usize>,
}

impl Partition {
    /// Groups indices by equal keys.
    pub fn from_keys<K: Ord>(keys: impl Iterator<Item = K>) -> Partition {
        let mut ids: BTreeMap<K, usize> = BTreeMap::new();
        let mut blocks: Vec<Vec<State>> = Vec::new();
        let mut class = Vec::new();
        for (s, key) in keys.enumerate() {
            let fresh = ids.len();
            let id = *ids.entry(key).or_insert(fresh);
            if id == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[id].push(s);
            class.push(id);
        }
        Partition { blocks, class }
    }

    pub fn same_block(&self, x: State, y: State) -> bool {
        self.class[x] == self.class[y]
    }

    /// The equivalence relation with these blocks as classes.
    pub fn relation(&self) -> Relation {
        self.blocks
            .iter()
            .flat_map(|b| b.iter().flat_map(move |&x| b.iter().map(move |&y| (x, y))))
            .collect()
    }
}
