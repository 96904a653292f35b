//! Kripke frames, their classification, and the synthesis of dynamical
//! systems whose reachability relation is a given frame relation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::coalgebra::Partition;
use crate::system::{DynSystem, State, SystemError};
use crate::time::TimeMonoid;

pub type World = usize;

/// Default world-count bound for [`axiom_validity`].
pub const DEFAULT_AXIOM_BOUND: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("frame is not {property}: counterexample {witness:?}")]
    PreconditionViolated {
        property: &'static str,
        witness: Vec<String>,
    },
    /// The unit-step construction for ℕ time does not apply: a transient
    /// world lies in a strongly connected component with other worlds.
    #[error("transient world `{transient}` lies in the non-singleton component {component:?}; no step function on these worlds realises the relation")]
    PaperGap {
        transient: String,
        component: Vec<String>,
    },
    #[error("system states do not match frame worlds")]
    CarrierMismatch,
    #[error("frame has {worlds} worlds, above the bound of {bound}")]
    BoundExceeded { worlds: usize, bound: usize },
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("edge refers to a world outside the frame")]
    EdgeOutOfRange,
    #[error(transparent)]
    System(#[from] SystemError),
}

/// A finite Kripke frame `(W, R)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    worlds: Vec<String>,
    relation: BTreeSet<(World, World)>,
}

impl Frame {
    pub fn new(
        worlds: Vec<String>,
        relation: BTreeSet<(World, World)>,
    ) -> Result<Frame, SynthesisError> {
        let mut seen = BTreeSet::new();
        for w in &worlds {
            if !seen.insert(w) {
                return Err(SynthesisError::DuplicateWorld(w.clone()));
            }
        }
        if relation
            .iter()
            .any(|&(x, y)| x >= worlds.len() || y >= worlds.len())
        {
            return Err(SynthesisError::EdgeOutOfRange);
        }
        Ok(Frame { worlds, relation })
    }

    /// The reachability frame `x R y ⟺ y ∈ orbit(x)` of a system.
    pub fn reachability(sys: &DynSystem) -> Frame {
        let relation = (0..sys.len())
            .flat_map(|x| sys.orbit(x).into_iter().map(move |y| (x, y)))
            .collect();
        Frame {
            worlds: sys.states().to_vec(),
            relation,
        }
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn relation(&self) -> &BTreeSet<(World, World)> {
        &self.relation
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn related(&self, x: World, y: World) -> bool {
        self.relation.contains(&(x, y))
    }

    /// R-image of `x` in declaration order.
    pub fn image(&self, x: World) -> Vec<World> {
        (0..self.len()).filter(|&y| self.related(x, y)).collect()
    }

    fn names(&self, ws: &[World]) -> Vec<String> {
        ws.iter().map(|&w| self.worlds[w].clone()).collect()
    }
}

/// Result of one exhaustive property check. The counterexample is the
/// lexicographically first violating tuple of worlds, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyCheck {
    pub holds: bool,
    pub counterexample: Option<Vec<World>>,
}

impl PropertyCheck {
    fn from_witness(counterexample: Option<Vec<World>>) -> PropertyCheck {
        PropertyCheck {
            holds: counterexample.is_none(),
            counterexample,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameProfile {
    /// Counterexample `[x]` (not reflexive) or `[x, y, z]` (not transitive).
    pub preorder: PropertyCheck,
    /// Counterexample `[x, y, z]` with `xRy`, `xRz` and `y`, `z` incomparable.
    pub nonbranching: PropertyCheck,
    /// Counterexample `[x, y]` with `xRy` but not `yRx`.
    pub symmetric: PropertyCheck,
    /// Counterexample `[x, y]` with neither `xRy` nor `yRx`.
    pub linear: PropertyCheck,
    /// Counterexample: the component of a transient world, that world first.
    pub transient_scc_singleton: PropertyCheck,
}

fn first<I: IntoIterator<Item = Vec<World>>>(it: I) -> Option<Vec<World>> {
    it.into_iter().next()
}

pub fn classify_frame(fr: &Frame) -> FrameProfile {
    let n = fr.len();
    let r = |x, y| fr.related(x, y);
    let pairs = || (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)));
    let triples = || pairs().flat_map(move |(x, y)| (0..n).map(move |z| (x, y, z)));

    let preorder = first((0..n).filter(|&x| !r(x, x)).map(|x| vec![x])).or_else(|| {
        first(
            triples()
                .filter(|&(x, y, z)| r(x, y) && r(y, z) && !r(x, z))
                .map(|(x, y, z)| vec![x, y, z]),
        )
    });
    let nonbranching = first(
        triples()
            .filter(|&(x, y, z)| r(x, y) && r(x, z) && !r(y, z) && !r(z, y))
            .map(|(x, y, z)| vec![x, y, z]),
    );
    let symmetric = first(
        pairs()
            .filter(|&(x, y)| r(x, y) && !r(y, x))
            .map(|(x, y)| vec![x, y]),
    );
    let linear = first(
        pairs()
            .filter(|&(x, y)| !r(x, y) && !r(y, x))
            .map(|(x, y)| vec![x, y]),
    );
    let transient = first((0..n).filter_map(|x| {
        let is_transient = (0..n).any(|y| r(x, y) && !r(y, x));
        let component: Vec<World> = (0..n).filter(|&y| r(x, y) && r(y, x)).collect();
        let others: Vec<World> = component.iter().copied().filter(|&y| y != x).collect();
        (is_transient && !others.is_empty()).then(|| {
            let mut witness = vec![x];
            witness.extend(others);
            witness
        })
    }));
    FrameProfile {
        preorder: PropertyCheck::from_witness(preorder),
        nonbranching: PropertyCheck::from_witness(nonbranching),
        symmetric: PropertyCheck::from_witness(symmetric),
        linear: PropertyCheck::from_witness(linear),
        transient_scc_singleton: PropertyCheck::from_witness(transient),
    }
}

fn require(
    fr: &Frame,
    property: &'static str,
    check: &PropertyCheck,
) -> Result<(), SynthesisError> {
    match &check.counterexample {
        None => Ok(()),
        Some(w) => Err(SynthesisError::PreconditionViolated {
            property,
            witness: fr.names(w),
        }),
    }
}

/// Strongly connected components of a preorder (mutual relatedness).
pub fn scc_partition(fr: &Frame) -> Result<Partition, SynthesisError> {
    require(fr, "a preorder", &classify_frame(fr).preorder)?;
    Ok(scc_blocks(fr))
}

fn scc_blocks(fr: &Frame) -> Partition {
    let n = fr.len();
    Partition::from_keys((0..n).map(|x| {
        (0..n)
            .find(|&y| fr.related(x, y) && fr.related(y, x))
            .unwrap_or(x)
    }))
}

/// Sends each block member to the next one in declaration order, cyclically.
fn cycle_blocks(step: &mut [State], blocks: &[Vec<World>]) {
    for block in blocks {
        for (i, &w) in block.iter().enumerate() {
            step[w] = block[(i + 1) % block.len()];
        }
    }
}

fn build(fr: &Frame, time: TimeMonoid, steps: Vec<Vec<State>>) -> Result<DynSystem, SynthesisError> {
    Ok(DynSystem::new(
        time,
        fr.worlds.clone(),
        steps,
        BTreeMap::new(),
    )?)
}

/// ℤ-time system for an equivalence relation: one cyclic permutation per
/// class.
pub fn synthesize_invertible(fr: &Frame) -> Result<DynSystem, SynthesisError> {
    let profile = classify_frame(fr);
    require(fr, "a preorder", &profile.preorder)?;
    require(fr, "symmetric", &profile.symmetric)?;
    let mut step: Vec<State> = (0..fr.len()).collect();
    cycle_blocks(&mut step, &scc_blocks(fr).blocks);
    build(fr, TimeMonoid::Int, vec![step])
}

/// ℕ-time system for a non-branching preorder whose transient worlds form
/// singleton components: transient worlds step to their least successor,
/// terminal components cycle.
pub fn synthesize_linear(fr: &Frame) -> Result<DynSystem, SynthesisError> {
    let profile = classify_frame(fr);
    require(fr, "a preorder", &profile.preorder)?;
    require(fr, "non-branching", &profile.nonbranching)?;
    if let Some(w) = &profile.transient_scc_singleton.counterexample {
        return Err(SynthesisError::PaperGap {
            transient: fr.worlds[w[0]].clone(),
            component: {
                let mut sorted = w.clone();
                sorted.sort_unstable();
                fr.names(&sorted)
            },
        });
    }
    let n = fr.len();
    let sccs = scc_blocks(fr);
    let mut step: Vec<State> = (0..n).collect();
    let terminal: Vec<Vec<World>> = sccs
        .blocks
        .iter()
        .filter(|b| {
            let x = b[0];
            (0..n).all(|y| !fr.related(x, y) || fr.related(y, x))
        })
        .cloned()
        .collect();
    cycle_blocks(&mut step, &terminal);
    for (x, next) in step.iter_mut().enumerate() {
        let successors: Vec<World> = (0..n)
            .filter(|&y| fr.related(x, y) && !fr.related(y, x))
            .collect();
        // Least successor: related to every other successor. Several exist
        // only within one component; the first in declaration order wins.
        if let Some(&least) = successors
            .iter()
            .find(|&&y| successors.iter().all(|&z| fr.related(y, z)))
        {
            *next = least;
        }
    }
    build(fr, TimeMonoid::Nat, vec![step])
}

/// Free-monoid-time system for any preorder: generator `i` sends `x` to the
/// `i`-th element (cyclically) of its R-image.
pub fn synthesize_general(fr: &Frame) -> Result<DynSystem, SynthesisError> {
    require(fr, "a preorder", &classify_frame(fr).preorder)?;
    let images: Vec<Vec<World>> = (0..fr.len()).map(|x| fr.image(x)).collect();
    let k = images.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let steps = (0..k)
        .map(|i| images.iter().map(|img| img[i % img.len()]).collect())
        .collect();
    build(fr, TimeMonoid::FreeIdx(k), steps)
}

/// Whether the reachability relation of `sys` equals the frame relation.
pub fn verify_synthesis(fr: &Frame, sys: &DynSystem) -> Result<bool, SynthesisError> {
    if sys.states() != fr.worlds() {
        return Err(SynthesisError::CarrierMismatch);
    }
    let n = fr.len();
    let mut reach = BTreeSet::new();
    for x in 0..n {
        let mut seen = vec![false; n];
        seen[x] = true;
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            reach.insert((x, y));
            for table in sys.steps() {
                if !seen[table[y]] {
                    seen[table[y]] = true;
                    queue.push_back(table[y]);
                }
            }
        }
    }
    Ok(&reach == fr.relation())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxiomScheme {
    /// `□A → A`
    T,
    /// `□A → □□A`
    Four,
    /// `□(□A → B) ∨ □(□B → A)`
    DotThree,
    /// `◇A → □◇A`
    Five,
}

impl AxiomScheme {
    pub const ALL: [AxiomScheme; 4] = [
        AxiomScheme::T,
        AxiomScheme::Four,
        AxiomScheme::DotThree,
        AxiomScheme::Five,
    ];

    pub fn metavariables(self) -> usize {
        if self == AxiomScheme::DotThree {
            2
        } else {
            1
        }
    }

    pub fn parse(text: &str) -> Option<AxiomScheme> {
        match text {
            "T" => Some(AxiomScheme::T),
            "4" => Some(AxiomScheme::Four),
            ".3" => Some(AxiomScheme::DotThree),
            "5" => Some(AxiomScheme::Five),
            _ => None,
        }
    }
}

impl fmt::Display for AxiomScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxiomScheme::T => "T",
            AxiomScheme::Four => "4",
            AxiomScheme::DotThree => ".3",
            AxiomScheme::Five => "5",
        })
    }
}

/// A world and valuation falsifying a scheme instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterValuation {
    pub world: World,
    pub a: Vec<World>,
    pub b: Option<Vec<World>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub scheme: AxiomScheme,
    pub valid: bool,
    pub counterexample: Option<CounterValuation>,
}

fn members(mask: u64, n: usize) -> Vec<World> {
    (0..n).filter(|&w| mask >> w & 1 == 1).collect()
}

/// Frame validity of an axiom scheme: truth at every world under every
/// valuation of its metavariables. Valuations are enumerated in increasing
/// bitmask order (world `i` is bit `i`), `A` outermost.
pub fn axiom_validity(
    fr: &Frame,
    scheme: AxiomScheme,
    bound: usize,
) -> Result<AxiomReport, SynthesisError> {
    let n = fr.len();
    if n > bound || n > 30 {
        return Err(SynthesisError::BoundExceeded {
            worlds: n,
            bound: bound.min(30),
        });
    }
    let full: u64 = (1u64 << n) - 1;
    let succ: Vec<u64> = (0..n)
        .map(|x| fr.image(x).iter().fold(0u64, |m, &y| m | 1 << y))
        .collect();
    let boxed = |set: u64| -> u64 {
        (0..n).fold(0, |m, w| if succ[w] & !set == 0 { m | 1 << w } else { m })
    };
    let diamond = |set: u64| -> u64 {
        (0..n).fold(0, |m, w| if succ[w] & set != 0 { m | 1 << w } else { m })
    };
    let report = |world: u64, a: u64, b: Option<u64>| AxiomReport {
        scheme,
        valid: false,
        counterexample: Some(CounterValuation {
            world: world.trailing_zeros() as usize,
            a: members(a, n),
            b: b.map(|b| members(b, n)),
        }),
    };
    for a in 0..=full {
        let box_a = boxed(a);
        if scheme == AxiomScheme::DotThree {
            for b in 0..=full {
                let box_b = boxed(b);
                let left = boxed(!box_a & full | b);
                let right = boxed(!box_b & full | a);
                let truth = left | right;
                if truth != full {
                    return Ok(report(!truth & full, a, Some(b)));
                }
            }
            continue;
        }
        let truth = match scheme {
            AxiomScheme::T => !box_a & full | a,
            AxiomScheme::Four => !box_a & full | boxed(box_a),
            AxiomScheme::Five => {
                let dia_a = diamond(a);
                !dia_a & full | boxed(dia_a)
            }
            AxiomScheme::DotThree => unreachable!(),
        };
        if truth != full {
            return Ok(report(!truth & full, a, None));
        }
    }
    Ok(AxiomReport {
        scheme,
        valid: true,
        counterexample: None,
    })
}
