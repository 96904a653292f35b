//! Random generators and independent oracles shared by the integration
//! suites. Oracles here never call the evaluation paths they check.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nabla::synthesis::Frame;
use nabla::{DynSystem, Formula, StateSet, TimeMonoid};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub const ATOMS: [&str; 2] = ["p", "q"];

fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

pub fn random_labels(rng: &mut StdRng, n: usize, atoms: &[&str]) -> BTreeMap<String, StateSet> {
    atoms
        .iter()
        .map(|a| (a.to_string(), (0..n).filter(|_| rng.gen_bool(0.5)).collect()))
        .collect()
}

pub fn random_table(rng: &mut StdRng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

pub fn random_permutation(rng: &mut StdRng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn random_nat_system(rng: &mut StdRng, n: usize, atoms: &[&str]) -> DynSystem {
    let labels = random_labels(rng, n, atoms);
    let table = random_table(rng, n);
    DynSystem::new(TimeMonoid::Nat, state_names(n), vec![table], labels).unwrap()
}

pub fn random_int_system(rng: &mut StdRng, n: usize, atoms: &[&str]) -> DynSystem {
    let labels = random_labels(rng, n, atoms);
    let table = random_permutation(rng, n);
    DynSystem::new(TimeMonoid::Int, state_names(n), vec![table], labels).unwrap()
}

pub fn random_word_system(rng: &mut StdRng, n: usize, k: usize, atoms: &[&str]) -> DynSystem {
    let alphabet: Vec<String> = ["x", "y", "z"][..k].iter().map(|s| s.to_string()).collect();
    let labels = random_labels(rng, n, atoms);
    let tables = (0..k).map(|_| random_table(rng, n)).collect();
    DynSystem::new(TimeMonoid::Word(alphabet), state_names(n), tables, labels).unwrap()
}

/// The mixed suite: Nat, Int and Word (alphabet 1..=3) systems with 1..=6
/// states, cycling through the time kinds.
pub fn random_suite(seed: u64, count: usize) -> Vec<DynSystem> {
    let mut rng = rng(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=6);
            match i % 3 {
                0 => random_nat_system(&mut rng, n, &ATOMS),
                1 => random_int_system(&mut rng, n, &ATOMS),
                _ => {
                    let k = rng.gen_range(1..=3);
                    random_word_system(&mut rng, n, k, &ATOMS)
                }
            }
        })
        .collect()
}

/// Reachability by iterating every step table to a fixpoint.
pub fn reach_matrix(sys: &DynSystem) -> Vec<Vec<bool>> {
    let n = sys.len();
    let mut r = vec![vec![false; n]; n];
    for (x, row) in r.iter_mut().enumerate() {
        row[x] = true;
    }
    loop {
        let mut changed = false;
        for row in r.iter_mut() {
            for y in 0..n {
                if row[y] {
                    for table in sys.steps() {
                        if !row[table[y]] {
                            row[table[y]] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            return r;
        }
    }
}

pub fn frame_from_matrix(worlds: Vec<String>, r: &[Vec<bool>]) -> Frame {
    let rel = (0..r.len())
        .flat_map(|x| (0..r.len()).filter(move |&y| r[x][y]).map(move |y| (x, y)))
        .collect();
    Frame::new(worlds, rel).unwrap()
}

pub fn transitive_closure(mut r: Vec<Vec<bool>>) -> Vec<Vec<bool>> {
    let n = r.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

pub fn world_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i}")).collect()
}

pub fn random_preorder(rng: &mut StdRng, n: usize, density: f64) -> Frame {
    let r: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i == j || rng.gen_bool(density)).collect())
        .collect();
    frame_from_matrix(world_names(n), &transitive_closure(r))
}

pub fn random_equivalence(rng: &mut StdRng, n: usize) -> Frame {
    let classes: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n.max(1))).collect();
    let r: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| classes[i] == classes[j]).collect())
        .collect();
    frame_from_matrix(world_names(n), &r)
}

pub fn is_nonbranching(r: &[Vec<bool>]) -> bool {
    let n = r.len();
    (0..n).all(|x| {
        (0..n).all(|y| (0..n).all(|z| !(r[x][y] && r[x][z]) || r[y][z] || r[z][y]))
    })
}

/// Every world with a strict successor is alone in its component.
pub fn transient_singletons(r: &[Vec<bool>]) -> bool {
    let n = r.len();
    (0..n).all(|x| {
        let transient = (0..n).any(|y| r[x][y] && !r[y][x]);
        !transient || (0..n).all(|y| y == x || !(r[x][y] && r[y][x]))
    })
}

pub fn matrix(fr: &Frame) -> Vec<Vec<bool>> {
    let n = fr.len();
    (0..n)
        .map(|x| (0..n).map(|y| fr.related(x, y)).collect())
        .collect()
}

/// Random non-branching preorder whose transient worlds are singleton
/// components, by rejection sampling over closures of sparse relations.
pub fn random_linear_frame(rng: &mut StdRng, n: usize) -> Frame {
    loop {
        let fr = random_preorder(rng, n, 0.25);
        let m = matrix(&fr);
        if is_nonbranching(&m) && transient_singletons(&m) {
            return fr;
        }
    }
}

/// Explicit trajectory of length `horizon` along step 1.
pub fn simulate(sys: &DynSystem, s: usize, horizon: usize) -> Vec<usize> {
    let step = sys.step_table(0);
    let mut out = Vec::with_capacity(horizon);
    let mut x = s;
    for _ in 0..horizon {
        out.push(x);
        x = step[x];
    }
    out
}

/// Horizon no shorter than `|prefix| + 2·lcm(|cycle|, 2) + 2` for any
/// lasso on `n` states.
pub fn oracle_horizon(n: usize) -> usize {
    n + 4 * n + 2
}

pub fn zip_oracle(sys: &DynSystem, even: &StateSet, odd: &StateSet) -> StateSet {
    let h = oracle_horizon(sys.len());
    let back = (*sys.time() == TimeMonoid::Int).then(|| sys.step_table(1).to_vec());
    (0..sys.len())
        .filter(|&s| {
            let forward = simulate(sys, s, h)
                .iter()
                .enumerate()
                .all(|(t, x)| if t % 2 == 0 { even } else { odd }.contains(x));
            let backward = back.as_ref().is_none_or(|inv| {
                let mut x = s;
                (1..h).all(|t| {
                    x = inv[x];
                    if t % 2 == 0 { even } else { odd }.contains(&x)
                })
            });
            forward && backward
        })
        .collect()
}

pub fn chg_oracle(
    sys: &DynSystem,
    t: usize,
    before: &StateSet,
    at: &StateSet,
    after: &StateSet,
) -> StateSet {
    let h = oracle_horizon(sys.len()) + t + 1;
    (0..sys.len())
        .filter(|&s| {
            let traj = simulate(sys, s, h);
            traj.iter().enumerate().all(|(u, x)| match u.cmp(&t) {
                std::cmp::Ordering::Less => before.contains(x),
                std::cmp::Ordering::Equal => at.contains(x),
                std::cmp::Ordering::Greater => after.contains(x),
            })
        })
        .collect()
}

pub fn until_oracle(sys: &DynSystem, hold: &StateSet, goal: &StateSet) -> StateSet {
    let h = oracle_horizon(sys.len());
    (0..sys.len())
        .filter(|&s| {
            let traj = simulate(sys, s, h);
            (0..h).any(|t| goal.contains(&traj[t]) && traj[..t].iter().all(|x| hold.contains(x)))
        })
        .collect()
}

/// Kripke-style evaluation over the reachability relation for the orbit
/// fragment; `∇` is read through the Egli–Milner lifting of satisfaction.
pub fn kripke_eval(sys: &DynSystem, r: &[Vec<bool>], f: &Formula) -> StateSet {
    let n = sys.len();
    let all = || 0..n;
    match f {
        Formula::Atom(a) => sys.label(a).cloned().unwrap_or_default(),
        Formula::Top => all().collect(),
        Formula::Bot => StateSet::new(),
        Formula::Not(g) => {
            let g = kripke_eval(sys, r, g);
            all().filter(|s| !g.contains(s)).collect()
        }
        Formula::Implies(g, h) => {
            let (g, h) = (kripke_eval(sys, r, g), kripke_eval(sys, r, h));
            all().filter(|s| !g.contains(s) || h.contains(s)).collect()
        }
        Formula::And(gs) => {
            let sets: Vec<_> = gs.iter().map(|g| kripke_eval(sys, r, g)).collect();
            all().filter(|s| sets.iter().all(|g| g.contains(s))).collect()
        }
        Formula::Or(gs) => {
            let sets: Vec<_> = gs.iter().map(|g| kripke_eval(sys, r, g)).collect();
            all().filter(|s| sets.iter().any(|g| g.contains(s))).collect()
        }
        Formula::Always(g) => {
            let g = kripke_eval(sys, r, g);
            all().filter(|&w| all().all(|v| !r[w][v] || g.contains(&v))).collect()
        }
        Formula::Eventually(g) => {
            let g = kripke_eval(sys, r, g);
            all().filter(|&w| all().any(|v| r[w][v] && g.contains(&v))).collect()
        }
        Formula::NablaOrbit(args) => {
            let sets: Vec<_> = args.iter().map(|g| kripke_eval(sys, r, g)).collect();
            all()
                .filter(|&w| {
                    let orbit: Vec<usize> = all().filter(|&v| r[w][v]).collect();
                    orbit.iter().all(|v| sets.iter().any(|g| g.contains(v)))
                        && sets.iter().all(|g| orbit.iter().any(|v| g.contains(v)))
                })
                .collect()
        }
        other => panic!("kripke oracle does not cover {other}"),
    }
}

/// Random formula over `atoms` using connectives, `G`, `F` and orbit `∇`.
pub fn random_orbit_formula(rng: &mut StdRng, depth: usize, atoms: &[&str]) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..atoms.len() + 2) {
            0 => Formula::Top,
            1 => Formula::Bot,
            i => Formula::atom(atoms[i - 2]),
        };
    }
    let sub = |rng: &mut StdRng| random_orbit_formula(rng, depth - 1, atoms);
    match rng.gen_range(0..8) {
        0 => sub(rng).negate(),
        1 => Formula::And(vec![sub(rng), sub(rng)]),
        2 => Formula::Or(vec![sub(rng), sub(rng)]),
        3 => sub(rng).implies(sub(rng)),
        4 => sub(rng).always(),
        5 => sub(rng).eventually(),
        _ => {
            let k = rng.gen_range(0..=3);
            Formula::nabla_orbit((0..k).map(|_| sub(rng)).collect::<BTreeSet<_>>())
        }
    }
}

/// Adds step and trajectory operators on top of the orbit fragment (ℕ time).
pub fn random_nat_formula(rng: &mut StdRng, depth: usize, atoms: &[&str]) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return random_orbit_formula(rng, 0, atoms);
    }
    let sub = |rng: &mut StdRng| random_nat_formula(rng, depth - 1, atoms);
    match rng.gen_range(0..10) {
        0 => sub(rng).next(),
        1 => sub(rng).zip(sub(rng)),
        2 => sub(rng).until(sub(rng)),
        3 => {
            let t = rng.gen_range(0..5);
            Formula::chg(t, sub(rng), sub(rng), sub(rng))
        }
        4 => sub(rng).negate(),
        5 => Formula::And(vec![sub(rng), sub(rng)]),
        6 => sub(rng).always(),
        7 => sub(rng).eventually(),
        8 => Formula::MaxDur(rng.gen_range(0..4), Box::new(sub(rng))),
        _ => Formula::Or(vec![sub(rng), sub(rng)]),
    }
}

/// Random regular expression over the given one-character symbols.
pub fn random_regex(rng: &mut StdRng, depth: usize, symbols: &[char]) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.15) {
            "~".into()
        } else {
            symbols.choose(rng).unwrap().to_string()
        };
    }
    let a = random_regex(rng, depth - 1, symbols);
    match rng.gen_range(0..3) {
        0 => format!("({a})*"),
        1 => format!("({a})({})", random_regex(rng, depth - 1, symbols)),
        _ => format!("({a}|{})", random_regex(rng, depth - 1, symbols)),
    }
}

/// Translation into `regex` crate syntax, anchored.
pub fn std_regex(pattern: &str) -> regex::Regex {
    let body = pattern.replace('~', "(?:)");
    regex::Regex::new(&format!("^(?:{body})$")).unwrap()
}

/// All words over `symbols` up to length `max`.
pub fn words(symbols: &[char], max: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w| symbols.iter().map(move |c| format!("{w}{c}")))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Deterministic automaton given by tables, used by the equivalence oracle.
pub struct Automaton {
    pub delta: Vec<Vec<usize>>,
    pub accepting: Vec<bool>,
    pub initial: usize,
}

impl Automaton {
    pub fn from_system(sys: &DynSystem, start: usize, acc: &StateSet) -> Automaton {
        let k = sys.steps().len();
        Automaton {
            delta: (0..sys.len())
                .map(|q| (0..k).map(|a| sys.step_table(a)[q]).collect())
                .collect(),
            accepting: (0..sys.len()).map(|q| acc.contains(&q)).collect(),
            initial: start,
        }
    }

    pub fn from_dfa(dfa: &nabla::Dfa) -> Automaton {
        let k = dfa.alphabet().len();
        Automaton {
            delta: (0..dfa.state_count())
                .map(|q| (0..k).map(|a| dfa.next(q, a)).collect())
                .collect(),
            accepting: (0..dfa.state_count()).map(|q| dfa.is_accepting(q)).collect(),
            initial: dfa.initial(),
        }
    }

    /// Disjoint union with `other`; returns the union and both initial
    /// states in it.
    fn union(&self, other: &Automaton) -> (Automaton, usize, usize) {
        let off = self.delta.len();
        let mut delta = self.delta.clone();
        delta.extend(other.delta.iter().map(|row| row.iter().map(|&t| t + off).collect()));
        let mut accepting = self.accepting.clone();
        accepting.extend(&other.accepting);
        (
            Automaton {
                delta,
                accepting,
                initial: self.initial,
            },
            self.initial,
            other.initial + off,
        )
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    if parent[x] != x {
        let root = find(parent, parent[x]);
        parent[x] = root;
    }
    parent[x]
}

/// Hopcroft–Karp union-find language equivalence.
pub fn equivalent(a: &Automaton, b: &Automaton) -> bool {
    let (u, x, y) = a.union(b);
    let mut parent: Vec<usize> = (0..u.delta.len()).collect();
    let mut stack = vec![(x, y)];
    let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
    parent[rx] = ry;
    while let Some((p, q)) = stack.pop() {
        if u.accepting[p] != u.accepting[q] {
            return false;
        }
        for sym in 0..u.delta[p].len() {
            let (p2, q2) = (u.delta[p][sym], u.delta[q][sym]);
            let (r1, r2) = (find(&mut parent, p2), find(&mut parent, q2));
            if r1 != r2 {
                parent[r1] = r2;
                stack.push((p2, q2));
            }
        }
    }
    true
}

/// `L(a) ⊆ L(b)` via `L(a) ∪ L(b) = L(b)`, with the union built as a
/// product automaton.
pub fn contained(a: &Automaton, b: &Automaton) -> bool {
    let mut index = BTreeMap::new();
    let mut order = vec![(a.initial, b.initial)];
    index.insert((a.initial, b.initial), 0);
    let mut delta = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (p, q) = order[i];
        let mut row = Vec::new();
        for sym in 0..a.delta[p].len() {
            let next = (a.delta[p][sym], b.delta[q][sym]);
            let fresh = index.len();
            let id = *index.entry(next).or_insert_with(|| {
                order.push(next);
                fresh
            });
            row.push(id);
        }
        delta.push(row);
        i += 1;
    }
    let union = Automaton {
        accepting: order.iter().map(|&(p, q)| a.accepting[p] || b.accepting[q]).collect(),
        delta,
        initial: 0,
    };
    equivalent(&union, b)
}
