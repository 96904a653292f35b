mod common;

use std::collections::BTreeSet;

use common::*;
use nabla::coalgebra::{CoalgView, ViewKind};
use nabla::io::{parse_system, print_system};
use nabla::{eval, parse_formula, regex_to_dfa, DynSystem, Formula, Regex, TimeMonoid, TimeValue};
use proptest::prelude::*;
use rand::Rng;

fn nat_system() -> impl Strategy<Value = DynSystem> {
    (1usize..=6).prop_flat_map(|n| {
        (
            proptest::collection::vec(0..n, n),
            proptest::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(table, marks)| {
                let p = (0..n).filter(|&s| marks[s]).collect();
                DynSystem::new(
                    TimeMonoid::Nat,
                    (0..n).map(|i| format!("s{i}")).collect(),
                    vec![table],
                    [("p".to_string(), p)].into(),
                )
                .unwrap()
            })
    })
}

fn seeded_system(seed: u64) -> DynSystem {
    let mut rng = rng(seed);
    let n = rng.gen_range(1..=5);
    match seed % 4 {
        0 => random_nat_system(&mut rng, n, &ATOMS),
        1 => random_int_system(&mut rng, n, &ATOMS),
        2 => {
            let k = rng.gen_range(1..=3);
            random_word_system(&mut rng, n, k, &ATOMS)
        }
        _ => {
            let k = rng.gen_range(1..=3);
            let tables = (0..k).map(|_| random_table(&mut rng, n)).collect();
            let labels = random_labels(&mut rng, n, &ATOMS);
            DynSystem::new(
                TimeMonoid::FreeIdx(k),
                (0..n).map(|i| format!("s{i}")).collect(),
                tables,
                labels,
            )
            .unwrap()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lasso_matches_iteration(sys in nat_system(), t in 0u64..40) {
        for s in 0..sys.len() {
            let lasso = sys.trajectory_lasso(s).unwrap();
            let walked = simulate(&sys, s, t as usize + 1)[t as usize];
            prop_assert_eq!(lasso.at(t), walked);
            prop_assert_eq!(sys.apply(s, &TimeValue::Num(t as i64)).unwrap(), walked);
            prop_assert!(lasso.len() <= sys.len());
        }
    }

    #[test]
    fn action_laws_and_orbits(seed in any::<u64>()) {
        let sys = seeded_system(seed);
        prop_assert!(sys.validate_action(3).is_empty());
        let r = reach_matrix(&sys);
        for (s, row) in r.iter().enumerate() {
            let orbit = sys.orbit(s);
            let expected: BTreeSet<usize> = (0..sys.len()).filter(|&y| row[y]).collect();
            prop_assert_eq!(&orbit, &expected);
            prop_assert!(orbit.contains(&s));
        }
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let sys = seeded_system(seed);
        let text = print_system(&sys);
        let back = parse_system(&text).unwrap();
        prop_assert_eq!(&back, &sys);
        prop_assert_eq!(print_system(&back), text);
    }

    #[test]
    fn formulas_round_trip(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let f = random_nat_formula(&mut rng, 4, &["p", "q", "r'"]);
        let printed = f.to_string();
        let back = parse_formula(&printed).unwrap();
        prop_assert_eq!(back.to_string(), printed);
        prop_assert_eq!(back.desugar(), f.desugar());
    }

    #[test]
    fn desugar_is_idempotent(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let f = random_nat_formula(&mut rng, 4, &ATOMS);
        let d = f.desugar();
        prop_assert_eq!(d.desugar(), d);
    }

    #[test]
    fn regex_matches_reference_engine(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let k = rng.gen_range(1..=3);
        let symbols = &['x', 'y', 'z'][..k];
        let alphabet: Vec<String> = symbols.iter().map(|c| c.to_string()).collect();
        let pattern = random_regex(&mut rng, 4, symbols);
        let dfa = regex_to_dfa(&pattern, &alphabet).unwrap();
        let reference = std_regex(&pattern);
        for w in words(symbols, 6) {
            let idx: Vec<usize> = w.chars().map(|c| symbols.iter().position(|s| *s == c).unwrap()).collect();
            prop_assert_eq!(dfa.accepts(&idx), reference.is_match(&w), "{} on {:?}", pattern, w);
        }
        let re = Regex::parse(&pattern).unwrap();
        prop_assert_eq!(Regex::parse(&re.to_string()).unwrap(), re);
        // Minimal automata for the same language coincide.
        let again = regex_to_dfa(&format!("({pattern})|({pattern})"), &alphabet).unwrap();
        prop_assert_eq!(again, dfa);
    }

    #[test]
    fn positive_formulas_are_monotone(sys in nat_system(), seed in any::<u64>(), extra in 0usize..6) {
        let mut rng = rng(seed);
        let f = positive_formula(&mut rng, 3);
        let before = eval(&sys, &f).unwrap();
        let mut p = sys.label("p").cloned().unwrap();
        p.insert(extra % sys.len());
        let grown = sys.clone().with_labels([("p".to_string(), p)].into()).unwrap();
        let after = eval(&grown, &f).unwrap();
        prop_assert!(before.is_subset(&after), "{} shrank", f);
    }

    #[test]
    fn step_bisimilar_states_agree(sys in nat_system(), seed in any::<u64>()) {
        let view = CoalgView::build(&sys, ViewKind::Step(TimeValue::Num(1))).unwrap();
        let part = view.bisimilarity();
        let mut rng = rng(seed);
        for _ in 0..20 {
            let f = random_nat_formula(&mut rng, 3, &["p"]);
            let sat = eval(&sys, &f).unwrap();
            for x in 0..sys.len() {
                for y in 0..sys.len() {
                    prop_assert!(!part.same_block(x, y) || sat.contains(&x) == sat.contains(&y), "{} splits {} {}", f, x, y);
                }
            }
        }
    }

    #[test]
    fn box_is_its_nabla_form(seed in any::<u64>()) {
        let sys = seeded_system(seed);
        let mut rng = rng(seed ^ 1);
        let a = random_orbit_formula(&mut rng, 2, &ATOMS);
        prop_assert_eq!(eval(&sys, &a.clone().always()).unwrap(), eval(&sys, &Formula::nabla_orbit([a.clone()])).unwrap());
    }
}

/// Built from `p`, `⊤`, `⊥`, `∧`, `∨`, `○`, `G`, `F` and orbit `∇`.
fn positive_formula(rng: &mut rand::rngs::StdRng, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return [Formula::atom("p"), Formula::Top, Formula::Bot][rng.gen_range(0..3)].clone();
    }
    let sub = |rng: &mut rand::rngs::StdRng| positive_formula(rng, depth - 1);
    match rng.gen_range(0..6) {
        0 => Formula::And(vec![sub(rng), sub(rng)]),
        1 => Formula::Or(vec![sub(rng), sub(rng)]),
        2 => sub(rng).next(),
        3 => sub(rng).always(),
        4 => sub(rng).eventually(),
        _ => Formula::nabla_orbit([sub(rng), sub(rng)]),
    }
}
