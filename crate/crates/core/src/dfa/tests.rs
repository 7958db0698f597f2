use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::cnf::{brute_force_count, enumerate_models, generate_instance, mask_to_assignment, GenParams};

/// Accepted words as variable-indexed assignments packed into masks.
fn language(d: &LevelDfa) -> BTreeSet<u64> {
    d.accepting_paths()
        .iter()
        .map(|p| {
            d.path_assignment(p)
                .iter()
                .enumerate()
                .fold(0u64, |m, (i, &b)| m | (b as u64) << i)
        })
        .collect()
}

/// Random raw leveled automaton (not trimmed, not minimal).
fn random_raw(n: usize, rng: &mut ChaCha8Rng) -> LevelDfa {
    let mut widths: Vec<usize> = (0..=n).map(|_| rng.gen_range(1..=4)).collect();
    widths[0] = 1;
    widths[n] = 1;
    let levels = (0..=n)
        .map(|i| {
            (0..widths[i])
                .map(|_| {
                    if i == n {
                        return [None, None];
                    }
                    let mut pick = || (rng.gen_bool(0.8)).then(|| rng.gen_range(0..widths[i + 1]) as u32);
                    [pick(), pick()]
                })
                .collect()
        })
        .collect();
    LevelDfa::from_levels_raw(VarOrder::natural(n), levels).unwrap()
}

#[test]
fn full_automaton_shapes() {
    let d2 = LevelDfa::full(2);
    assert_eq!(d2.state_count(), 3);
    assert_eq!(d2.transition_count(), 4);
    assert_eq!(d2.accepting_path_count(), 4);
    let d1 = LevelDfa::full(1);
    assert_eq!((d1.state_count(), d1.transition_count()), (2, 2));
    for n in 1..=10 {
        let d = LevelDfa::full(n);
        assert_eq!(d.accepting_path_count(), 1 << n);
        assert_eq!(d.state_count(), n + 1);
        assert_eq!(d.minimize(), d);
        d.check_invariants().unwrap();
    }
}

#[test]
fn empty_formula_gives_full_automaton() {
    let d = compile_cnf_to_dfa(&CnfFormula::empty(2), &VarOrder::natural(2), Budget::default()).unwrap();
    assert_eq!(d, LevelDfa::full(2));
}

#[test]
fn unsatisfiable_formula_gives_empty_automaton() {
    let f = CnfFormula::from_dimacs_clauses(3, &[&[1], &[-1]]);
    let d = compile_cnf_to_dfa(&f, &VarOrder::natural(3), Budget::default()).unwrap();
    assert!(d.is_empty_language());
    assert_eq!(d.state_count(), 0);
    assert_eq!(d.accepting_path_count(), 0);
    d.check_invariants().unwrap();
    assert_eq!(compile_by_conjunction(&f, &VarOrder::natural(3)), d);
}

#[test]
fn conjoin_removes_exactly_the_nogood() {
    let d = LevelDfa::full(3).conjoin_clause(&Clause::from_dimacs(&[-1, -2, -3]));
    assert_eq!(d.accepting_path_count(), 7);
    assert!(!d.accepts(&[true, true, true]));
    assert_eq!(language(&d).len(), 7);
    d.check_invariants().unwrap();
}

#[test]
fn conjoin_entailed_clause_is_a_no_op() {
    let f = CnfFormula::from_dimacs_clauses(4, &[&[1, 2], &[-3, 4]]);
    let d = compile_by_conjunction(&f, &VarOrder::natural(4));
    let again = d.conjoin_clause(&Clause::from_dimacs(&[1, 2]));
    assert_eq!(again, d);
    let weaker = d.conjoin_clause(&Clause::from_dimacs(&[1, 2, 3]));
    assert_eq!(weaker.state_count(), d.state_count());
}

#[test]
fn conjoin_empty_clause_empties_language() {
    assert!(LevelDfa::full(3).conjoin_clause(&Clause::default()).is_empty_language());
}

// The three ways removing the single nogood path 111 of clause ¬x1∨¬x2∨¬x3
// can play out, depending on how many adjoint edges that path has.

#[test]
fn conjoin_zero_interchangeable_path_does_not_grow() {
    // language {000, 111}: the path 111 has no parallel edges
    let d = from_dump(3, "0 0 0 0\n0 0 1 1\n1 0 0 0\n1 1 1 1\n2 0 0 0\n2 1 1 0\n").unwrap().minimize();
    assert_eq!(language(&d), BTreeSet::from([0b000, 0b111]));
    let after = d.conjoin_clause(&Clause::from_dimacs(&[-1, -2, -3]));
    assert_eq!(language(&after), BTreeSet::from([0b000]));
    assert!(after.state_count() <= d.state_count());
    assert_eq!((d.state_count(), after.state_count()), (6, 4));
}

#[test]
fn conjoin_single_interchangeable_path_changes_little() {
    // language {011, 111}: one parallel edge (on x1) along 111
    let d = from_dump(3, "0 0 0 0\n0 0 1 0\n1 0 1 0\n2 0 1 0\n").unwrap().minimize();
    assert_eq!(language(&d), BTreeSet::from([0b110, 0b111]));
    let after = d.conjoin_clause(&Clause::from_dimacs(&[-1, -2, -3]));
    assert_eq!(language(&after), BTreeSet::from([0b110]));
    assert!((after.state_count() as i64 - d.state_count() as i64).abs() <= 1);
}

#[test]
fn conjoin_multi_interchangeable_path_grows() {
    let d = LevelDfa::full(3);
    let after = d.conjoin_clause(&Clause::from_dimacs(&[-1, -2, -3]));
    assert!(after.state_count() > d.state_count());
    assert_eq!((d.state_count(), after.state_count()), (4, 6));
    let expected: BTreeSet<u64> = (0..7).collect();
    assert_eq!(language(&after), expected);
}

#[test]
fn minimize_merges_twin_states() {
    let raw = from_dump(2, "0 0 0 0\n0 0 1 1\n1 0 0 0\n1 0 1 0\n1 1 0 0\n1 1 1 0\n").unwrap();
    assert_eq!(raw.state_count(), 4);
    let min = raw.minimize();
    assert_eq!(min.state_count(), 3);
    assert_eq!(language(&raw), language(&min));
    assert_eq!(min, LevelDfa::full(2));
}

#[test]
fn minimize_is_idempotent_and_language_preserving_on_random_automata() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let raw = random_raw(n, &mut rng);
        let min = raw.minimize();
        assert_eq!(min.minimize(), min);
        assert_eq!(language(&raw), language(&min));
        assert!(min.state_count() <= raw.state_count());
        min.check_invariants().unwrap();
    }
}

#[test]
fn minimal_automata_have_distinct_signatures_per_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let d = random_raw(6, &mut rng).minimize();
        for level in d.levels() {
            let sigs: BTreeSet<_> = level.iter().collect();
            assert_eq!(sigs.len(), level.len());
        }
    }
}

#[test]
fn path_count_agrees_with_oracle_and_routes_agree() {
    for i in 0..60u64 {
        let n = 3 + (i % 12) as usize;
        let r = [0.5, 1.8, 4.0][(i % 3) as usize];
        let f = generate_instance(&GenParams::from_ratio(3, n, r, 100 + i)).unwrap();
        let order = VarOrder::natural(n);
        let via_obdd = compile_cnf_to_dfa(&f, &order, Budget::default()).unwrap();
        let via_product = compile_by_conjunction(&f, &order);
        assert_eq!(via_obdd, via_product, "instance {i}");
        assert_eq!(via_obdd.accepting_path_count(), brute_force_count(&f).unwrap() as u128);
        via_obdd.check_invariants().unwrap();
    }
}

#[test]
fn obdd_bridge_preserves_language() {
    let mut m = ObddManager::natural(3);
    assert_eq!(LevelDfa::from_obdd(&m, NodeRef::TRUE), LevelDfa::full(3));
    assert!(LevelDfa::from_obdd(&m, NodeRef::FALSE).is_empty_language());

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..40 {
        let n = rng.gen_range(2..=12);
        let f = generate_instance(&GenParams::from_ratio(3.min(n), n, rng.gen_range(0.0..3.0), rng.gen())).unwrap();
        m = ObddManager::natural(n);
        let root = m.compile(&f).unwrap();
        let d = LevelDfa::from_obdd(&m, root);
        for a in 0..1u64 << n {
            let x = mask_to_assignment(a, n);
            assert_eq!(d.accepts(&x), m.evaluate(root, &x));
        }
        assert!(d.state_count() >= m.reachable(root).len());
    }
}

#[test]
fn clause_order_does_not_change_the_automaton() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let f = generate_instance(&GenParams::from_ratio(3, 10, 2.0, rng.gen())).unwrap();
        let mut perm: Vec<usize> = (0..f.num_clauses()).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let g = f.with_clause_order(&perm);
        let order = VarOrder::natural(10);
        assert_eq!(compile_by_conjunction(&f, &order), compile_by_conjunction(&g, &order));
    }
}

#[test]
fn non_natural_order() {
    let order = VarOrder::from_sequence(&[3, 1, 4, 2].map(crate::cnf::Var::new)).unwrap();
    let f = CnfFormula::from_dimacs_clauses(4, &[&[1, -2], &[3, 4], &[-1, -4]]);
    let d = compile_cnf_to_dfa(&f, &order, Budget::default()).unwrap();
    assert_eq!(d, compile_by_conjunction(&f, &order));
    let models: BTreeSet<u64> = enumerate_models(&f, 10).unwrap().into_iter().collect();
    assert_eq!(language(&d), models);
}

#[test]
fn dump_round_trip_and_golden() {
    let d = LevelDfa::full(3).conjoin_clause(&Clause::from_dimacs(&[-1, -2, -3]));
    let dump = to_dump(&d);
    let golden = "\
0 0 0 0
0 0 1 1
1 0 0 0
1 0 1 0
1 1 0 0
1 1 1 1
2 0 0 0
2 0 1 0
2 1 0 0
";
    assert_eq!(dump, golden);
    assert_eq!(from_dump(3, &dump).unwrap(), d);
    assert!(from_dump(3, "0 0 2 0\n").is_err());
    assert!(from_dump(3, "0 0 0\n").is_err());
}

#[test]
fn dot_has_one_rank_per_level() {
    let dot = to_dot(&LevelDfa::full(4));
    assert_eq!(dot.matches("rank=same").count(), 5);
    assert_eq!(dot.matches("->").count(), 8);
}

#[test]
fn structural_validation() {
    let order = VarOrder::natural(1);
    assert!(LevelDfa::from_levels(order.clone(), vec![vec![[Some(1), None]], vec![[None, None]]]).is_err());
    assert!(LevelDfa::from_levels(order.clone(), vec![vec![[Some(0), None]]]).is_err());
    let d = LevelDfa::from_levels(order, vec![vec![[Some(0), None]], vec![[None, None]]]).unwrap();
    assert_eq!(d.accepting_path_count(), 1);
    let raw = from_dump(2, "0 0 0 0\n0 0 1 1\n1 0 0 0\n").unwrap();
    assert!(raw.check_invariants().is_err());
    raw.minimize().check_invariants().unwrap();
}

proptest! {
    #[test]
    fn conjoin_is_intersection(seed: u64, n in 2usize..=10, m in 0usize..12, k in 1usize..=3) {
        let k = k.min(n);
        let f = generate_instance(&GenParams::new(k, n, m, seed)).unwrap();
        let d = compile_by_conjunction(&f, &VarOrder::natural(n));
        let probe = crate::cnf::generate_clause(k, n, 1, seed ^ 0xABCD).unwrap().remove(0);
        let after = d.conjoin_clause(&probe);
        let expected: BTreeSet<u64> = language(&d)
            .into_iter()
            .filter(|&a| probe.is_satisfied_by(&mask_to_assignment(a, n)))
            .collect();
        prop_assert_eq!(language(&after), expected);
        prop_assert!(after.check_invariants().is_ok());
    }
}
