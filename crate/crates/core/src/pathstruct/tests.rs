use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::cnf::{enumerate_models, generate_clause, generate_instance, mask_to_assignment, CnfFormula, GenParams, PartialAssignment};
use crate::dfa::{compile_by_conjunction, full_dfa, Transitions};
use crate::obdd::VarOrder;

fn raw(levels: Vec<Vec<Transitions>>) -> LevelDfa {
    let n = levels.len() - 1;
    LevelDfa::from_levels_raw(VarOrder::natural(n), levels).unwrap()
}

/// One parallel pair, at level 1 on the path 000.
fn one_parallel_level() -> LevelDfa {
    raw(vec![
        vec![[Some(0), Some(1)]],
        vec![[Some(0), Some(0)], [Some(1), None]],
        vec![[Some(0), None], [None, Some(0)]],
        vec![[None, None]],
    ])
}

fn clause(lits: &[i64]) -> Clause {
    Clause::from_dimacs(lits)
}

/// Adjoint edges found by scanning every edge of the automaton.
fn adjoint_by_enumeration(dfa: &LevelDfa, path: &DfaPath) -> usize {
    let states = dfa.walk(&path.bits).unwrap();
    let path_edges: Vec<(usize, u32, u32)> = (0..path.len()).map(|i| (i, states[i], states[i + 1])).collect();
    let mut count = 0;
    for (level, row) in dfa.levels().iter().enumerate().take(dfa.num_vars()) {
        for (s, t) in row.iter().enumerate() {
            for b in [false, true] {
                let Some(d) = t[b as usize] else { continue };
                let on_path = states[level] == s as u32 && path.bits[level] == b;
                if !on_path && path_edges.contains(&(level, s as u32, d)) {
                    count += 1;
                }
            }
        }
    }
    count
}

fn oracle_multi(dfa: &LevelDfa, c: &Clause) -> bool {
    dfa.accepting_paths()
        .iter()
        .filter(|p| is_compatible(dfa, p, c))
        .any(|p| classify_path(dfa, p, c).unwrap().i >= 2)
}

fn random_raw_dfa(rng: &mut ChaCha8Rng, n: usize) -> LevelDfa {
    let mut widths: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
    widths[0] = 1;
    widths.push(1);
    let levels = (0..=n)
        .map(|i| {
            (0..widths[i])
                .map(|_| {
                    if i == n {
                        return [None, None];
                    }
                    let mut t = [None, None];
                    for slot in &mut t {
                        if rng.gen_bool(0.8) {
                            *slot = Some(rng.gen_range(0..widths[i + 1] as u32));
                        }
                    }
                    t
                })
                .collect()
        })
        .collect();
    raw(levels)
}

#[test]
fn full_dfa_paths_are_all_adjoint() {
    let d = full_dfa(5);
    for p in d.accepting_paths().iter().step_by(7) {
        assert_eq!(adjoint_edges(&d, p).unwrap().len(), 5);
    }
    let c = clause(&[1, -3, 4]);
    for p in d.accepting_paths().iter().filter(|p| is_compatible(&d, p, &c)) {
        assert_eq!(classify_path(&d, p, &c).unwrap().i, 3);
    }
    assert!(has_multi_interchangeable_path(&d, &c));
    assert!(has_multi_interchangeable_path(&d, &clause(&[2, 5])));
    assert!(!has_multi_interchangeable_path(&d, &clause(&[2])));
}

#[test]
fn single_successor_automaton_has_no_adjoint_edges() {
    // accepts only 010
    let d = raw(vec![
        vec![[Some(0), None]],
        vec![[None, Some(0)]],
        vec![[Some(0), None]],
        vec![[None, None]],
    ]);
    let p = DfaPath::new(vec![false, true, false]);
    assert!(adjoint_edges(&d, &p).unwrap().is_empty());
    let c = clause(&[1, -2]);
    assert_eq!(classify_path(&d, &p, &c).unwrap(), PathClassification { i: 0 });
}

#[test]
fn constructed_single_parallel_level() {
    let d = one_parallel_level();
    let p = DfaPath::new(vec![false; 3]);
    let edges = adjoint_edges(&d, &p).unwrap();
    assert_eq!(edges.len(), adjoint_by_enumeration(&d, &p));
    assert_eq!(edges.len(), 1);
    assert_eq!(edges[0], AdjointEdge { level: 1, var: Var::new(2), from: 0, to: 0, bit: true });
    // nogood of x1 ∨ x2 ∨ x3 is 000
    let c = clause(&[1, 2, 3]);
    assert_eq!(classify_path(&d, &p, &c).unwrap().i, 1);
    assert!(!classify_path(&d, &p, &c).unwrap().is_multi());
    assert_eq!(classify_path(&d, &p, &clause(&[1, 3])).unwrap().i, 0);
    assert!(!has_multi_interchangeable_path(&d, &c));
}

#[test]
fn path_errors() {
    let d = one_parallel_level();
    assert!(matches!(adjoint_edges(&d, &DfaPath::new(vec![true, true, true])), Err(Error::NotAccepting)));
    assert!(matches!(adjoint_edges(&d, &DfaPath::new(vec![false])), Err(Error::NotAccepting)));
    let p = DfaPath::new(vec![false; 3]);
    assert!(matches!(classify_path(&d, &p, &clause(&[-1])), Err(Error::IncompatiblePath)));
    assert!(matches!(classify_path(&d, &p, &clause(&[7])), Err(Error::IncompatiblePath)));
}

#[test]
fn empty_language_has_no_multi_path() {
    let f = CnfFormula::from_dimacs_clauses(3, &[&[1], &[-1]]);
    let d = compile_by_conjunction(&f, &VarOrder::natural(3));
    assert!(d.is_empty_language());
    assert!(!has_multi_interchangeable_path(&d, &clause(&[1, 2, 3])));
    assert!(multi_interchangeable_witness(&d, &clause(&[1, 2, 3])).is_none());
}

#[test]
fn agrees_with_path_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut positives = 0;
    for i in 0..300 {
        let n = rng.gen_range(3..=10);
        let d = if i % 2 == 0 {
            let r = rng.gen_range(0.0..4.5);
            let f = generate_instance(&GenParams::from_ratio(3, n, r, rng.gen())).unwrap();
            compile_by_conjunction(&f, &VarOrder::natural(n))
        } else {
            random_raw_dfa(&mut rng, n)
        };
        let k = rng.gen_range(1..=3.min(n));
        let c = generate_clause(k, n, 1, rng.gen()).unwrap().remove(0);
        let expected = oracle_multi(&d, &c);
        assert_eq!(has_multi_interchangeable_path(&d, &c), expected, "case {i}");
        let w = multi_interchangeable_witness(&d, &c);
        assert_eq!(w.is_some(), expected, "case {i}");
        if let Some(p) = w {
            assert!(classify_path(&d, &p, &c).unwrap().i >= 2);
            positives += 1;
        }
    }
    assert!(positives > 30 && positives < 270, "degenerate sample: {positives}");
}

#[test]
fn multi_path_gives_weak_multi_partial() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut checked = 0;
    for _ in 0..150 {
        let n = rng.gen_range(4..=10);
        let f = generate_instance(&GenParams::from_ratio(3, n, rng.gen_range(0.0..3.0), rng.gen())).unwrap();
        let d = compile_by_conjunction(&f, &VarOrder::natural(n));
        let c = generate_clause(3, n, 1, rng.gen()).unwrap().remove(0);
        let Some(p) = multi_interchangeable_witness(&d, &c) else { continue };
        let free: Vec<usize> = adjoint_edges(&d, &p)
            .unwrap()
            .iter()
            .filter(|e| c.lits().iter().any(|l| l.var == e.var))
            .map(|e| e.level)
            .collect();
        assert!(free.len() >= 2);
        let partial: PartialAssignment = (0..n)
            .filter(|l| !free.contains(l))
            .map(|l| (d.order().var_at(l), p.bits[l]))
            .collect();
        assert!(weak_multi_interchangeable(&f, &partial).unwrap());
        checked += 1;
    }
    assert!(checked > 20);
}

#[test]
fn fully_multi_examples() {
    let f = CnfFormula::from_dimacs_clauses(4, &[&[1, -2]]);
    assert!(fully_multi_interchangeable(&f).unwrap());
    let f = CnfFormula::from_dimacs_clauses(2, &[&[1], &[2]]);
    assert!(!fully_multi_interchangeable(&f).unwrap());
    let f = CnfFormula::from_dimacs_clauses(2, &[&[1], &[-1]]);
    assert!(fully_multi_interchangeable(&f).unwrap());
    assert!(fully_multi_interchangeable(&CnfFormula::empty(30)).is_err());
}

#[test]
fn fully_multi_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..100 {
        let n = rng.gen_range(2..=8);
        let f = generate_instance(&GenParams::from_ratio(2, n, rng.gen_range(0.0..1.5), rng.gen())).unwrap();
        let models: Vec<Vec<bool>> = enumerate_models(&f, 24)
            .unwrap()
            .into_iter()
            .map(|m| mask_to_assignment(m, n))
            .collect();
        let flippable = (0..n)
            .filter(|&v| {
                models.iter().all(|m| {
                    let mut x = m.clone();
                    x[v] = !x[v];
                    f.evaluate(&x).unwrap()
                })
            })
            .count();
        assert_eq!(fully_multi_interchangeable(&f).unwrap(), flippable >= 2);
    }
}

#[test]
fn weak_multi_examples_and_oracle() {
    let empty = CnfFormula::empty(3);
    assert!(weak_multi_interchangeable(&empty, &PartialAssignment::new()).unwrap());
    let long: PartialAssignment = [(Var::new(1), true), (Var::new(2), false)].into_iter().collect();
    assert!(!weak_multi_interchangeable(&empty, &long).unwrap());
    let outside: PartialAssignment = [(Var::new(4), true)].into_iter().collect();
    assert!(weak_multi_interchangeable(&empty, &outside).is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let mut trues = 0;
    for _ in 0..200 {
        let n = rng.gen_range(3..=8);
        let f = generate_instance(&GenParams::from_ratio(3, n, rng.gen_range(0.0..1.0), rng.gen())).unwrap();
        let mut fixed = Vec::new();
        for v in 1..=n as u32 {
            if rng.gen_bool(0.6) {
                fixed.push((Var::new(v), rng.gen::<bool>()));
            }
        }
        let partial: PartialAssignment = fixed.into_iter().collect();
        let expected = partial.len() + 2 <= n
            && (0..1u64 << n)
                .map(|m| mask_to_assignment(m, n))
                .filter(|a| partial.is_extended_by(a))
                .all(|a| f.evaluate(&a).unwrap());
        assert_eq!(weak_multi_interchangeable(&f, &partial).unwrap(), expected);
        trues += expected as usize;
    }
    assert!(trues > 10);
}

#[test]
fn labels_follow_threshold() {
    assert_eq!(PhaseLabel::from_count(51, 50), PhaseLabel::EasyHard);
    assert_eq!(PhaseLabel::from_count(50, 50), PhaseLabel::HardEasy);
    assert_eq!(PhaseLabel::from_count(0, 50), PhaseLabel::HardEasy);
}

#[test]
fn phase_config_validation() {
    let ok = PhaseExperimentConfig::default();
    assert_eq!((ok.n, ok.instances_per_r, ok.probe_clauses, ok.threshold), (18, 100, 100, 50));
    assert!(ok.validate().is_ok());
    for bad in [
        PhaseExperimentConfig { threshold: 100, ..ok.clone() },
        PhaseExperimentConfig { threshold: 0, ..ok.clone() },
        PhaseExperimentConfig { r_grid: vec![], ..ok.clone() },
        PhaseExperimentConfig { instances_per_r: 0, ..ok.clone() },
        PhaseExperimentConfig { k: 20, ..ok.clone() },
    ] {
        assert!(phase_experiment(&bad).is_err());
    }
}

#[test]
fn phase_extremes_and_determinism() {
    let cfg = PhaseExperimentConfig {
        n: 10,
        r_grid: vec![0.0, 9.0],
        instances_per_r: 12,
        probe_clauses: 20,
        threshold: 10,
        seed: 5,
        ..Default::default()
    };
    let rows = phase_experiment(&cfg).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].fraction, 1.0);
    assert_eq!(rows[0].mean_dfa_states, 11.0);
    // 90 clauses over 10 variables: every instance is unsatisfiable
    assert_eq!(rows[1].fraction, 0.0);
    assert_eq!(rows[1].mean_dfa_states, 0.0);
    assert_eq!(rows[1].instances, 12);
    assert_eq!(phase_experiment(&cfg).unwrap(), rows);

    let mut buf = Vec::new();
    write_phase_csv(&mut buf, &rows).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("# schema: kclab-phase/1\nr,instances,easy_hard_count,fraction,mean_dfa_states\n"));
    assert_eq!(read_phase_csv(text.as_bytes()).unwrap(), rows);
    assert!(read_phase_csv("r,instances\n".as_bytes()).is_err());
}

#[test]
fn phase_skips_capped_instances() {
    let cfg = PhaseExperimentConfig {
        n: 14,
        r_grid: vec![1.8],
        instances_per_r: 4,
        probe_clauses: 10,
        threshold: 5,
        node_cap: 8,
        ..Default::default()
    };
    let rows = phase_experiment(&cfg).unwrap();
    assert_eq!(rows[0].skipped, 4);
    assert_eq!(rows[0].instances, 0);
    assert!(rows[0].fraction.is_nan());
}
