use std::time::Duration;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regrobust::automata::{check_determinism, universal};
use regrobust::bench::{build_sampler, generate, ground_truth, BenchmarkId};
use regrobust::learn::{hill_climb, op_delta, op_f, score, search, SampleSet, SearchConfig, SearchSpace};
use regrobust::rational::ints;
use regrobust::Rational;

fn s1_samples(n: usize) -> SampleSet {
    let mut sampler = build_sampler(BenchmarkId::S1, 0.5, 12, 4).unwrap();
    generate(&mut sampler, n / 2, n / 2).unwrap()
}

#[test]
fn score_examples() {
    let pos: Vec<_> = (1..=5).map(|i| ints(&[i])).collect();
    let neg: Vec<_> = (1..=5).map(|i| ints(&[i, 0])).collect();
    let s = SampleSet::from_parts(pos.clone(), neg.clone()).unwrap();
    assert_eq!(score(&universal(), &s).unwrap(), Rational::new(1, 2));
    let s1 = ground_truth(BenchmarkId::S1);
    let mut pos9 = pos.clone();
    pos9.truncate(4);
    pos9.push(ints(&[3, 1]));
    let s = SampleSet::from_parts(pos9, neg).unwrap();
    assert_eq!(score(&s1, &s).unwrap(), Rational::new(9, 10));
    assert_eq!(score(&s1, &s1_samples(40)).unwrap(), Rational::one());
}

#[test]
fn op_f_twice_is_identity() {
    let d = ground_truth(BenchmarkId::S9);
    assert_ne!(op_f(&d, 2), d);
    assert_eq!(op_f(&op_f(&d, 2), 2), d);
}

#[test]
fn op_f_on_unreachable_state_keeps_score() {
    let space = SearchSpace::new(3, 1, vec![]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut cand = space.random_candidate(&mut rng);
    // Nothing leads to state 2.
    for e in &mut cand.entries {
        for c in &mut e.cells {
            c.target %= 2;
        }
    }
    let d = cand.to_dra(&space);
    let s = s1_samples(60);
    assert_eq!(score(&d, &s).unwrap(), score(&op_f(&d, 2), &s).unwrap());
}

#[test]
fn op_delta_with_the_same_entry_is_identity() {
    let space = SearchSpace::new(2, 1, ints(&[0, 5])).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cand = space.random_candidate(&mut rng);
    let d = cand.to_dra(&space);
    let again = op_delta(&d, 1, &cand.entries[1], &space);
    assert_eq!(again.accepting, d.accepting);
    let mut a = again.transitions.clone();
    let mut b = d.transitions.clone();
    a.sort_by_key(|t| format!("{t:?}"));
    b.sort_by_key(|t| format!("{t:?}"));
    assert_eq!(a, b);
}

#[test]
fn perfect_start_is_returned_unchanged() {
    let space = SearchSpace::new(2, 1, vec![]).unwrap();
    let s = s1_samples(100);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // Search once, then restart from the perfect result.
    let out = search(&s, &space, &SearchConfig { restarts: 3, seed: 1, ..SearchConfig::default() }).unwrap();
    assert_eq!(out.best.score, Rational::one());
    let again = hill_climb(&s, &space, 1000, Duration::from_secs(60), out.best.candidate.clone(), &mut rng).unwrap();
    assert_eq!(again.accepted_mutations, 0);
    assert_eq!(again.iterations, 0);
    assert_eq!(again.candidate, out.best.candidate);
}

#[test]
fn climb_trace_is_monotone_and_final_score_is_exact() {
    let space = SearchSpace::new(3, 1, vec![]).unwrap();
    let s = s1_samples(200);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let init = space.random_candidate(&mut rng);
    let r = hill_climb(&s, &space, 3000, Duration::from_secs(60), init, &mut rng).unwrap();
    assert!(r.trace.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(*r.trace.last().unwrap(), r.score);
    assert_eq!(score(&r.dra, &s).unwrap(), r.score);
    assert!(check_determinism(&r.dra).is_empty());
}

#[test]
fn search_is_reproducible() {
    let space = SearchSpace::new(2, 1, vec![]).unwrap();
    let s = s1_samples(100);
    let cfg = SearchConfig { max_iterations: 2000, restarts: 4, seed: 77, ..SearchConfig::default() };
    let a = search(&s, &space, &cfg).unwrap();
    let b = search(&s, &space, &cfg).unwrap();
    assert_eq!(a.best.dra.to_json(), b.best.dra.to_json());
    let sa: Vec<_> = a.restarts.iter().map(|r| (r.score.clone(), r.iterations)).collect();
    let sb: Vec<_> = b.restarts.iter().map(|r| (r.score.clone(), r.iterations)).collect();
    assert_eq!(sa, sb);
}

#[test]
fn invalid_spaces_are_rejected() {
    assert!(SearchSpace::new(0, 1, vec![]).is_err());
    assert!(SearchSpace::new(2, 1, ints(&[5, 0])).is_err());
    let space = SearchSpace::new(2, 0, vec![]).unwrap();
    assert!(search(&SampleSet::new(), &space, &SearchConfig::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    /// Every catalog entry is deterministic, and the climber's own run
    /// agrees with the automaton it stands for.
    #[test]
    fn candidates_are_deterministic_and_runs_agree(
        seed in any::<u64>(),
        n in 1usize..4,
        k in 0usize..3,
        seqs in prop::collection::vec(prop::collection::vec(-3i64..=6, 1..6), 1..10),
    ) {
        let space = SearchSpace::new(n, k, ints(&[0, 2, 5])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cand = space.random_candidate(&mut rng);
        let d = cand.to_dra(&space);
        prop_assert!(check_determinism(&d).is_empty());
        let mut s = SampleSet::new();
        for (i, seq) in seqs.iter().enumerate() {
            let _ = s.insert(ints(seq), i % 2 == 0);
        }
        // A climb with no iterations reports the initial score.
        let r = hill_climb(&s, &space, 0, Duration::from_secs(5), cand.clone(), &mut rng).unwrap();
        prop_assert_eq!(r.score, score(&d, &s).unwrap());
        let q = rng.random_range(0..n);
        let e = space.random_entry(&mut rng);
        prop_assert!(check_determinism(&op_delta(&d, q, &e, &space)).is_empty());
    }
}
