mod common;

use common::grid::exhaustive;
use common::oracles;
use proptest::prelude::*;
use regrobust::automata::ops::{empty_language, universal};
use regrobust::automata::{Assignment, Atom, CmpOp, Dra, Guard, Operand, Transition};
use regrobust::metric::eval::evaluate_general;
use regrobust::metric::{build_metric, evaluate, restrict_metric, ExtendedCost, MetricKind, Raa};
use regrobust::rational::ints;
use regrobust::Rational;

fn fin(n: i64) -> ExtendedCost {
    ExtendedCost::Finite(Rational::from_integer(n))
}

fn eval(kind: &str, v: &[i64], w: &[i64]) -> ExtendedCost {
    evaluate(&build_metric(&kind.parse().unwrap()), &ints(v), &ints(w))
}

#[test]
fn edit_distance_of_worked_pair() {
    assert_eq!(eval("edit", &[1, 2, 3, 7, 9], &[1, 3, 7, 10]), fin(2));
}

#[test]
fn dtw_collapses_repeated_letters() {
    assert_eq!(eval("dtw", &[0], &[0, 0, 0, 0]), fin(0));
    assert_eq!(eval("dtw", &[0, 5], &[0, 0, 5, 5, 5]), fin(0));
    assert_eq!(eval("dtw", &[], &[1]), ExtendedCost::Infinite);
}

#[test]
fn hamming_needs_equal_lengths() {
    assert_eq!(eval("hamming", &[1, 2, 3], &[1, 5, 3]), fin(1));
    assert_eq!(eval("hamming", &[1, 2, 3], &[1, 2]), ExtendedCost::Infinite);
}

#[test]
fn manhattan_sums_absolute_differences() {
    assert_eq!(eval("manhattan", &[0, 0], &[1, -2]), fin(3));
}

#[test]
fn last_letter_requires_common_prefix() {
    assert_eq!(eval("last_letter", &[0, 1, 2], &[0, 1, 5]), fin(3));
    assert_eq!(
        eval("last_letter", &[0, 1, 2], &[0, 9, 2]),
        ExtendedCost::Infinite
    );
    assert_eq!(eval("last_letter", &[4], &[1]), fin(3));
}

#[test]
fn threshold_hamming_ignores_small_differences() {
    assert_eq!(eval("threshold_hamming:1", &[0, 0, 0], &[1, 2, -3]), fin(2));
    assert_eq!(eval("threshold_hamming:1/2", &[0, 0], &[1, 0]), fin(1));
}

#[test]
fn weighted_edit_costs() {
    // Substitution at 3 is dearer than a delete plus an insert at 1 each.
    assert_eq!(eval("edit:3,1", &[1], &[2]), fin(2));
    assert_eq!(eval("edit:1,5", &[1, 2], &[1]), fin(5));
}

#[test]
fn metric_names_round_trip() {
    for name in [
        "last_letter",
        "hamming",
        "threshold_hamming:3/2",
        "manhattan",
        "edit",
        "edit:2,1",
        "dtw",
    ] {
        let k: MetricKind = name.parse().unwrap();
        assert_eq!(k.to_string(), name);
    }
    assert!("cosine".parse::<MetricKind>().is_err());
    assert!("threshold_hamming:-1".parse::<MetricKind>().is_err());
}

#[test]
fn raa_json_round_trip() {
    for name in [
        "last_letter",
        "hamming",
        "threshold_hamming:2",
        "manhattan",
        "edit",
        "dtw",
    ] {
        let raa = build_metric(&name.parse().unwrap());
        let back = Raa::from_json(&raa.to_json()).unwrap();
        assert_eq!(back, raa, "{name}");
    }
}

#[test]
fn raa_json_rejects_missing_move() {
    let text = r#"{"kind":"raa","states":1,"registers":0,"initial":0,"accepting":[0],
        "transitions":[{"from":0,"to":0,"guard":[],"assign":[]}]}"#;
    assert!(Raa::from_json(text).is_err());
}

#[test]
fn edit_and_dtw_match_dynamic_programming_on_small_grid() {
    let letters = [0, 1, 2];
    let edit = exhaustive(
        &build_metric(&MetricKind::edit()),
        &letters,
        4,
        oracles::LevenshteinColumns::new,
    );
    assert!(edit.mismatches.is_empty(), "{:?}", edit.mismatches);
    let dtw = exhaustive(
        &build_metric(&MetricKind::Dtw),
        &letters,
        4,
        oracles::DtwColumns::new,
    );
    assert!(dtw.mismatches.is_empty(), "{:?}", dtw.mismatches);
    assert_eq!(edit.pairs, 121 * 121);
}

#[test]
fn column_oracles_agree_with_direct_tables() {
    use common::oracles::ColumnOracle;
    let seqs = oracles::all_sequences(&[0, 1, 3], 3);
    for v in &seqs {
        for w in &seqs {
            let mut lev = oracles::LevenshteinColumns::new(v);
            let mut dtw = oracles::DtwColumns::new(v);
            for &a in w {
                lev.push(a);
                dtw.push(a);
            }
            assert_eq!(lev.value(), Some(oracles::levenshtein(v, w)));
            assert_eq!(dtw.value(), oracles::dtw(v, w));
        }
    }
}

#[test]
fn general_engine_agrees_with_column_engine() {
    let seqs = oracles::all_sequences(&[0, 2], 3);
    for kind in ["edit", "dtw", "last_letter", "threshold_hamming:1"] {
        let raa = build_metric(&kind.parse().unwrap());
        for v in &seqs {
            for w in &seqs {
                let (v, w) = (ints(v), ints(w));
                assert_eq!(
                    evaluate(&raa, &v, &w),
                    evaluate_general(&raa, &v, &w),
                    "{kind} {v:?} {w:?}"
                );
            }
        }
    }
}

fn increasing() -> Dra {
    // Strictly increasing sequences: remember the last letter, require growth.
    Dra::with_accepting(
        2,
        1,
        0,
        &[1],
        vec![
            Transition::new(0, Guard::top(), Assignment::single(0, Operand::Curr), 1),
            Transition::new(
                1,
                Guard::new(vec![Atom::new(Operand::Reg(0), CmpOp::Lt, Operand::Curr)]),
                Assignment::single(0, Operand::Curr),
                1,
            ),
        ],
    )
    .unwrap()
}

#[test]
fn restriction_to_universal_languages_is_transparent() {
    let seqs = oracles::all_sequences(&[0, 1, 3], 3);
    for kind in ["edit", "hamming", "dtw"] {
        let raa = build_metric(&kind.parse().unwrap());
        let r = restrict_metric(&raa, &universal(), &universal());
        for v in seqs.iter().filter(|s| !s.is_empty()) {
            for w in seqs.iter().filter(|s| !s.is_empty()) {
                let (v, w) = (ints(v), ints(w));
                assert_eq!(
                    evaluate(&r, &v, &w),
                    evaluate(&raa, &v, &w),
                    "{kind} {v:?} {w:?}"
                );
            }
        }
    }
}

#[test]
fn restriction_to_empty_language_is_infinite() {
    let raa = build_metric(&MetricKind::Hamming);
    let r = restrict_metric(&raa, &universal(), &empty_language());
    assert_eq!(
        evaluate(&r, &ints(&[1, 2]), &ints(&[1, 2])),
        ExtendedCost::Infinite
    );
}

#[test]
fn restriction_to_increasing_sequences() {
    let raa = build_metric(&MetricKind::edit());
    let r = restrict_metric(&raa, &universal(), &increasing());
    assert_eq!(
        evaluate(&r, &ints(&[1, 2]), &ints(&[2, 1])),
        ExtendedCost::Infinite
    );
    assert_eq!(evaluate(&r, &ints(&[1, 2]), &ints(&[1, 3])), fin(1));
    assert_eq!(evaluate(&r, &ints(&[2, 1]), &ints(&[1, 3])), fin(2));
}

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..5).prop_map(|(n, d)| Rational::new(n, d))
}

fn seq(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), len)
}

fn pair() -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
    (1usize..7).prop_flat_map(|n| (seq(n..n + 1), seq(n..n + 1)))
}

fn near_pair() -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
    // Shares every letter but the last with probability one half.
    (pair(), any::<bool>()).prop_map(|((v, mut w), share)| {
        if share {
            let n = v.len();
            w[..n - 1].clone_from_slice(&v[..n - 1]);
        }
        (v, w)
    })
}

fn matches(got: ExtendedCost, want: Option<Rational>) -> bool {
    got == want.into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn hamming_closed_form((v, w) in pair()) {
        prop_assert!(matches(evaluate(&build_metric(&MetricKind::Hamming), &v, &w), oracles::hamming(&v, &w)));
    }

    #[test]
    fn manhattan_closed_form((v, w) in pair()) {
        prop_assert!(matches(evaluate(&build_metric(&MetricKind::Manhattan), &v, &w), oracles::manhattan(&v, &w)));
    }

    #[test]
    fn last_letter_closed_form((v, w) in near_pair()) {
        prop_assert!(matches(evaluate(&build_metric(&MetricKind::LastLetter), &v, &w), oracles::last_letter(&v, &w)));
    }

    #[test]
    fn threshold_hamming_closed_form((v, w) in pair(), c in (0i64..20, 1i64..4)) {
        let c = Rational::new(c.0, c.1);
        let raa = build_metric(&MetricKind::ThresholdHamming(c.clone()));
        prop_assert!(matches(evaluate(&raa, &v, &w), oracles::threshold_hamming(&v, &w, &c)));
    }

    #[test]
    fn unequal_lengths_are_infinite_for_pointwise_metrics(v in seq(1..5), w in seq(5..7)) {
        for kind in [MetricKind::Hamming, MetricKind::Manhattan, MetricKind::LastLetter] {
            prop_assert_eq!(evaluate(&build_metric(&kind), &v, &w), ExtendedCost::Infinite);
        }
    }

    #[test]
    fn symmetric_and_nonnegative(v in seq(0..5), w in seq(0..5)) {
        for kind in [MetricKind::Hamming, MetricKind::Manhattan, MetricKind::edit(), MetricKind::Dtw] {
            let raa = build_metric(&kind);
            let there = evaluate(&raa, &v, &w);
            prop_assert_eq!(&there, &evaluate(&raa, &w, &v));
            if let ExtendedCost::Finite(x) = there {
                prop_assert!(!x.is_negative());
            }
        }
    }
}
