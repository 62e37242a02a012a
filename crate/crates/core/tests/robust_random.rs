mod common;

use common::brute::{min_flip, Pointwise};
use common::oracles;
use common::random_dra::random_dra;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regrobust::automata::check_determinism;
use regrobust::metric::{build_metric, ExtendedCost, MetricKind};
use regrobust::robust::{check_robustness, min_flip_cost, RobustnessQuery};
use regrobust::Rational;

fn closed_form(kind: Pointwise, v: &[Rational], w: &[Rational]) -> Option<Rational> {
    match kind {
        Pointwise::Hamming => oracles::hamming(v, w),
        Pointwise::Manhattan => oracles::manhattan(v, w),
        Pointwise::LastLetter => oracles::last_letter(v, w),
    }
}

#[test]
fn agrees_with_exhaustive_search_on_random_automata() {
    let metrics = [
        (Pointwise::Hamming, MetricKind::Hamming),
        (Pointwise::LastLetter, MetricKind::LastLetter),
        (Pointwise::Manhattan, MetricKind::Manhattan),
    ];
    let mut nonrobust = 0;
    for seed in 1000..1015u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dra = random_dra(&mut rng, 3, 2, &[1, 2]);
        assert!(check_determinism(&dra).is_empty(), "seed {seed}");
        let len = rng.random_range(1..=4);
        let v: Vec<Rational> = (0..len)
            .map(|_| Rational::from_integer(rng.random_range(0..4)))
            .collect();
        for (kind, mk) in &metrics {
            let metric = build_metric(mk);
            let expected = min_flip(&dra, &v, *kind).map(|(c, _)| c);
            let got = min_flip_cost(&dra, &v, &metric).unwrap();
            assert_eq!(
                got,
                ExtendedCost::from(expected.clone()),
                "seed {seed} {mk} v={v:?}\n{}",
                dra.to_json()
            );
            let Some(m) = expected else { continue };
            if m.is_positive() {
                let at =
                    check_robustness(&RobustnessQuery::new(&dra, &v, &metric, m.clone())).unwrap();
                assert!(at.robust, "seed {seed} {mk}");
            }
            let delta = &m + &Rational::new(1, 2);
            let verdict =
                check_robustness(&RobustnessQuery::new(&dra, &v, &metric, delta.clone())).unwrap();
            assert!(!verdict.robust);
            let w = verdict.witness.unwrap().w;
            assert_ne!(
                dra.accepts(&w).unwrap(),
                dra.accepts(&v).unwrap(),
                "seed {seed} {mk}"
            );
            let cost = closed_form(*kind, &v, &w).expect("finite distance");
            assert!(cost < delta, "seed {seed} {mk} cost {cost:?}");
            nonrobust += 1;
        }
    }
    assert!(nonrobust > 5);
}
