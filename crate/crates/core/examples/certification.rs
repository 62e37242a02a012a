//! Statistical certification of a surrogate automaton against an oracle.
//!
//! Three oracles are tried against the ground truth for S2 (strictly
//! decreasing sequences): the automaton itself, a classifier for a different
//! language, and a classifier that is perfectly accurate but fragile
//! because the samples sit a hundredth away from the decision boundary.
//!
//! `cargo run --release --example certification`

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regrobust::bench::{build_sampler, ground_truth, BenchmarkId};
use regrobust::certify::{
    accept_bounds, d_max, run_certification, sample_size, CertificationParams, FnSource, OracleHandle,
};
use regrobust::metric::MetricKind;
use regrobust::Rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let twentieth = Rational::new(1, 20);
    let n = sample_size(&twentieth, &twentieth)?;
    println!("n = {n}, d_max = {}", d_max(n, &Rational::new(19, 20)));
    println!("{:?}", accept_bounds(n, n / 2, n / 2, 0.05, (0.025, 0.025)));

    let params = CertificationParams::standard(Rational::one(), MetricKind::LastLetter)?;
    let surrogate = ground_truth(BenchmarkId::S2);

    for oracle_id in [BenchmarkId::S2, BenchmarkId::S4] {
        let mut oracle = OracleHandle::from_dra(ground_truth(oracle_id));
        let mut sampler = build_sampler(BenchmarkId::S2, 0.2, 10, 3)?;
        let res = run_certification(&mut oracle, &surrogate, &mut sampler, &params)?;
        let mut summary = res.to_json();
        if let Some(c) = summary.get_mut("counterexamples").and_then(|c| c.as_array_mut()) {
            c.truncate(3);
        }
        println!("oracle {oracle_id}: {summary}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut tight = FnSource(move || {
        let start = Rational::from_integer(rng.random_range(0..10));
        let bump = if rng.random_bool(0.5) { Rational::new(1, 100) } else { Rational::new(-1, 100) };
        let next = &start + &bump;
        Some(vec![start, next])
    });
    let mut oracle = OracleHandle::from_dra(ground_truth(BenchmarkId::S2));
    let res = run_certification(&mut oracle, &surrogate, &mut tight, &params)?;
    println!("fragile: {}", res.to_json());
    Ok(())
}
