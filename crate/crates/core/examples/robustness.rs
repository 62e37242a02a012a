//! Local robustness of the higher-highs/higher-lows automaton at the
//! sequence (0,-1,5,3,7,9,6,8) under the last-letter metric.
//!
//! The label flips once the last letter can drop to the last trough 3, so
//! the minimum flip cost is 5 and the automaton is robust exactly for
//! radii up to 5.
//!
//! `cargo run --release --example robustness`

use std::time::Instant;

use regrobust::bench::{ground_truth, BenchmarkId};
use regrobust::metric::{build_metric, MetricKind};
use regrobust::rational::{ints, Rational};
use regrobust::robust::{check_robustness, min_flip_cost, RobustnessQuery};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dra = ground_truth(BenchmarkId::S9);
    let v = ints(&[0, -1, 5, 3, 7, 9, 6, 8]);
    let metric = build_metric(&MetricKind::LastLetter);

    println!("accepted: {}", dra.accepts(&v)?);
    println!("min flip cost: {}", serde_json::to_string(&min_flip_cost(&dra, &v, &metric)?)?);

    for delta in ["5", "51/10"] {
        let started = Instant::now();
        let verdict = check_robustness(&RobustnessQuery::new(&dra, &v, &metric, delta.parse()?))?;
        println!("delta {delta}: {} in {:?}", verdict.to_json(), started.elapsed());
    }

    let ladder: Vec<String> = (1..=10)
        .map(|d| {
            let q = RobustnessQuery::new(&dra, &v, &metric, Rational::from_integer(d));
            let robust = check_robustness(&q).map(|x| x.robust).unwrap_or(false);
            format!("{d}:{}", if robust { "R" } else { "N" })
        })
        .collect();
    println!("ladder {}", ladder.join(" "));

    let hamming = build_metric(&MetricKind::Hamming);
    let q = RobustnessQuery::new(&dra, &v, &hamming, Rational::from_integer(2));
    println!("hamming, delta 2: {}", check_robustness(&q)?.to_json());
    Ok(())
}
