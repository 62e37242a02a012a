//! Hill climbing over automata with a fixed shape, scored by the fraction of
//! correctly labelled samples.
//!
//! `cargo run --release --example learn_localsearch -- S3`

use std::time::Duration;

use regrobust::bench::{build_sampler, generate, BenchmarkId};
use regrobust::learn::{score, search, SearchConfig, SearchSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let id: BenchmarkId = std::env::args().nth(1).unwrap_or_else(|| "S3".into()).parse()?;
    let mut sampler = build_sampler(id, 0.3, 20, 42)?;
    let samples = generate(&mut sampler, 250, 250)?;

    let space = SearchSpace::new(2, 1, vec![])?;
    let config = SearchConfig {
        max_time: Duration::from_secs(120),
        max_iterations: 100_000,
        restarts: 5,
        seed: 7,
    };
    let outcome = search(&samples, &space, &config)?;
    for (i, r) in outcome.restarts.iter().enumerate() {
        println!(
            "restart {i}: score {} ({:.4}) after {} iterations, {} improvements",
            r.score,
            r.score.to_f64(),
            r.iterations,
            r.accepted_mutations
        );
    }
    let best = &outcome.best;
    assert_eq!(score(&best.dra, &samples)?, best.score);
    println!("{}", best.dra.to_json());
    Ok(())
}
