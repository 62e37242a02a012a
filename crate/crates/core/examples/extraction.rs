//! The full loop: learn a surrogate from oracle-labelled samples, certify
//! it, add counterexamples and learn again until the surrogate is accepted
//! or the oracle is shown not to be robust.
//!
//! `cargo run --release --example extraction -- S2 last_letter 1`

use std::time::Duration;

use regrobust::bench::{build_sampler, ground_truth, BenchmarkId};
use regrobust::certify::{extraction_loop, Budget, CertificationParams, Learner, OracleHandle};
use regrobust::learn::{SearchConfig, SearchSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let id: BenchmarkId = args.next().unwrap_or_else(|| "S2".into()).parse()?;
    let metric = args.next().unwrap_or_else(|| "last_letter".into()).parse()?;
    let delta = args.next().unwrap_or_else(|| "1".into()).parse()?;

    let mut oracle = OracleHandle::from_dra(ground_truth(id));
    let mut sampler = build_sampler(id, 0.2, 10, 11)?;
    let params = CertificationParams::standard(delta, metric)?;
    let learner = Learner::LocalSearch {
        space: SearchSpace::new(2, 1, vec![])?,
        config: SearchConfig {
            max_iterations: 20_000,
            restarts: 3,
            ..Default::default()
        },
    };
    let budget = Budget {
        max_rounds: 6,
        max_time: Duration::from_secs(600),
        ..Default::default()
    };
    let out = extraction_loop(&learner, &mut oracle, &mut sampler, &params, &budget)?;
    println!(
        "{} after {} refinements, {} samples, {} oracle queries, {:?}",
        out.result.outcome.name(),
        out.refinements,
        out.samples.len(),
        oracle.queries(),
        out.elapsed
    );
    println!("{}", out.result.to_json());
    println!("{}", out.dra.to_json());
    Ok(())
}
