//! Sample, learn and certify with robustness checks, for every metric on S1, S2
//! and S9 with the ground truth as the oracle.
//!
//! `cargo run --release --example pipeline`

use std::time::{Duration, Instant};

use regrobust::bench::{build_sampler, ground_truth, BenchmarkId};
use regrobust::certify::{extraction_loop, Budget, CertificationParams, Learner, OracleHandle};
use regrobust::learn::{SearchConfig, SearchSpace};
use regrobust::metric::MetricKind;
use regrobust::Rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let metrics = ["hamming", "manhattan", "last_letter", "threshold_hamming:1", "edit", "dtw"];
    for id in [BenchmarkId::S1, BenchmarkId::S2, BenchmarkId::S9] {
        let states = if id == BenchmarkId::S9 { 4 } else { 2 };
        let registers = if id == BenchmarkId::S9 { 3 } else { 1 };
        for name in metrics {
            let metric: MetricKind = name.parse()?;
            let started = Instant::now();
            let mut oracle = OracleHandle::from_dra(ground_truth(id));
            let mut sampler = build_sampler(id, 0.2, 8, 17)?;
            let params = CertificationParams::standard(Rational::new(1, 2), metric)?;
            let learner = Learner::LocalSearch {
                space: SearchSpace::new(states, registers, vec![])?,
                config: SearchConfig { max_iterations: 10_000, restarts: 2, ..Default::default() },
            };
            let budget = Budget { max_rounds: 3, max_time: Duration::from_secs(300), ..Default::default() };
            let line = match extraction_loop(&learner, &mut oracle, &mut sampler, &params, &budget) {
                Ok(out) => format!("{} after {} refinements", out.result.outcome.name(), out.refinements),
                Err(e) => e.to_string(),
            };
            println!("{id} {name:>20}: {line} ({:?})", started.elapsed());
        }
    }
    Ok(())
}
