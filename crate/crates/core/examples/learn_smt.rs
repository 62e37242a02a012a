//! Passive learning with an SMT solver: the smallest automaton, by states,
//! registers and constants, that is consistent with a sample set.
//!
//! Needs `z3` on the path, or a command line in `REGROBUST_SOLVER`.
//!
//! `cargo run --release --example learn_smt -- L1`

use std::time::{Duration, Instant};

use regrobust::automata::check_determinism;
use regrobust::bench::{build_sampler, generate, BenchmarkId};
use regrobust::learn::{synthesize, validate_consistency, SynthesisConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let id: BenchmarkId = std::env::args().nth(1).unwrap_or_else(|| "L1".into()).parse()?;
    let mut sampler = build_sampler(id, 0.3, 10, 5)?;
    let samples = generate(&mut sampler, 25, 25)?;

    let config = SynthesisConfig::new(3, 2, 1, Duration::from_secs(60))?;
    println!("solver: {}", config.solver);
    let started = Instant::now();
    let found = synthesize(&samples, &config)?;
    println!(
        "{} states, {} registers, {} constants after {} candidates in {:?}",
        found.params.states,
        found.params.registers,
        found.params.num_constants(),
        found.candidates_tried,
        started.elapsed()
    );
    println!("consistent: {}", validate_consistency(&found.dra, &samples));
    println!("deterministic: {}", check_determinism(&found.dra).is_empty());
    println!("{}", found.dra.to_json());
    Ok(())
}
