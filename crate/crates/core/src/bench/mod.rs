//! Benchmark languages and the samplers that draw labelled data from them.

pub mod fixtures;
pub mod sampler;

pub use fixtures::{ground_truth, BenchmarkId, UnknownBenchmark};
pub use sampler::{build_sampler, generate, generate_bounded, MarkovSampler, SamplerError};
