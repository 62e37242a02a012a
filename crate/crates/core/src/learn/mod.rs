//! Learning automata from labelled samples: the sample-set format, the
//! shared guard lattice, constraint-based synthesis and local search.

pub mod lattice;
pub mod localsearch;
pub mod sample;
pub mod smt;
pub mod solver;

pub use sample::{score, validate_consistency, SampleError, SampleSet, ScoreError};
pub use smt::{synthesize, SmtError, SynthesisConfig, SynthesisParams, Synthesized};
pub use solver::{SolverCommand, SolverError};
pub use localsearch::{hill_climb, op_delta, op_f, search, CatalogEntry, SearchConfig, SearchError, SearchOutcome, SearchSpace};
