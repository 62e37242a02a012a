//! Deterministic register automata: guards, runs, determinism checking,
//! completion, complement and JSON documents.

pub mod dra;
pub mod guard;
pub mod json;
pub mod ops;
pub mod order;

pub use dra::{
    check_determinism, run, AutomatonError, Configuration, DeterminismViolation, Dra, RunError,
    RunResult, Step, Transition,
};
pub use guard::{Assignment, Atom, CmpOp, Guard, Operand, Value};
pub use json::{parse, serialize, ParseError};
pub use ops::{complement, complete, mirror, split_disequalities, universal};
