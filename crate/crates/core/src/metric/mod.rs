//! Two-head register automata with an accumulator, their least-cost
//! evaluation and the standard distance constructions.

pub mod eval;
pub mod metrics;
pub mod raa;
pub mod restrict;

pub use eval::{evaluate, ColumnEvaluator};
pub use metrics::{build_metric, MetricError, MetricKind};
pub use raa::{AccUpdate, ExtendedCost, Move, Raa, RaaTransition};
pub use restrict::restrict_metric;
