//! Deciding whether every sequence within distance `delta` of `v` receives
//! the same label as `v`, and producing a nearby sequence that flips the
//! label when one exists.
//!
//! The metric is fixed to `v` on head 1 and paired with the automaton that
//! must accept the perturbed sequence. A least-cost accepting run of that
//! product is found by Dijkstra over configurations whose register values
//! are constants displaced by infinitesimals; the standard part of the cost
//! is the infimum over real sequences following the same order pattern.
//! The optimum is then pushed off any tight strict guard to obtain a
//! concrete witness, which is re-verified by execution.

pub mod graph;
pub mod hyper;
pub mod project;
pub mod refine;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::automata::dra::{Dra, RunError};
use crate::automata::ops::{complement, complete, split_disequalities};
use crate::metric::{evaluate, ExtendedCost, Raa};
use crate::rational::Rational;

pub use graph::{shortest_path, CoverabilityGraph, Edge, GraphPath, Vertex};
pub use hyper::Hyper;
pub use project::{closure, product, project_and_bound, BoundedProjectedRaa, ProductRaa};
pub use refine::{refine_witness, PathConstraintSystem};

pub const DEFAULT_MAX_VERTICES: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RobustError {
    #[error("delta must be positive, got {0}")]
    NonPositiveDelta(Rational),
    #[error("the reference sequence is empty")]
    EmptySequence,
    #[error("transition {transition} compares two non-constant operands with an offset")]
    UnsupportedOffset { transition: usize },
    #[error("closure needs a guard without disequalities")]
    DisequalityPresent,
    #[error("graph exceeded {limit} vertices")]
    VertexLimit { limit: usize },
    #[error("could not move the closed optimum into the strict guards")]
    RefinementFailed,
    #[error(transparent)]
    Run(#[from] RunError),
}

/// Which label change counts as a flip.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// The opposite of the label of `v`.
    #[default]
    Auto,
    FlipToReject,
    FlipToAccept,
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Side::Auto),
            "flip-to-reject" | "reject" => Ok(Side::FlipToReject),
            "flip-to-accept" | "accept" => Ok(Side::FlipToAccept),
            _ => Err(format!(
                "unknown side `{s}` (expected auto, flip-to-reject or flip-to-accept)"
            )),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Auto => "auto",
            Side::FlipToReject => "flip-to-reject",
            Side::FlipToAccept => "flip-to-accept",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RobustnessQuery<'a> {
    pub dra: &'a Dra,
    pub v: &'a [Rational],
    pub metric: &'a Raa,
    pub delta: Rational,
    pub side: Side,
    pub max_vertices: usize,
}

impl<'a> RobustnessQuery<'a> {
    pub fn new(dra: &'a Dra, v: &'a [Rational], metric: &'a Raa, delta: Rational) -> Self {
        RobustnessQuery {
            dra,
            v,
            metric,
            delta,
            side: Side::Auto,
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub w: Vec<Rational>,
    /// Distance from `v` to `w`.
    pub cost: Rational,
    /// The least-weight path value, an infimum over flipping sequences.
    pub closed_optimum: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobustnessVerdict {
    pub robust: bool,
    pub min_flip_cost: ExtendedCost,
    pub witness: Option<Witness>,
    pub graph_vertices: usize,
}

impl RobustnessVerdict {
    /// `{"robust":…,"min_flip_cost":"n/d"|null,"witness":[…]|null,"graph_vertices":N}`
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "robust": self.robust,
            "min_flip_cost": self.min_flip_cost,
            "witness": self.witness.as_ref().map(|w| &w.w),
            "witness_cost": self.witness.as_ref().map(|w| &w.cost),
            "graph_vertices": self.graph_vertices,
        })
    }
}

/// Whether the perturbed sequence must be accepted by `dra`.
fn wants_accept(dra: &Dra, v: &[Rational], side: Side) -> Result<bool, RunError> {
    Ok(match side {
        Side::Auto => !dra.accepts(v)?,
        Side::FlipToReject => false,
        Side::FlipToAccept => true,
    })
}

fn flip_target(dra: &Dra, accept: bool) -> Dra {
    let split = split_disequalities(dra);
    if accept {
        complete(&split)
    } else {
        complement(&split)
    }
}

struct Search {
    verdict_cost: ExtendedCost,
    vertices: usize,
    system: Option<PathConstraintSystem>,
}

fn search(
    dra: &Dra,
    v: &[Rational],
    metric: &Raa,
    delta: Option<&Rational>,
    side: Side,
    max_vertices: usize,
) -> Result<(Search, bool), RobustError> {
    if v.is_empty() {
        return Err(RobustError::EmptySequence);
    }
    let accept = wants_accept(dra, v, side)?;
    let target = flip_target(dra, accept);
    let bp = project_and_bound(metric, v, delta)?;
    let prod = product(&bp, &target);
    let mut g = CoverabilityGraph::new(&prod, max_vertices);
    let path = shortest_path(&mut g)?;
    let system = match &path {
        Some(p) => Some(PathConstraintSystem::from_path(&g, p)?),
        None => None,
    };
    let verdict_cost = path.map(|p| p.weight).into();
    Ok((
        Search {
            verdict_cost,
            vertices: g.vertices.len(),
            system,
        },
        accept,
    ))
}

/// Decides `delta`-robustness of `dra` at `v`.
pub fn check_robustness(q: &RobustnessQuery<'_>) -> Result<RobustnessVerdict, RobustError> {
    if !q.delta.is_positive() {
        return Err(RobustError::NonPositiveDelta(q.delta.clone()));
    }
    let (found, accept) = search(q.dra, q.v, q.metric, Some(&q.delta), q.side, q.max_vertices)?;
    let robust = !found.verdict_cost.below(&q.delta);
    let mut verdict = RobustnessVerdict {
        robust,
        min_flip_cost: found.verdict_cost.clone(),
        witness: None,
        graph_vertices: found.vertices,
    };
    if robust {
        return Ok(verdict);
    }
    let sys = found.system.expect("a path exists below delta");
    let flips = |w: &[Rational]| -> bool {
        matches!(q.dra.accepts(w), Ok(a) if a == accept)
            && evaluate(q.metric, q.v, w).below(&q.delta)
    };
    let w = refine_witness(&sys, &q.delta, flips)?;
    let cost = evaluate(q.metric, q.v, &w)
        .finite()
        .cloned()
        .expect("verified finite");
    verdict.witness = Some(Witness {
        w,
        cost,
        closed_optimum: found.verdict_cost.finite().cloned().unwrap(),
    });
    Ok(verdict)
}

/// Infimum of the distance from `v` to any sequence with the other label
/// (or the label selected by `side`).
pub fn min_flip_cost(dra: &Dra, v: &[Rational], metric: &Raa) -> Result<ExtendedCost, RobustError> {
    min_flip_cost_with(dra, v, metric, Side::Auto, DEFAULT_MAX_VERTICES)
}

pub fn min_flip_cost_with(
    dra: &Dra,
    v: &[Rational],
    metric: &Raa,
    side: Side,
    max_vertices: usize,
) -> Result<ExtendedCost, RobustError> {
    Ok(search(dra, v, metric, None, side, max_vertices)?
        .0
        .verdict_cost)
}
