//! Statistical certification of a learned automaton against a black-box
//! oracle, and the learn/certify/refine loop built on top of it.
//!
//! [`run_certification`] draws `n = sample_size(epsilon, gamma)` sequences.
//! A sequence the oracle and the automaton label differently is collected as
//! a counterexample and more than `d_max(n, p)` of them end the run with
//! [`Outcome::Refine`]. A sequence they agree on must be `delta`-stable for
//! the automaton. When it is not, the flipping neighbour is labelled by the
//! oracle: if the oracle keeps the label the neighbour is a counterexample
//! for the learner, otherwise the pair shows the oracle itself is not robust.

pub mod oracle;
pub mod stats;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde_json::json;

use crate::automata::dra::{Dra, RunError};
use crate::bench::MarkovSampler;
use crate::learn::localsearch::{search, SearchConfig, SearchError, SearchSpace};
use crate::learn::sample::SampleSet;
use crate::learn::smt::{synthesize, SmtError, SynthesisConfig};
use crate::metric::{build_metric, evaluate, MetricKind, Raa};
use crate::rational::Rational;
use crate::robust::{check_robustness, RobustError, RobustnessQuery, DEFAULT_MAX_VERTICES};

pub use oracle::{
    serve, serve_tcp, DraOracle, FnOracle, LineOracle, Oracle, OracleError, OracleHandle, ServeStats,
    DEFAULT_TIMEOUT, PROTOCOL,
};
pub use stats::{accept_bounds, d_max, sample_size, significant, AcceptBounds, StatsError};

#[derive(Debug, thiserror::Error)]
pub enum CertifyError {
    #[error("invalid certification parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("the sampler ran dry after {drawn} sequences")]
    SamplerExhausted { drawn: u64 },
    #[error(transparent)]
    Robust(#[from] RobustError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Inputs of a certification run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificationParams {
    /// Target agreement between oracle and automaton.
    pub p: Rational,
    pub epsilon: Rational,
    pub gamma: Rational,
    pub delta: Rational,
    pub metric: MetricKind,
    pub eta: Rational,
    pub eta_split: (Rational, Rational),
    /// Skip the stability check for sequences already found stable.
    pub stability_dedup: bool,
    pub max_vertices: usize,
}

impl CertificationParams {
    /// `eta = 0.05`, split evenly between the two classes.
    pub fn new(
        p: Rational,
        epsilon: Rational,
        gamma: Rational,
        delta: Rational,
        metric: MetricKind,
    ) -> Result<Self, CertifyError> {
        let eta = Rational::new(1, 20);
        let half = &eta * &Rational::new(1, 2);
        let params = CertificationParams {
            p,
            epsilon,
            gamma,
            delta,
            metric,
            eta,
            eta_split: (half.clone(), half),
            stability_dedup: false,
            max_vertices: DEFAULT_MAX_VERTICES,
        };
        params.validate()?;
        Ok(params)
    }

    /// `p = 0.95`, `epsilon = gamma = 0.05`.
    pub fn standard(delta: Rational, metric: MetricKind) -> Result<Self, CertifyError> {
        let twentieth = Rational::new(1, 20);
        Self::new(
            Rational::new(19, 20),
            twentieth.clone(),
            twentieth,
            delta,
            metric,
        )
    }

    /// Replaces `eta` and splits it evenly.
    pub fn with_eta(mut self, eta: Rational) -> Result<Self, CertifyError> {
        let half = &eta * &Rational::new(1, 2);
        self.eta = eta;
        self.eta_split = (half.clone(), half);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CertifyError> {
        let unit = |name: &str, x: &Rational| {
            if x.is_positive() && x < &Rational::one() {
                Ok(())
            } else {
                Err(CertifyError::Params(format!("{name} must lie in (0, 1), got {x}")))
            }
        };
        unit("p", &self.p)?;
        unit("epsilon", &self.epsilon)?;
        unit("gamma", &self.gamma)?;
        unit("eta", &self.eta)?;
        unit("eta+", &self.eta_split.0)?;
        unit("eta-", &self.eta_split.1)?;
        // Equality is allowed: the usual setting p = 0.95, gamma = 0.05 sits on it.
        if self.gamma > &Rational::one() - &self.p {
            return Err(CertifyError::Params(format!(
                "gamma ({}) must not exceed 1 - p ({})",
                self.gamma,
                &Rational::one() - &self.p
            )));
        }
        if &self.eta_split.0 + &self.eta_split.1 != self.eta {
            return Err(CertifyError::Params("eta+ + eta- must equal eta".into()));
        }
        if !self.delta.is_positive() {
            return Err(CertifyError::Params(format!("delta must be positive, got {}", self.delta)));
        }
        Ok(())
    }

    pub fn sample_size(&self) -> u64 {
        sample_size(&self.epsilon, &self.gamma).expect("validated")
    }

    pub fn d_max(&self) -> u64 {
        d_max(self.sample_size(), &self.p)
    }
}

/// A source of sequences drawn from the certification distribution.
pub trait SequenceSource {
    fn next_sequence(&mut self) -> Option<Vec<Rational>>;
}

impl SequenceSource for MarkovSampler {
    fn next_sequence(&mut self) -> Option<Vec<Rational>> {
        Some(self.walk())
    }
}

/// Adapts a closure into a [`SequenceSource`].
pub struct FnSource<F>(pub F);

impl<F: FnMut() -> Option<Vec<Rational>>> SequenceSource for FnSource<F> {
    fn next_sequence(&mut self) -> Option<Vec<Rational>> {
        (self.0)()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabPredicateResult {
    pub stable: bool,
    /// A sequence closer than `delta` with the other label, checked by execution.
    pub flip_witness: Option<Vec<Rational>>,
    pub distance: Option<Rational>,
}

/// Whether every sequence closer than `delta` to `w` gets the label of `w`.
pub fn stability_check(
    dra: &Dra,
    w: &[Rational],
    metric: &Raa,
    delta: &Rational,
) -> Result<StabPredicateResult, RobustError> {
    stability_check_bounded(dra, w, metric, delta, DEFAULT_MAX_VERTICES)
}

fn stability_check_bounded(
    dra: &Dra,
    w: &[Rational],
    metric: &Raa,
    delta: &Rational,
    max_vertices: usize,
) -> Result<StabPredicateResult, RobustError> {
    let mut q = RobustnessQuery::new(dra, w, metric, delta.clone());
    q.max_vertices = max_vertices;
    let verdict = check_robustness(&q)?;
    let witness = verdict.witness.map(|wit| (wit.w, wit.cost));
    Ok(StabPredicateResult {
        stable: verdict.robust,
        distance: witness.as_ref().map(|(_, c)| c.clone()),
        flip_witness: witness.map(|(w, _)| w),
    })
}

/// How a certification run ended.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Accept {
        n: u64,
        /// Agreed samples the automaton accepts.
        m_plus: u64,
        /// Agreed samples the automaton rejects.
        m_minus: u64,
        agreement_lb: Rational,
        bounds: AcceptBounds,
    },
    /// Sequences with the oracle's label, for the learner.
    Refine { counterexamples: Vec<(Vec<Rational>, bool)> },
    /// The oracle labels `w` and `cex` differently although they are closer than `delta`.
    NonRobust {
        w: Vec<Rational>,
        cex: Vec<Rational>,
        distance: Rational,
    },
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Accept { .. } => "accept",
            Outcome::Refine { .. } => "refine",
            Outcome::NonRobust { .. } => "non-robust",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertResult {
    pub outcome: Outcome,
    pub drawn: u64,
    pub disagreements: u64,
    pub stability_checks: u64,
    /// Agreed samples found stable, in draw order.
    pub certified: Vec<Vec<Rational>>,
}

impl CertResult {
    /// Bounds are decimal strings with 12 significant digits.
    pub fn to_json(&self) -> serde_json::Value {
        let mut out = match &self.outcome {
            Outcome::Accept {
                n,
                m_plus,
                m_minus,
                agreement_lb,
                bounds,
            } => json!({
                "outcome": "accept",
                "n": n,
                "m_plus": m_plus,
                "m_minus": m_minus,
                "agreement_lb": agreement_lb,
                "lambda_ub": significant(bounds.lambda_ub),
                "theta_plus_ub": bounds.theta_plus_ub.map(significant),
                "theta_minus_ub": bounds.theta_minus_ub.map(significant),
            }),
            Outcome::Refine { counterexamples } => json!({
                "outcome": "refine",
                "counterexamples": counterexamples
                    .iter()
                    .map(|(s, l)| json!({ "seq": s, "label": u8::from(*l) }))
                    .collect::<Vec<_>>(),
            }),
            Outcome::NonRobust { w, cex, distance } => json!({
                "outcome": "non-robust",
                "w": w,
                "cex": cex,
                "distance": distance,
            }),
        };
        out["drawn"] = json!(self.drawn);
        out["disagreements"] = json!(self.disagreements);
        out["stability_checks"] = json!(self.stability_checks);
        out
    }
}

/// Certifies `dra` against `oracle` on sequences from `sampler`, processed
/// strictly in draw order.
pub fn run_certification(
    oracle: &mut OracleHandle,
    dra: &Dra,
    sampler: &mut dyn SequenceSource,
    params: &CertificationParams,
) -> Result<CertResult, CertifyError> {
    params.validate()?;
    let metric = build_metric(&params.metric);
    let n = params.sample_size();
    let limit = params.d_max();
    let mut cexs: Vec<(Vec<Rational>, bool)> = Vec::new();
    let mut seen_stable: HashSet<Vec<Rational>> = HashSet::new();
    let mut result = CertResult {
        outcome: Outcome::Refine {
            counterexamples: Vec::new(),
        },
        drawn: 0,
        disagreements: 0,
        stability_checks: 0,
        certified: Vec::new(),
    };
    let (mut m_plus, mut m_minus) = (0u64, 0u64);
    for _ in 0..n {
        let w = sampler
            .next_sequence()
            .ok_or(CertifyError::SamplerExhausted { drawn: result.drawn })?;
        result.drawn += 1;
        let truth = oracle.label(&w)?;
        let guess = dra.accepts(&w)?;
        if truth != guess {
            result.disagreements += 1;
            cexs.push((w, truth));
            if cexs.len() as u64 > limit {
                result.outcome = Outcome::Refine {
                    counterexamples: cexs,
                };
                return Ok(result);
            }
            continue;
        }
        if !(params.stability_dedup && seen_stable.contains(&w)) {
            result.stability_checks += 1;
            let stab = stability_check_bounded(dra, &w, &metric, &params.delta, params.max_vertices)?;
            if let Some(cex) = stab.flip_witness {
                let cex_truth = oracle.label(&cex)?;
                result.outcome = if cex_truth == truth {
                    Outcome::Refine {
                        counterexamples: vec![(cex, cex_truth)],
                    }
                } else {
                    Outcome::NonRobust {
                        distance: stab.distance.expect("witness has a cost"),
                        w,
                        cex,
                    }
                };
                return Ok(result);
            }
            if params.stability_dedup {
                seen_stable.insert(w.clone());
            }
        }
        if guess {
            m_plus += 1;
        } else {
            m_minus += 1;
        }
        result.certified.push(w);
    }
    let f = |r: &Rational| r.to_f64();
    result.outcome = Outcome::Accept {
        n,
        m_plus,
        m_minus,
        agreement_lb: &params.p - &params.gamma,
        bounds: accept_bounds(
            n,
            m_plus,
            m_minus,
            f(&params.eta),
            (f(&params.eta_split.0), f(&params.eta_split.1)),
        ),
    };
    Ok(result)
}

/// The passive learner used inside [`extraction_loop`].
#[derive(Clone, Debug)]
pub enum Learner {
    LocalSearch { space: SearchSpace, config: SearchConfig },
    Constraint(SynthesisConfig),
}

impl Learner {
    fn learn(&self, s: &SampleSet, remaining: Duration) -> Result<Dra, ExtractError> {
        match self {
            Learner::LocalSearch { space, config } => {
                let mut cfg = config.clone();
                cfg.max_time = cfg.max_time.min(remaining);
                Ok(search(s, space, &cfg)?.best.dra)
            }
            Learner::Constraint(config) => {
                let mut cfg = config.clone();
                cfg.timeout = cfg.timeout.min(remaining);
                Ok(synthesize(s, &cfg)?.dra)
            }
        }
    }
}

/// Limits of an extraction run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Learn/certify rounds allowed; zero stops before learning.
    pub max_rounds: usize,
    pub max_time: Duration,
    /// Seed quotas per class. Drawing stops after `seed_attempts` sequences
    /// even if a quota is not met.
    pub seed_positives: usize,
    pub seed_negatives: usize,
    pub seed_attempts: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_rounds: 10,
            max_time: Duration::from_secs(600),
            seed_positives: 100,
            seed_negatives: 100,
            seed_attempts: 20_000,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExtractError {
    #[error("budget exhausted after {rounds} rounds")]
    BudgetExhausted { rounds: usize, last: Option<Box<Dra>> },
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("local search: {0}")]
    Search(#[from] SearchError),
    #[error("constraint learner: {0}")]
    Smt(#[from] SmtError),
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub dra: Dra,
    pub result: CertResult,
    /// Refinements performed before the final certification.
    pub refinements: usize,
    pub samples: SampleSet,
    pub elapsed: Duration,
}

/// Draws a labelled seed set from `sampler`, balancing classes by quota.
pub fn seed_samples(
    oracle: &mut OracleHandle,
    sampler: &mut dyn SequenceSource,
    budget: &Budget,
) -> Result<SampleSet, ExtractError> {
    let mut set = SampleSet::new();
    let (mut pos, mut neg) = (0, 0);
    for _ in 0..budget.seed_attempts {
        if pos >= budget.seed_positives && neg >= budget.seed_negatives {
            break;
        }
        let Some(seq) = sampler.next_sequence() else {
            break;
        };
        let label = oracle.label(&seq)?;
        let wanted = if label {
            pos < budget.seed_positives
        } else {
            neg < budget.seed_negatives
        };
        if wanted && set.insert(seq, label).expect("cached labels are consistent") {
            if label {
                pos += 1;
            } else {
                neg += 1;
            }
        }
    }
    Ok(set)
}

/// Learns from an oracle-labelled seed set, certifies, and refines with
/// returned counterexamples until acceptance, a non-robustness witness or
/// the budget runs out.
pub fn extraction_loop(
    learner: &Learner,
    oracle: &mut OracleHandle,
    sampler: &mut dyn SequenceSource,
    params: &CertificationParams,
    budget: &Budget,
) -> Result<Extraction, ExtractError> {
    let start = Instant::now();
    if budget.max_rounds == 0 {
        return Err(ExtractError::BudgetExhausted { rounds: 0, last: None });
    }
    let mut samples = seed_samples(oracle, sampler, budget)?;
    let mut last: Option<Dra> = None;
    for round in 0..budget.max_rounds {
        let remaining = budget.max_time.saturating_sub(start.elapsed());
        if remaining.is_zero() {
            return Err(ExtractError::BudgetExhausted {
                rounds: round,
                last: last.map(Box::new),
            });
        }
        let dra = learner.learn(&samples, remaining)?;
        let result = run_certification(oracle, &dra, sampler, params)?;
        match &result.outcome {
            Outcome::Refine { counterexamples } => {
                for (seq, label) in counterexamples {
                    samples
                        .insert(seq.clone(), *label)
                        .expect("cached labels are consistent");
                }
                last = Some(dra);
            }
            _ => {
                return Ok(Extraction {
                    dra,
                    result,
                    refinements: round,
                    samples,
                    elapsed: start.elapsed(),
                })
            }
        }
    }
    Err(ExtractError::BudgetExhausted {
        rounds: budget.max_rounds,
        last: last.map(Box::new),
    })
}

/// Re-checks a non-robustness pair: the oracle labels differ and the
/// distance is below `delta`.
pub fn verify_non_robust(
    oracle: &mut OracleHandle,
    w: &[Rational],
    cex: &[Rational],
    metric: &Raa,
    delta: &Rational,
) -> Result<bool, OracleError> {
    Ok(oracle.label(w)? != oracle.label(cex)? && evaluate(metric, w, cex).below(delta))
}
