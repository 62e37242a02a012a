//! Hill climbing over deterministic transition structures.
//!
//! A state's outgoing transitions come from a catalog: the line is cut at a
//! single register or constant, or at an increasing pair of constants, the
//! resulting elementary cells (points and open intervals) are grouped into
//! contiguous intervals, and every group either dies or carries a target and
//! register updates. Groups of one cut are disjoint, so every catalog entry
//! is deterministic. The catalog is finite but large, so entries are drawn
//! on demand instead of being listed.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::automata::dra::{Dra, Transition};
use crate::learn::lattice::{to_assignment, Bound, Endpoint, IntervalGuard, Source};
use crate::learn::sample::SampleSet;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("the search space needs at least one state (and at most 64)")]
    States,
    #[error("constant pool must be strictly increasing")]
    ConstantOrder,
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("restarts and iteration bounds must be positive")]
    Bounds,
    #[error("automaton does not belong to the search space: {0}")]
    NotInSpace(String),
}

/// One outgoing transition of a catalog entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub guard: IntervalGuard,
    pub sources: Vec<Source>,
    pub target: usize,
}

/// A state's complete set of outgoing transitions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CatalogEntry {
    pub cells: Vec<Cell>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpace {
    pub states: usize,
    pub registers: usize,
    pub constants: Vec<Rational>,
    /// Most live groups per entry.
    pub max_cells: usize,
}

impl SearchSpace {
    pub fn new(states: usize, registers: usize, constants: Vec<Rational>) -> Result<Self, SearchError> {
        if states == 0 || states > 64 {
            return Err(SearchError::States);
        }
        if constants.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SearchError::ConstantOrder);
        }
        Ok(SearchSpace { states, registers, constants, max_cells: 3 })
    }

    /// Cut structures: none, each endpoint alone, each increasing constant pair.
    fn cuts(&self) -> Vec<Vec<Endpoint>> {
        let c = self.constants.len();
        let mut out = vec![vec![]];
        out.extend(Endpoint::all(self.registers, c).into_iter().map(|e| vec![e]));
        for i in 0..c {
            for j in i + 1..c {
                out.push(vec![Endpoint::Const(i), Endpoint::Const(j)]);
            }
        }
        out
    }

    /// A uniformly structured random catalog entry.
    pub fn random_entry(&self, rng: &mut impl Rng) -> CatalogEntry {
        let cuts = self.cuts();
        let cut = &cuts[rng.random_range(0..cuts.len())];
        // Elementary cells as (low, high) bounds, left to right.
        let mut cells: Vec<(Option<Bound>, Option<Bound>)> = Vec::new();
        let mut low = None;
        for &at in cut {
            cells.push((low, Some(Bound { at, strict: true })));
            cells.push((Some(Bound { at, strict: false }), Some(Bound { at, strict: false })));
            low = Some(Bound { at, strict: true });
        }
        cells.push((low, None));
        let mut groups: Vec<IntervalGuard> = Vec::new();
        let mut start = cells[0].0;
        for i in 0..cells.len() {
            let last = i + 1 == cells.len();
            if last || rng.random_bool(0.5) {
                groups.push(IntervalGuard { low: start, high: cells[i].1 });
                if !last {
                    start = cells[i + 1].0;
                }
            }
        }
        let mut live: Vec<IntervalGuard> = groups.into_iter().filter(|_| rng.random_bool(0.5)).collect();
        while live.len() > self.max_cells {
            live.remove(rng.random_range(0..live.len()));
        }
        let c = self.constants.len();
        let cells = live
            .into_iter()
            .map(|guard| {
                let sources = (0..self.registers)
                    .map(|i| {
                        let opts = Source::all_for(i, self.registers, c);
                        opts[rng.random_range(0..opts.len())]
                    })
                    .collect();
                Cell { guard, sources, target: rng.random_range(0..self.states) }
            })
            .collect();
        CatalogEntry { cells }
    }

    pub fn random_candidate(&self, rng: &mut impl Rng) -> Candidate {
        Candidate {
            accepting: (0..self.states).map(|_| rng.random_bool(0.5)).collect(),
            entries: (0..self.states).map(|_| self.random_entry(rng)).collect(),
        }
    }
}

/// A point of the search space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Candidate {
    pub accepting: Vec<bool>,
    pub entries: Vec<CatalogEntry>,
}

impl Candidate {
    pub fn to_dra(&self, space: &SearchSpace) -> Dra {
        let transitions = self
            .entries
            .iter()
            .enumerate()
            .flat_map(|(q, e)| {
                e.cells.iter().map(move |cell| {
                    Transition::new(
                        q,
                        cell.guard.to_guard(&space.constants),
                        to_assignment(&cell.sources, &space.constants),
                        cell.target,
                    )
                })
            })
            .collect();
        Dra::new(space.states, space.registers, 0, self.accepting.clone(), transitions)
            .expect("catalog entries stay within the space")
    }

    /// The run's final state, or `None` on run-death, plus the set of states
    /// a letter was read in.
    fn trace(&self, space: &SearchSpace, seq: &[Rational]) -> (Option<usize>, u64) {
        let mut q = 0usize;
        let mut regs = vec![Rational::zero(); space.registers];
        let mut visited = 0u64;
        let value = |e: &Endpoint, regs: &[Rational]| match *e {
            Endpoint::Reg(i) => regs[i].clone(),
            Endpoint::Const(j) => space.constants[j].clone(),
        };
        for a in seq {
            visited |= 1 << q;
            let fired = self.entries[q].cells.iter().find(|cell| {
                let lo_ok = cell.guard.low.is_none_or(|b| {
                    let v = value(&b.at, &regs);
                    if b.strict { v < *a } else { v <= *a }
                });
                lo_ok
                    && cell.guard.high.is_none_or(|b| {
                        let v = value(&b.at, &regs);
                        if b.strict { *a < v } else { *a <= v }
                    })
            });
            let Some(cell) = fired else { return (None, visited) };
            let next: Vec<Rational> = cell
                .sources
                .iter()
                .enumerate()
                .map(|(i, s)| match *s {
                    Source::Keep => regs[i].clone(),
                    Source::Reg(j) => regs[j].clone(),
                    Source::Const(j) => space.constants[j].clone(),
                    Source::Curr => a.clone(),
                })
                .collect();
            regs = next;
            q = cell.target;
        }
        (Some(q), visited)
    }
}

/// Toggles whether `q` accepts.
pub fn op_f(dra: &Dra, q: usize) -> Dra {
    let mut out = dra.clone();
    out.accepting[q] = !out.accepting[q];
    out
}

/// Replaces all transitions leaving `q` by the entry's transitions.
pub fn op_delta(dra: &Dra, q: usize, entry: &CatalogEntry, space: &SearchSpace) -> Dra {
    let mut out = dra.clone();
    out.transitions.retain(|t| t.from != q);
    for cell in &entry.cells {
        out.transitions.push(Transition::new(
            q,
            cell.guard.to_guard(&space.constants),
            to_assignment(&cell.sources, &space.constants),
            cell.target,
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_time: Duration,
    pub max_iterations: u64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_time: Duration::from_secs(600), max_iterations: 100_000, restarts: 5, seed: 0 }
    }
}

/// Per-sample run summaries for incremental scoring.
struct Scored {
    runs: Vec<(Option<usize>, u64)>,
    correct: usize,
}

struct Problem<'a> {
    space: &'a SearchSpace,
    samples: Vec<(&'a [Rational], bool)>,
}

impl Problem<'_> {
    fn correct(&self, cand: &Candidate, run: &(Option<usize>, u64), label: bool) -> bool {
        run.0.is_some_and(|q| cand.accepting[q]) == label
    }

    fn score_full(&self, cand: &Candidate) -> Scored {
        let runs: Vec<_> = self.samples.iter().map(|(s, _)| cand.trace(self.space, s)).collect();
        let correct = runs.iter().zip(&self.samples).filter(|(r, (_, l))| self.correct(cand, r, *l)).count();
        Scored { runs, correct }
    }
}

#[derive(Clone, Debug)]
pub struct ClimbResult {
    pub candidate: Candidate,
    pub dra: Dra,
    pub score: Rational,
    pub iterations: u64,
    pub accepted_mutations: u64,
    /// Best score after each accepted mutation, starting with the initial one.
    pub trace: Vec<Rational>,
    pub elapsed: Duration,
}

/// Hill climbing from a given start: random `op_f` or `op_Δ` on the current
/// best, kept only on strict improvement. Stops at score 1 or a bound.
pub fn hill_climb(
    s: &SampleSet,
    space: &SearchSpace,
    max_iterations: u64,
    max_time: Duration,
    init: Candidate,
    rng: &mut impl Rng,
) -> Result<ClimbResult, SearchError> {
    if s.is_empty() {
        return Err(SearchError::EmptySampleSet);
    }
    if init.accepting.len() != space.states || init.entries.len() != space.states {
        return Err(SearchError::NotInSpace("state count differs".into()));
    }
    let started = Instant::now();
    let problem = Problem { space, samples: s.iter().collect() };
    let total = problem.samples.len();
    let ratio = |c: usize| Rational::new(c as i64, total as i64);
    let mut best = init;
    let mut scored = problem.score_full(&best);
    let mut trace = vec![ratio(scored.correct)];
    let mut iterations = 0;
    let mut accepted = 0;
    while scored.correct < total && iterations < max_iterations && started.elapsed() < max_time {
        iterations += 1;
        let q = rng.random_range(0..space.states);
        if rng.random_bool(0.5) {
            // op_f: only samples ending in q change.
            let mut cand = best.clone();
            cand.accepting[q] = !cand.accepting[q];
            let mut correct = scored.correct;
            for (run, (_, label)) in scored.runs.iter().zip(&problem.samples) {
                if run.0 == Some(q) {
                    if problem.correct(&best, run, *label) {
                        correct -= 1;
                    } else {
                        correct += 1;
                    }
                }
            }
            if correct > scored.correct {
                best = cand;
                scored.correct = correct;
                accepted += 1;
                trace.push(ratio(correct));
            }
        } else {
            // op_Δ: only runs that read a letter in q change.
            let mut cand = best.clone();
            cand.entries[q] = space.random_entry(rng);
            let mut correct = scored.correct;
            let mut changed = Vec::new();
            for (i, (run, (seq, label))) in scored.runs.iter().zip(&problem.samples).enumerate() {
                if run.1 & (1 << q) != 0 {
                    let new = cand.trace(space, seq);
                    let before = problem.correct(&best, run, *label);
                    let after = problem.correct(&cand, &new, *label);
                    correct = correct + usize::from(after) - usize::from(before);
                    changed.push((i, new));
                }
            }
            if correct > scored.correct {
                best = cand;
                for (i, r) in changed {
                    scored.runs[i] = r;
                }
                scored.correct = correct;
                accepted += 1;
                trace.push(ratio(correct));
            }
        }
    }
    let dra = best.to_dra(space);
    Ok(ClimbResult {
        candidate: best,
        dra,
        score: ratio(scored.correct),
        iterations,
        accepted_mutations: accepted,
        trace,
        elapsed: started.elapsed(),
    })
}

/// Seed of restart `i`.
pub fn restart_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub best: ClimbResult,
    pub restarts: Vec<ClimbResult>,
}

/// Independent climbs from random starts, run in parallel. The winner has
/// the highest score; ties go to the lexicographically least JSON.
pub fn search(s: &SampleSet, space: &SearchSpace, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    if cfg.restarts == 0 || cfg.max_iterations == 0 {
        return Err(SearchError::Bounds);
    }
    let restarts: Vec<ClimbResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(cfg.seed, i));
            let init = space.random_candidate(&mut rng);
            hill_climb(s, space, cfg.max_iterations, cfg.max_time, init, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    let best = restarts
        .iter()
        .max_by(|a, b| a.score.cmp(&b.score).then_with(|| b.dra.to_json().cmp(&a.dra.to_json())))
        .expect("at least one restart")
        .clone();
    Ok(SearchOutcome { best, restarts })
}
