//! Passive synthesis by constraint solving.
//!
//! Every state owns a fixed number of transition slots. A slot, when
//! enabled, carries an interval guard from the shared lattice (one-hot over
//! endpoints, plus strictness flags), a target state and a source for every
//! register. For every prefix of the sample set the encoding tracks the state
//! reached (`x`) and the register values (`r`); runs of negative samples may
//! die. Two enabled slots of one state must be separated: one's upper
//! endpoint lies below the other's lower endpoint in every valuation. The
//! decoded automaton is re-checked symbolically and, should an overlap slip
//! through, the offending slot pair is blocked and the solver asked again.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::automata::dra::{check_determinism, Dra, Transition};
use crate::learn::lattice::{to_assignment, Bound, Endpoint, IntervalGuard, Source};
use crate::learn::sample::{validate_consistency, SampleSet};
use crate::learn::solver::{real_literal, CheckSat, Sexp, SolverCommand, SolverError, SolverProcess};
use crate::rational::Rational;

#[derive(Debug, thiserror::Error)]
pub enum SmtError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("no consistent automaton found within the budget (last candidate n={n}, k={k}, c={c})")]
    BudgetExhausted { n: usize, k: usize, c: usize },
    #[error("invalid parameters: {0}")]
    Params(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisParams {
    pub states: usize,
    pub registers: usize,
    /// Number of constant slots; ignored when `constant_pool` is set.
    pub constants: usize,
    /// Fixed constant values instead of free symbols.
    pub constant_pool: Option<Vec<Rational>>,
    /// Outgoing transition slots per state.
    pub slots: usize,
    /// Free constants are confined to `[-bound, bound]`.
    pub constant_bound: Rational,
}

impl SynthesisParams {
    pub fn new(states: usize, registers: usize, constants: usize) -> Self {
        SynthesisParams {
            states,
            registers,
            constants,
            constant_pool: None,
            slots: 2,
            constant_bound: Rational::from_integer(1_000_000),
        }
    }

    pub fn num_constants(&self) -> usize {
        self.constant_pool.as_ref().map_or(self.constants, Vec::len)
    }

    fn validate(&self) -> Result<(), SmtError> {
        if self.states == 0 {
            return Err(SmtError::Params("at least one state is needed".into()));
        }
        if self.slots == 0 {
            return Err(SmtError::Params("at least one slot per state is needed".into()));
        }
        Ok(())
    }
}

/// Prefix tree of the sample set; node 0 is the empty prefix.
struct Prefixes {
    parent: Vec<usize>,
    letter: Vec<Rational>,
    positive_prefix: Vec<bool>,
    label: Vec<Option<bool>>,
}

impl Prefixes {
    fn build(s: &SampleSet) -> Prefixes {
        let mut t = Prefixes { parent: vec![0], letter: vec![Rational::zero()], positive_prefix: vec![true], label: vec![None] };
        let mut index: HashMap<(usize, Rational), usize> = HashMap::new();
        for (seq, label) in s.iter() {
            let mut node = 0;
            for a in seq {
                node = *index.entry((node, a.clone())).or_insert_with(|| {
                    t.parent.push(node);
                    t.letter.push(a.clone());
                    t.positive_prefix.push(false);
                    t.label.push(None);
                    t.parent.len() - 1
                });
                if label {
                    t.positive_prefix[node] = true;
                }
            }
            t.label[node] = Some(label);
        }
        t
    }

    fn len(&self) -> usize {
        self.parent.len()
    }
}

/// Names of the structural variables of one slot.
fn e(p: usize, s: usize) -> String {
    format!("e_{p}_{s}")
}
fn lo_none(p: usize, s: usize) -> String {
    format!("ln_{p}_{s}")
}
fn lo(p: usize, s: usize, o: usize) -> String {
    format!("l_{p}_{s}_{o}")
}
fn lo_strict(p: usize, s: usize) -> String {
    format!("ls_{p}_{s}")
}
fn hi_none(p: usize, s: usize) -> String {
    format!("hn_{p}_{s}")
}
fn hi(p: usize, s: usize, o: usize) -> String {
    format!("h_{p}_{s}_{o}")
}
fn hi_strict(p: usize, s: usize) -> String {
    format!("hs_{p}_{s}")
}
fn tgt(p: usize, s: usize, q: usize) -> String {
    format!("t_{p}_{s}_{q}")
}
fn asg(p: usize, s: usize, i: usize, src: usize) -> String {
    format!("a_{p}_{s}_{i}_{src}")
}
fn fin(q: usize) -> String {
    format!("f_{q}")
}
fn cst(j: usize) -> String {
    format!("c_{j}")
}
fn x(u: usize, q: usize) -> String {
    format!("x_{u}_{q}")
}
fn reg(u: usize, i: usize) -> String {
    format!("r_{u}_{i}")
}
fn fire(u: usize, p: usize, s: usize) -> String {
    format!("g_{u}_{p}_{s}")
}

fn exactly_one(out: &mut String, vars: &[String]) {
    let _ = writeln!(out, "(assert (or {}))", vars.join(" "));
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            let _ = writeln!(out, "(assert (not (and {} {})))", vars[i], vars[j]);
        }
    }
}

/// The SMT-LIB v2 script (declarations and assertions, without
/// `check-sat`) for one parameter choice.
pub fn encode(s: &SampleSet, params: &SynthesisParams) -> String {
    let (n, k, c, m) = (params.states, params.registers, params.num_constants(), params.slots);
    let ends = Endpoint::all(k, c);
    let sources: Vec<Vec<Source>> = (0..k).map(|i| Source::all_for(i, k, c)).collect();
    let pre = Prefixes::build(s);
    let mut out = String::new();
    out.push_str("(set-logic QF_LRA)\n");

    // Structure.
    for q in 0..n {
        let _ = writeln!(out, "(declare-const {} Bool)", fin(q));
    }
    for j in 0..c {
        let _ = writeln!(out, "(declare-const {} Real)", cst(j));
        match &params.constant_pool {
            Some(pool) => {
                let _ = writeln!(out, "(assert (= {} {}))", cst(j), real_literal(&pool[j]));
            }
            None => {
                let b = &params.constant_bound;
                let _ = writeln!(out, "(assert (<= {} {} {}))", real_literal(&-b), cst(j), real_literal(b));
            }
        }
    }
    for p in 0..n {
        for sl in 0..m {
            let mut bools = vec![e(p, sl), lo_none(p, sl), lo_strict(p, sl), hi_none(p, sl), hi_strict(p, sl)];
            bools.extend((0..ends.len()).flat_map(|o| [lo(p, sl, o), hi(p, sl, o)]));
            bools.extend((0..n).map(|q| tgt(p, sl, q)));
            for (i, srcs) in sources.iter().enumerate() {
                bools.extend((0..srcs.len()).map(|x| asg(p, sl, i, x)));
            }
            for b in &bools {
                let _ = writeln!(out, "(declare-const {b} Bool)");
            }
            let mut los = vec![lo_none(p, sl)];
            los.extend((0..ends.len()).map(|o| lo(p, sl, o)));
            exactly_one(&mut out, &los);
            let mut his = vec![hi_none(p, sl)];
            his.extend((0..ends.len()).map(|o| hi(p, sl, o)));
            exactly_one(&mut out, &his);
            exactly_one(&mut out, &(0..n).map(|q| tgt(p, sl, q)).collect::<Vec<_>>());
            for (i, srcs) in sources.iter().enumerate() {
                exactly_one(&mut out, &(0..srcs.len()).map(|x| asg(p, sl, i, x)).collect::<Vec<_>>());
            }
            // Unbounded sides carry no strictness; this removes duplicate models.
            let _ = writeln!(out, "(assert (=> {} (not {})))", lo_none(p, sl), lo_strict(p, sl));
            let _ = writeln!(out, "(assert (=> {} (not {})))", hi_none(p, sl), hi_strict(p, sl));
            if sl > 0 {
                let _ = writeln!(out, "(assert (=> {} {}))", e(p, sl), e(p, sl - 1));
            }
        }
        for a in 0..m {
            for b in a + 1..m {
                let sep = format!("(or {} {})", below(p, a, b, &ends), below(p, b, a, &ends));
                let _ = writeln!(out, "(assert (=> (and {} {}) {sep}))", e(p, a), e(p, b));
            }
        }
    }

    // Runs.
    for u in 0..pre.len() {
        for q in 0..n {
            let _ = writeln!(out, "(declare-const {} Bool)", x(u, q));
        }
        for i in 0..k {
            let _ = writeln!(out, "(declare-const {} Real)", reg(u, i));
        }
    }
    let _ = writeln!(out, "(assert {})", x(0, 0));
    for i in 0..k {
        let _ = writeln!(out, "(assert (= {} 0.0))", reg(0, i));
    }
    for u in 0..pre.len() {
        for q in 0..n {
            for q2 in q + 1..n {
                let _ = writeln!(out, "(assert (not (and {} {})))", x(u, q), x(u, q2));
            }
        }
        if pre.positive_prefix[u] {
            let xs: Vec<String> = (0..n).map(|q| x(u, q)).collect();
            let _ = writeln!(out, "(assert (or {}))", xs.join(" "));
        }
        if let Some(label) = pre.label[u] {
            for q in 0..n {
                let f = if label { fin(q) } else { format!("(not {})", fin(q)) };
                let _ = writeln!(out, "(assert (=> {} {f}))", x(u, q));
            }
        }
    }
    for v in 1..pre.len() {
        let u = pre.parent[v];
        let a = real_literal(&pre.letter[v]);
        let val = |o: &Endpoint| match *o {
            Endpoint::Reg(i) => reg(u, i),
            Endpoint::Const(j) => cst(j),
        };
        let mut fires = Vec::new();
        for p in 0..n {
            for sl in 0..m {
                let g = fire(v, p, sl);
                fires.push(g.clone());
                let mut low = vec![lo_none(p, sl)];
                let mut high = vec![hi_none(p, sl)];
                for (oi, o) in ends.iter().enumerate() {
                    let w = val(o);
                    low.push(format!("(and {} (ite {} (< {w} {a}) (<= {w} {a})))", lo(p, sl, oi), lo_strict(p, sl)));
                    high.push(format!("(and {} (ite {} (< {a} {w}) (<= {a} {w})))", hi(p, sl, oi), hi_strict(p, sl)));
                }
                let _ = writeln!(out, "(declare-const {g} Bool)");
                let _ = writeln!(
                    out,
                    "(assert (= {g} (and {} {} (or {}) (or {}))))",
                    x(u, p),
                    e(p, sl),
                    low.join(" "),
                    high.join(" ")
                );
                for q in 0..n {
                    let _ = writeln!(out, "(assert (=> (and {g} {}) {}))", tgt(p, sl, q), x(v, q));
                }
                for (i, srcs) in sources.iter().enumerate() {
                    for (xi, src) in srcs.iter().enumerate() {
                        let rhs = match *src {
                            Source::Keep => reg(u, i),
                            Source::Reg(j) => reg(u, j),
                            Source::Const(j) => cst(j),
                            Source::Curr => a.clone(),
                        };
                        let _ = writeln!(out, "(assert (=> (and {g} {}) (= {} {rhs})))", asg(p, sl, i, xi), reg(v, i));
                    }
                }
            }
        }
        for q in 0..n {
            let _ = writeln!(out, "(assert (=> {} (or {})))", x(v, q), fires.join(" "));
        }
    }
    out
}

/// Slot `a`'s upper endpoint lies below slot `b`'s lower endpoint for every
/// register valuation.
fn below(p: usize, a: usize, b: usize, ends: &[Endpoint]) -> String {
    let mut cases = Vec::new();
    let either_strict = format!("(or {} {})", hi_strict(p, a), lo_strict(p, b));
    for (oi, _) in ends.iter().enumerate() {
        cases.push(format!("(and {} {} {either_strict})", hi(p, a, oi), lo(p, b, oi)));
    }
    for (oi, o) in ends.iter().enumerate() {
        for (oj, o2) in ends.iter().enumerate() {
            if let (Endpoint::Const(i), Endpoint::Const(j)) = (o, o2) {
                if i != j {
                    cases.push(format!(
                        "(and {} {} (or (< {} {}) (and (= {} {}) {either_strict})))",
                        hi(p, a, oi),
                        lo(p, b, oj),
                        cst(*i),
                        cst(*j),
                        cst(*i),
                        cst(*j)
                    ));
                }
            }
        }
    }
    format!("(or false {})", cases.join(" "))
}

/// Names whose values determine the automaton.
pub fn model_variables(params: &SynthesisParams) -> Vec<String> {
    let (n, k, c, m) = (params.states, params.registers, params.num_constants(), params.slots);
    let ends = k + c;
    let mut names: Vec<String> = (0..n).map(fin).collect();
    names.extend((0..c).map(cst));
    for p in 0..n {
        for sl in 0..m {
            names.extend([e(p, sl), lo_none(p, sl), lo_strict(p, sl), hi_none(p, sl), hi_strict(p, sl)]);
            names.extend((0..ends).flat_map(|o| [lo(p, sl, o), hi(p, sl, o)]));
            names.extend((0..n).map(|q| tgt(p, sl, q)));
            for i in 0..k {
                names.extend((0..Source::all_for(i, k, c).len()).map(|x| asg(p, sl, i, x)));
            }
        }
    }
    names
}

/// One decoded slot, kept for blocking clauses.
#[derive(Clone, Debug)]
struct SlotChoice {
    state: usize,
    literals: Vec<String>,
}

pub struct Decoded {
    pub dra: Dra,
    slots: Vec<SlotChoice>,
}

/// Builds the automaton described by a model (`name -> value`).
pub fn decode_model(values: &HashMap<String, Sexp>, params: &SynthesisParams) -> Result<Decoded, SmtError> {
    let (n, k, c, m) = (params.states, params.registers, params.num_constants(), params.slots);
    let ends = Endpoint::all(k, c);
    let get_bool = |name: &str| -> Result<bool, SmtError> {
        values
            .get(name)
            .and_then(Sexp::as_bool)
            .ok_or_else(|| SmtError::MalformedModel(format!("no boolean value for {name}")))
    };
    let consts: Vec<Rational> = match &params.constant_pool {
        Some(pool) => pool.clone(),
        None => (0..c)
            .map(|j| {
                values
                    .get(&cst(j))
                    .and_then(Sexp::as_rational)
                    .ok_or_else(|| SmtError::MalformedModel(format!("no rational value for {}", cst(j))))
            })
            .collect::<Result<_, _>>()?,
    };
    let pick = |names: Vec<String>| -> Result<usize, SmtError> {
        let mut hit = None;
        for (i, nm) in names.iter().enumerate() {
            if get_bool(nm)? {
                if hit.is_some() {
                    return Err(SmtError::MalformedModel(format!("two choices set among {names:?}")));
                }
                hit = Some(i);
            }
        }
        hit.ok_or_else(|| SmtError::MalformedModel(format!("no choice set among {names:?}")))
    };
    let accepting: Vec<bool> = (0..n).map(|q| get_bool(&fin(q))).collect::<Result<_, _>>()?;
    let mut transitions = Vec::new();
    let mut slots = Vec::new();
    for p in 0..n {
        for sl in 0..m {
            if !get_bool(&e(p, sl))? {
                continue;
            }
            let mut literals = vec![e(p, sl)];
            let side = |none: String, each: &dyn Fn(usize) -> String, strict: String, literals: &mut Vec<String>| {
                let mut names = vec![none];
                names.extend((0..ends.len()).map(each));
                let i = pick(names.clone())?;
                literals.push(names[i].clone());
                if i == 0 {
                    return Ok::<_, SmtError>(None);
                }
                let st = get_bool(&strict)?;
                literals.push(if st { strict } else { format!("(not {strict})") });
                Ok(Some(Bound { at: ends[i - 1], strict: st }))
            };
            let low = side(lo_none(p, sl), &|o| lo(p, sl, o), lo_strict(p, sl), &mut literals)?;
            let high = side(hi_none(p, sl), &|o| hi(p, sl, o), hi_strict(p, sl), &mut literals)?;
            let to = pick((0..n).map(|q| tgt(p, sl, q)).collect())?;
            let mut srcs = Vec::with_capacity(k);
            for i in 0..k {
                let options = Source::all_for(i, k, c);
                srcs.push(options[pick((0..options.len()).map(|x| asg(p, sl, i, x)).collect())?]);
            }
            let guard = IntervalGuard { low, high };
            transitions.push(Transition::new(p, guard.to_guard(&consts), to_assignment(&srcs, &consts), to));
            slots.push(SlotChoice { state: p, literals });
        }
    }
    let dra = Dra::new(n, k, 0, accepting, transitions).map_err(|e| SmtError::MalformedModel(e.to_string()))?;
    Ok(Decoded { dra, slots })
}

/// Runs one parameter choice to completion.
pub fn solve(
    s: &SampleSet,
    params: &SynthesisParams,
    solver: &SolverCommand,
    deadline: Instant,
) -> Result<Option<Dra>, SmtError> {
    params.validate()?;
    let mut proc = SolverProcess::spawn(solver)?;
    proc.send(&encode(s, params))?;
    let names = model_variables(params);
    loop {
        match proc.check_sat(deadline)? {
            CheckSat::Unsat => return Ok(None),
            CheckSat::Unknown => return Err(SolverError::Reported("unknown".into()).into()),
            CheckSat::Sat => {}
        }
        let values: HashMap<String, Sexp> = proc.get_values(&names, deadline)?.into_iter().collect();
        let decoded = decode_model(&values, params)?;
        let violations = check_determinism(&decoded.dra);
        if violations.is_empty() {
            if !validate_consistency(&decoded.dra, s) {
                return Err(SmtError::MalformedModel("decoded automaton disagrees with the sample set".into()));
            }
            return Ok(Some(decoded.dra));
        }
        for v in violations {
            let (a, b) = (&decoded.slots[v.first], &decoded.slots[v.second]);
            debug_assert_eq!(a.state, b.state);
            let lits: Vec<&str> = a.literals.iter().chain(&b.literals).map(String::as_str).collect();
            proc.send(&format!("(assert (not (and {})))", lits.join(" ")))?;
        }
    }
}

/// Bounds on the enumeration of `(states, registers, constants)`.
#[derive(Clone, Debug)]
pub struct SynthesisConfig {
    pub max_states: usize,
    pub max_registers: usize,
    pub max_constants: usize,
    pub constant_pool: Option<Vec<Rational>>,
    pub slots: usize,
    pub timeout: Duration,
    pub solver: SolverCommand,
}

impl SynthesisConfig {
    pub fn new(max_states: usize, max_registers: usize, max_constants: usize, timeout: Duration) -> Result<Self, SmtError> {
        Ok(SynthesisConfig {
            max_states,
            max_registers,
            max_constants,
            constant_pool: None,
            slots: 2,
            timeout,
            solver: SolverCommand::from_env()?,
        })
    }

    /// Candidates ordered by `n + k + c`, then lexicographically.
    pub fn candidates(&self) -> Vec<SynthesisParams> {
        let cs: Vec<usize> = match &self.constant_pool {
            Some(pool) => vec![pool.len()],
            None => (0..=self.max_constants).collect(),
        };
        let mut out = Vec::new();
        for n in 1..=self.max_states {
            for k in 0..=self.max_registers {
                for &c in &cs {
                    let mut p = SynthesisParams::new(n, k, c);
                    p.constant_pool = self.constant_pool.clone();
                    p.slots = self.slots;
                    out.push(p);
                }
            }
        }
        out.sort_by_key(|p| (p.states + p.registers + p.num_constants(), p.states, p.registers, p.num_constants()));
        out
    }
}

#[derive(Clone, Debug)]
pub struct Synthesized {
    pub dra: Dra,
    pub params: SynthesisParams,
    pub candidates_tried: usize,
}

/// The first candidate whose encoding is satisfiable and whose decoded
/// automaton is deterministic.
pub fn synthesize(s: &SampleSet, cfg: &SynthesisConfig) -> Result<Synthesized, SmtError> {
    let deadline = Instant::now() + cfg.timeout;
    let mut last = (0, 0, 0);
    for (i, params) in cfg.candidates().into_iter().enumerate() {
        last = (params.states, params.registers, params.num_constants());
        if Instant::now() >= deadline {
            break;
        }
        match solve(s, &params, &cfg.solver, deadline) {
            Ok(Some(dra)) => return Ok(Synthesized { dra, params, candidates_tried: i + 1 }),
            Ok(None) => continue,
            Err(SmtError::Solver(SolverError::Timeout)) => break,
            Err(e) => return Err(e),
        }
    }
    Err(SmtError::BudgetExhausted { n: last.0, k: last.1, c: last.2 })
}
