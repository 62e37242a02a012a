use std::collections::BTreeMap;

use crate::automata::guard::{Assignment, Guard, Operand, Value};
use crate::automata::order::{check_atoms, Sat};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: usize,
    pub guard: Guard,
    pub assign: Assignment,
    pub to: usize,
}

impl Transition {
    pub fn new(from: usize, guard: Guard, assign: Assignment, to: usize) -> Transition {
        Transition {
            from,
            guard,
            assign,
            to,
        }
    }
}

/// A deterministic register automaton over the ordered rationals.
///
/// Registers start at 0. Guards may compare registers, the current letter
/// `curr` and constants; determinism is a property checked by
/// [`check_determinism`], not enforced by construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dra {
    pub num_states: usize,
    pub num_registers: usize,
    pub initial: usize,
    pub accepting: Vec<bool>,
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomatonError {
    #[error("state {state} out of range (automaton has {states} states)")]
    StateOutOfRange { state: usize, states: usize },
    #[error("register r{} out of range (automaton has {registers} registers)", .register + 1)]
    RegisterOutOfRange { register: usize, registers: usize },
    #[error("transition {transition}: operand {operand} is not allowed in this automaton")]
    ForeignOperand { transition: usize, operand: String },
    #[error("transition {transition}: register r{} is assigned twice", .register + 1)]
    DuplicateUpdate { transition: usize, register: usize },
    #[error("transition {transition}: atom compares two constants")]
    ConstantOnlyAtom { transition: usize },
    #[error("accepting set has {got} entries but the automaton has {states} states")]
    AcceptingSize { got: usize, states: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error(
        "state {state} at position {position}: transitions {first} and {second} are both enabled"
    )]
    MultipleEnabledTransitions {
        state: usize,
        position: usize,
        first: usize,
        second: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub state: usize,
    pub registers: Vec<Rational>,
}

/// What happened after a configuration in a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Fired(usize),
    Died,
    End,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub accepted: bool,
    pub trace: Vec<(Configuration, Step)>,
}

impl RunResult {
    pub fn died(&self) -> bool {
        matches!(self.trace.last(), Some((_, Step::Died)))
    }

    pub fn final_state(&self) -> Option<usize> {
        match self.trace.last() {
            Some((c, Step::End)) => Some(c.state),
            _ => None,
        }
    }
}

/// Two transitions of one state whose guards overlap, with a valuation and
/// letter enabling both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminismViolation {
    pub state: usize,
    pub first: usize,
    pub second: usize,
    pub registers: Vec<Rational>,
    pub letter: Rational,
}

pub(crate) fn validate_operands(
    idx: usize,
    guard: &Guard,
    assign: &Assignment,
    k: usize,
    allowed: &dyn Fn(&Operand) -> bool,
) -> Result<(), AutomatonError> {
    let check = |o: &Operand| -> Result<(), AutomatonError> {
        match o {
            Operand::Reg(r) if *r >= k => Err(AutomatonError::RegisterOutOfRange {
                register: *r,
                registers: k,
            }),
            Operand::Reg(_) | Operand::Const(_) => Ok(()),
            other if allowed(other) => Ok(()),
            other => Err(AutomatonError::ForeignOperand {
                transition: idx,
                operand: other.to_string(),
            }),
        }
    };
    for a in &guard.atoms {
        check(&a.lhs)?;
        check(&a.rhs)?;
        if a.lhs.is_const() && a.rhs.is_const() {
            return Err(AutomatonError::ConstantOnlyAtom { transition: idx });
        }
    }
    let mut seen = vec![false; k];
    for (t, s) in &assign.updates {
        if *t >= k {
            return Err(AutomatonError::RegisterOutOfRange {
                register: *t,
                registers: k,
            });
        }
        if std::mem::replace(&mut seen[*t], true) {
            return Err(AutomatonError::DuplicateUpdate {
                transition: idx,
                register: *t,
            });
        }
        check(s)?;
    }
    Ok(())
}

impl Dra {
    /// Builds and validates an automaton.
    pub fn new(
        num_states: usize,
        num_registers: usize,
        initial: usize,
        accepting: Vec<bool>,
        transitions: Vec<Transition>,
    ) -> Result<Dra, AutomatonError> {
        let d = Dra {
            num_states,
            num_registers,
            initial,
            accepting,
            transitions,
        };
        d.validate()?;
        Ok(d)
    }

    /// Convenience constructor taking the accepting states as a list.
    pub fn with_accepting(
        num_states: usize,
        num_registers: usize,
        initial: usize,
        accepting: &[usize],
        transitions: Vec<Transition>,
    ) -> Result<Dra, AutomatonError> {
        let mut acc = vec![false; num_states];
        for &q in accepting {
            if q >= num_states {
                return Err(AutomatonError::StateOutOfRange {
                    state: q,
                    states: num_states,
                });
            }
            acc[q] = true;
        }
        Dra::new(num_states, num_registers, initial, acc, transitions)
    }

    pub fn validate(&self) -> Result<(), AutomatonError> {
        let n = self.num_states;
        if self.accepting.len() != n {
            return Err(AutomatonError::AcceptingSize {
                got: self.accepting.len(),
                states: n,
            });
        }
        if self.initial >= n {
            return Err(AutomatonError::StateOutOfRange {
                state: self.initial,
                states: n,
            });
        }
        for (i, t) in self.transitions.iter().enumerate() {
            for q in [t.from, t.to] {
                if q >= n {
                    return Err(AutomatonError::StateOutOfRange {
                        state: q,
                        states: n,
                    });
                }
            }
            validate_operands(i, &t.guard, &t.assign, self.num_registers, &|o| {
                matches!(o, Operand::Curr)
            })?;
        }
        Ok(())
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.num_states)
            .filter(|&q| self.accepting[q])
            .collect()
    }

    pub fn outgoing(&self, q: usize) -> impl Iterator<Item = (usize, &Transition)> {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.from == q)
    }

    /// Every constant mentioned by a guard or an assignment.
    pub fn constants(&self) -> Vec<Rational> {
        let mut cs: Vec<Rational> = self
            .transitions
            .iter()
            .flat_map(|t| t.guard.constants().chain(t.assign.constants()))
            .cloned()
            .collect();
        cs.sort();
        cs.dedup();
        cs
    }

    /// The enabled transition from `state` on `letter`, if exactly one.
    #[inline]
    pub fn step_index(
        &self,
        state: usize,
        regs: &[Rational],
        letter: &Rational,
        position: usize,
    ) -> Result<Option<usize>, RunError> {
        let lookup = |o: &Operand| match o {
            Operand::Reg(i) => regs.get(*i),
            Operand::Curr => Some(letter),
            _ => None,
        };
        let mut found: Option<usize> = None;
        for (i, t) in self.transitions.iter().enumerate() {
            if t.from != state {
                continue;
            }
            if t.guard.eval(&lookup) == Some(true) {
                if let Some(first) = found {
                    return Err(RunError::MultipleEnabledTransitions {
                        state,
                        position,
                        first,
                        second: i,
                    });
                }
                found = Some(i);
            }
        }
        Ok(found)
    }

    /// Fires one transition, returning the next state and registers.
    pub fn fire(&self, t: usize, regs: &[Rational], letter: &Rational) -> (usize, Vec<Rational>) {
        let tr = &self.transitions[t];
        let next = tr
            .assign
            .apply(regs, &|o: &Operand| {
                if matches!(o, Operand::Curr) {
                    Some(letter.clone())
                } else {
                    None
                }
            })
            .expect("assignment sources validated");
        (tr.to, next)
    }

    /// Membership test without recording a trace.
    pub fn accepts(&self, seq: &[Rational]) -> Result<bool, RunError> {
        Ok(self.final_state(seq)?.is_some_and(|q| self.accepting[q]))
    }

    /// State reached after the whole sequence, or `None` on run-death.
    pub fn final_state(&self, seq: &[Rational]) -> Result<Option<usize>, RunError> {
        let mut state = self.initial;
        let mut regs = vec![Rational::zero(); self.num_registers];
        for (pos, a) in seq.iter().enumerate() {
            match self.step_index(state, &regs, a, pos)? {
                Some(t) => {
                    let (q, r) = self.fire(t, &regs, a);
                    state = q;
                    regs = r;
                }
                None => return Ok(None),
            }
        }
        Ok(Some(state))
    }
}

/// Executes `dra` on `seq` from the initial state with all registers at 0.
pub fn run(dra: &Dra, seq: &[Rational]) -> Result<RunResult, RunError> {
    let mut config = Configuration {
        state: dra.initial,
        registers: vec![Rational::zero(); dra.num_registers],
    };
    let mut trace = Vec::with_capacity(seq.len() + 1);
    for (pos, a) in seq.iter().enumerate() {
        match dra.step_index(config.state, &config.registers, a, pos)? {
            Some(t) => {
                let (q, regs) = dra.fire(t, &config.registers, a);
                trace.push((config, Step::Fired(t)));
                config = Configuration {
                    state: q,
                    registers: regs,
                };
            }
            None => {
                trace.push((config, Step::Died));
                return Ok(RunResult {
                    accepted: false,
                    trace,
                });
            }
        }
    }
    let accepted = dra.accepting[config.state];
    trace.push((config, Step::End));
    Ok(RunResult { accepted, trace })
}

/// Evaluates a single step over any ordered value domain; used by the
/// robustness engine's infinitesimal values and by test oracles.
pub fn step_with<V: Value>(
    dra: &Dra,
    state: usize,
    regs: &[V],
    letter: &V,
) -> Option<(usize, Vec<V>)> {
    let lookup = |o: &Operand| match o {
        Operand::Reg(i) => regs.get(*i).cloned(),
        Operand::Curr => Some(letter.clone()),
        _ => None,
    };
    let t = dra
        .transitions
        .iter()
        .find(|t| t.from == state && t.guard.eval_with(&lookup) == Some(true))?;
    let next = t.assign.apply(regs, &lookup)?;
    Some((t.to, next))
}

/// Pairs of outgoing transitions whose guards can hold simultaneously.
pub fn check_determinism(dra: &Dra) -> Vec<DeterminismViolation> {
    let mut out = Vec::new();
    for state in 0..dra.num_states {
        let outs: Vec<(usize, &Transition)> = dra.outgoing(state).collect();
        for (i, (a, ta)) in outs.iter().enumerate() {
            for (b, tb) in &outs[i + 1..] {
                let joint = ta.guard.atoms.iter().chain(tb.guard.atoms.iter());
                let witness: BTreeMap<Operand, Rational> = match check_atoms(joint) {
                    Sat::Unsat => continue,
                    Sat::Sat(w) => w,
                    Sat::Unknown => BTreeMap::new(),
                };
                let get = |o: &Operand| witness.get(o).cloned().unwrap_or_else(Rational::zero);
                out.push(DeterminismViolation {
                    state,
                    first: *a,
                    second: *b,
                    registers: (0..dra.num_registers)
                        .map(|r| get(&Operand::Reg(r)))
                        .collect(),
                    letter: get(&Operand::Curr),
                });
            }
        }
    }
    out
}
