use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::automata::dra::{validate_operands, AutomatonError};
use crate::automata::guard::{Assignment, Guard, Operand};
use crate::automata::json::{
    accepting_vec, assign_doc, assign_from_doc, guard_doc, guard_from_doc, locate, AccDoc,
    AutomatonDoc, ParseError, TransitionDoc,
};
use crate::rational::Rational;

/// `acc += a1 * curr1 + a2 * curr2 + b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AccUpdate {
    pub a1: Rational,
    pub a2: Rational,
    pub b: Rational,
}

impl AccUpdate {
    pub fn new(a1: Rational, a2: Rational, b: Rational) -> AccUpdate {
        AccUpdate { a1, a2, b }
    }

    pub fn constant(b: Rational) -> AccUpdate {
        AccUpdate {
            a1: Rational::zero(),
            a2: Rational::zero(),
            b,
        }
    }

    pub fn zero() -> AccUpdate {
        AccUpdate::default()
    }

    /// `None` when a letter with a nonzero coefficient is undefined.
    #[inline]
    pub fn increment(&self, c1: Option<&Rational>, c2: Option<&Rational>) -> Option<Rational> {
        let mut x = self.b.clone();
        if !self.a1.is_zero() {
            x += &(&self.a1 * c1?);
        }
        if !self.a2.is_zero() {
            x += &(&self.a2 * c2?);
        }
        Some(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Head1,
    Head2,
    Both,
}

impl Move {
    pub fn moves_head1(self) -> bool {
        matches!(self, Move::Head1 | Move::Both)
    }

    pub fn moves_head2(self) -> bool {
        matches!(self, Move::Head2 | Move::Both)
    }

    pub fn name(self) -> &'static str {
        match self {
            Move::Head1 => "head1",
            Move::Head2 => "head2",
            Move::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Option<Move> {
        match s {
            "head1" | "1" => Some(Move::Head1),
            "head2" | "2" => Some(Move::Head2),
            "both" => Some(Move::Both),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RaaTransition {
    pub from: usize,
    pub to: usize,
    pub guard: Guard,
    pub assign: Assignment,
    pub acc: AccUpdate,
    pub mov: Move,
}

impl RaaTransition {
    pub fn new(
        from: usize,
        guard: Guard,
        assign: Assignment,
        acc: AccUpdate,
        mov: Move,
        to: usize,
    ) -> Self {
        RaaTransition {
            from,
            to,
            guard,
            assign,
            acc,
            mov,
        }
    }

    /// Whether firing needs the letter under head 1.
    pub fn reads_curr1(&self) -> bool {
        self.guard.mentions(&Operand::Curr1)
            || self.assign.mentions(&Operand::Curr1)
            || !self.acc.a1.is_zero()
    }

    pub fn reads_curr2(&self) -> bool {
        self.guard.mentions(&Operand::Curr2)
            || self.assign.mentions(&Operand::Curr2)
            || !self.acc.a2.is_zero()
    }
}

/// A two-head register automaton with an accumulator. It may be
/// nondeterministic; its output on `(v, w)` is the least accumulated cost
/// over accepting runs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Raa {
    pub num_states: usize,
    pub num_registers: usize,
    pub initial: usize,
    pub accepting: Vec<bool>,
    pub transitions: Vec<RaaTransition>,
}

impl Raa {
    pub fn new(
        num_states: usize,
        num_registers: usize,
        initial: usize,
        accepting: Vec<bool>,
        transitions: Vec<RaaTransition>,
    ) -> Result<Raa, AutomatonError> {
        let r = Raa {
            num_states,
            num_registers,
            initial,
            accepting,
            transitions,
        };
        r.validate()?;
        Ok(r)
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
                matches!(o, Operand::Curr1 | Operand::Curr2)
            })?;
        }
        Ok(())
    }

    pub fn outgoing(&self, q: usize) -> impl Iterator<Item = (usize, &RaaTransition)> {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.from == q)
    }

    /// Constants in guards and assignments (not accumulator coefficients).
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

    pub fn to_doc(&self) -> AutomatonDoc {
        AutomatonDoc {
            kind: "raa".into(),
            states: self.num_states,
            registers: self.num_registers,
            initial: self.initial,
            accepting: (0..self.num_states)
                .filter(|&q| self.accepting[q])
                .collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransitionDoc {
                    from: t.from,
                    to: t.to,
                    guard: guard_doc(&t.guard),
                    assign: assign_doc(&t.assign),
                    acc: Some(AccDoc {
                        a1: t.acc.a1.clone(),
                        a2: t.acc.a2.clone(),
                        b: t.acc.b.clone(),
                    }),
                    mov: Some(t.mov.name().to_string()),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: AutomatonDoc) -> Result<Raa, ParseError> {
        if doc.kind != "raa" {
            return Err(ParseError::invalid(
                "kind",
                format!("expected \"raa\", found {:?}", doc.kind),
            ));
        }
        let accepting = accepting_vec(&doc)?;
        let mut transitions = Vec::with_capacity(doc.transitions.len());
        for (i, t) in doc.transitions.into_iter().enumerate() {
            let mov = match t.mov.as_deref() {
                Some(m) => Move::parse(m).ok_or_else(|| {
                    ParseError::invalid(
                        format!("transitions[{i}].mov"),
                        format!("unknown move {m:?}"),
                    )
                })?,
                None => {
                    return Err(ParseError::invalid(
                        format!("transitions[{i}]"),
                        "missing mov",
                    ))
                }
            };
            let acc = t
                .acc
                .map(|a| AccUpdate::new(a.a1, a.a2, a.b))
                .unwrap_or_default();
            transitions.push(RaaTransition::new(
                t.from,
                guard_from_doc(t.guard),
                assign_from_doc(t.assign),
                acc,
                mov,
                t.to,
            ));
        }
        Raa::new(
            doc.states,
            doc.registers,
            doc.initial,
            accepting,
            transitions,
        )
        .map_err(locate)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("automaton documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Raa, ParseError> {
        Raa::from_doc(serde_json::from_str(text)?)
    }
}

/// A rational or +∞.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedCost {
    Finite(Rational),
    Infinite,
}

impl ExtendedCost {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedCost::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedCost::Finite(r) => Some(r),
            ExtendedCost::Infinite => None,
        }
    }

    pub fn add(&self, other: &ExtendedCost) -> ExtendedCost {
        match (self, other) {
            (ExtendedCost::Finite(a), ExtendedCost::Finite(b)) => ExtendedCost::Finite(a + b),
            _ => ExtendedCost::Infinite,
        }
    }

    /// `self < x` for a finite bound.
    pub fn below(&self, x: &Rational) -> bool {
        matches!(self, ExtendedCost::Finite(a) if a < x)
    }
}

impl From<Option<Rational>> for ExtendedCost {
    fn from(o: Option<Rational>) -> Self {
        o.map_or(ExtendedCost::Infinite, ExtendedCost::Finite)
    }
}

impl Ord for ExtendedCost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedCost::Finite(a), ExtendedCost::Finite(b)) => a.cmp(b),
            (ExtendedCost::Finite(_), ExtendedCost::Infinite) => Ordering::Less,
            (ExtendedCost::Infinite, ExtendedCost::Finite(_)) => Ordering::Greater,
            (ExtendedCost::Infinite, ExtendedCost::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtendedCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtendedCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedCost::Finite(r) => write!(f, "{r}"),
            ExtendedCost::Infinite => f.write_str("inf"),
        }
    }
}

/// Serialized as a `"num/den"` string, or `null` for +∞.
impl Serialize for ExtendedCost {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedCost::Finite(r) => r.serialize(s),
            ExtendedCost::Infinite => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedCost {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Option::<Rational>::deserialize(d)?.into())
    }
}
