//! JSON documents for automata.
//!
//! ```json
//! {"kind":"dra","states":2,"registers":1,"initial":0,"accepting":[1],
//!  "transitions":[{"from":0,"to":1,"guard":[],"assign":[{"target":0,"src":{"curr":null}}]}]}
//! ```

use serde::{Deserialize, Serialize};

use crate::automata::dra::{AutomatonError, Dra, Transition};
use crate::automata::guard::{Assignment, Atom, CmpOp, Guard, Operand};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperandDoc {
    Reg(usize),
    Curr(()),
    Curr1(()),
    Curr2(()),
    Const(Rational),
}

impl From<&Operand> for OperandDoc {
    fn from(o: &Operand) -> Self {
        match o {
            Operand::Reg(i) => OperandDoc::Reg(*i),
            Operand::Curr => OperandDoc::Curr(()),
            Operand::Curr1 => OperandDoc::Curr1(()),
            Operand::Curr2 => OperandDoc::Curr2(()),
            Operand::Const(c) => OperandDoc::Const(c.clone()),
        }
    }
}

impl From<OperandDoc> for Operand {
    fn from(o: OperandDoc) -> Self {
        match o {
            OperandDoc::Reg(i) => Operand::Reg(i),
            OperandDoc::Curr(()) => Operand::Curr,
            OperandDoc::Curr1(()) => Operand::Curr1,
            OperandDoc::Curr2(()) => Operand::Curr2,
            OperandDoc::Const(c) => Operand::Const(c),
        }
    }
}

fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomDoc {
    pub lhs: OperandDoc,
    pub op: CmpOp,
    pub rhs: OperandDoc,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub offset: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssignDoc {
    pub target: usize,
    pub src: OperandDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccDoc {
    pub a1: Rational,
    pub a2: Rational,
    pub b: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub from: usize,
    pub to: usize,
    #[serde(default)]
    pub guard: Vec<AtomDoc>,
    #[serde(default)]
    pub assign: Vec<AssignDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acc: Option<AccDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mov: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutomatonDoc {
    pub kind: String,
    pub states: usize,
    pub registers: usize,
    pub initial: usize,
    pub accepting: Vec<usize>,
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
}

impl ParseError {
    pub(crate) fn invalid(location: impl Into<String>, message: impl Into<String>) -> ParseError {
        ParseError::Invalid {
            location: location.into(),
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        ParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub(crate) fn guard_doc(g: &Guard) -> Vec<AtomDoc> {
    g.atoms
        .iter()
        .map(|a| AtomDoc {
            lhs: (&a.lhs).into(),
            op: a.op,
            rhs: (&a.rhs).into(),
            offset: a.offset.clone(),
        })
        .collect()
}

pub(crate) fn guard_from_doc(atoms: Vec<AtomDoc>) -> Guard {
    Guard::new(
        atoms
            .into_iter()
            .map(|a| Atom {
                lhs: a.lhs.into(),
                op: a.op,
                rhs: a.rhs.into(),
                offset: a.offset,
            })
            .collect(),
    )
}

pub(crate) fn assign_doc(a: &Assignment) -> Vec<AssignDoc> {
    a.updates
        .iter()
        .map(|(t, s)| AssignDoc {
            target: *t,
            src: s.into(),
        })
        .collect()
}

pub(crate) fn assign_from_doc(a: Vec<AssignDoc>) -> Assignment {
    Assignment::new(a.into_iter().map(|u| (u.target, u.src.into())).collect())
}

pub(crate) fn accepting_vec(doc: &AutomatonDoc) -> Result<Vec<bool>, ParseError> {
    let mut acc = vec![false; doc.states];
    for (i, &q) in doc.accepting.iter().enumerate() {
        if q >= doc.states {
            return Err(ParseError::invalid(
                format!("accepting[{i}]"),
                format!("state {q} out of range"),
            ));
        }
        acc[q] = true;
    }
    Ok(acc)
}

pub(crate) fn locate(e: AutomatonError) -> ParseError {
    let location = match &e {
        AutomatonError::ForeignOperand { transition, .. }
        | AutomatonError::DuplicateUpdate { transition, .. }
        | AutomatonError::ConstantOnlyAtom { transition } => format!("transitions[{transition}]"),
        _ => "automaton".to_string(),
    };
    ParseError::Invalid {
        location,
        message: e.to_string(),
    }
}

impl Dra {
    pub fn to_doc(&self) -> AutomatonDoc {
        AutomatonDoc {
            kind: "dra".into(),
            states: self.num_states,
            registers: self.num_registers,
            initial: self.initial,
            accepting: self.accepting_states(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransitionDoc {
                    from: t.from,
                    to: t.to,
                    guard: guard_doc(&t.guard),
                    assign: assign_doc(&t.assign),
                    acc: None,
                    mov: None,
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: AutomatonDoc) -> Result<Dra, ParseError> {
        if doc.kind != "dra" {
            return Err(ParseError::invalid(
                "kind",
                format!("expected \"dra\", found {:?}", doc.kind),
            ));
        }
        let accepting = accepting_vec(&doc)?;
        let mut transitions = Vec::with_capacity(doc.transitions.len());
        for (i, t) in doc.transitions.into_iter().enumerate() {
            if t.acc.is_some() || t.mov.is_some() {
                return Err(ParseError::invalid(
                    format!("transitions[{i}]"),
                    "acc/mov are only valid for raa",
                ));
            }
            transitions.push(Transition::new(
                t.from,
                guard_from_doc(t.guard),
                assign_from_doc(t.assign),
                t.to,
            ));
        }
        Dra::new(
            doc.states,
            doc.registers,
            doc.initial,
            accepting,
            transitions,
        )
        .map_err(locate)
    }

    /// Pretty-printed JSON document.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("automaton documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Dra, ParseError> {
        let doc: AutomatonDoc = serde_json::from_str(text)?;
        Dra::from_doc(doc)
    }
}

pub fn serialize(dra: &Dra) -> String {
    dra.to_json()
}

pub fn parse(text: &str) -> Result<Dra, ParseError> {
    Dra::from_json(text)
}
