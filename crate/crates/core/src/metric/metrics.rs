use std::fmt;
use std::str::FromStr;

use crate::automata::guard::{Assignment, Atom, CmpOp, Guard, Operand};
use crate::metric::raa::{AccUpdate, Move, Raa, RaaTransition};
use crate::rational::Rational;

/// The distance metrics available as two-head automata.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MetricKind {
    LastLetter,
    Hamming,
    ThresholdHamming(Rational),
    Manhattan,
    Edit { subst: Rational, insdel: Rational },
    Dtw,
}

impl MetricKind {
    pub fn edit() -> MetricKind {
        MetricKind::Edit {
            subst: Rational::one(),
            insdel: Rational::one(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("unknown metric `{0}` (expected last_letter, hamming, threshold_hamming:C, manhattan, edit[:S,I] or dtw)")]
    Unknown(String),
    #[error("metric parameter: {0}")]
    Parameter(String),
}

impl FromStr for MetricKind {
    type Err = MetricError;

    /// `last_letter`, `hamming`, `threshold_hamming:1/2`, `manhattan`,
    /// `edit`, `edit:2,1` (substitution, insert/delete) and `dtw`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let num = |a: &str| {
            a.parse::<Rational>()
                .map_err(|e| MetricError::Parameter(e.to_string()))
        };
        match (name.replace('-', "_").as_str(), arg) {
            ("last_letter", None) => Ok(MetricKind::LastLetter),
            ("hamming", None) => Ok(MetricKind::Hamming),
            ("manhattan", None) => Ok(MetricKind::Manhattan),
            ("dtw", None) => Ok(MetricKind::Dtw),
            ("edit", None) => Ok(MetricKind::edit()),
            ("edit", Some(a)) => {
                let (s, i) = a
                    .split_once(',')
                    .ok_or_else(|| MetricError::Parameter("edit:SUBST,INSDEL".into()))?;
                Ok(MetricKind::Edit {
                    subst: num(s)?,
                    insdel: num(i)?,
                })
            }
            ("threshold_hamming", Some(a)) => {
                let c = num(a)?;
                if c.is_negative() {
                    return Err(MetricError::Parameter(
                        "threshold must be non-negative".into(),
                    ));
                }
                Ok(MetricKind::ThresholdHamming(c))
            }
            _ => Err(MetricError::Unknown(s.to_string())),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::LastLetter => f.write_str("last_letter"),
            MetricKind::Hamming => f.write_str("hamming"),
            MetricKind::ThresholdHamming(c) => write!(f, "threshold_hamming:{}", short(c)),
            MetricKind::Manhattan => f.write_str("manhattan"),
            MetricKind::Edit { subst, insdel }
                if *subst == Rational::one() && *insdel == Rational::one() =>
            {
                f.write_str("edit")
            }
            MetricKind::Edit { subst, insdel } => {
                write!(f, "edit:{},{}", short(subst), short(insdel))
            }
            MetricKind::Dtw => f.write_str("dtw"),
        }
    }
}

/// Integers print without a denominator.
fn short(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        r.to_string()
    }
}

fn atom(l: Operand, op: CmpOp, r: Operand) -> Atom {
    Atom::new(l, op, r)
}

fn g(atoms: Vec<Atom>) -> Guard {
    Guard::new(atoms)
}

fn t(from: usize, guard: Guard, acc: AccUpdate, mov: Move, to: usize) -> RaaTransition {
    RaaTransition::new(from, guard, Assignment::none(), acc, mov, to)
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// `acc += curr2 - curr1`
fn up() -> AccUpdate {
    AccUpdate::new(q(-1), q(1), q(0))
}

/// `acc += curr1 - curr2`
fn down() -> AccUpdate {
    AccUpdate::new(q(1), q(-1), q(0))
}

use Operand::{Curr1 as C1, Curr2 as C2};

pub fn hamming() -> Raa {
    Raa {
        num_states: 1,
        num_registers: 0,
        initial: 0,
        accepting: vec![true],
        transitions: vec![
            t(
                0,
                g(vec![atom(C1, CmpOp::Lt, C2)]),
                AccUpdate::constant(q(1)),
                Move::Both,
                0,
            ),
            t(
                0,
                g(vec![atom(C1, CmpOp::Gt, C2)]),
                AccUpdate::constant(q(1)),
                Move::Both,
                0,
            ),
            t(
                0,
                g(vec![atom(C1, CmpOp::Eq, C2)]),
                AccUpdate::zero(),
                Move::Both,
                0,
            ),
        ],
    }
}

pub fn manhattan() -> Raa {
    Raa {
        num_states: 1,
        num_registers: 0,
        initial: 0,
        accepting: vec![true],
        transitions: vec![
            t(0, g(vec![atom(C1, CmpOp::Le, C2)]), up(), Move::Both, 0),
            t(0, g(vec![atom(C1, CmpOp::Gt, C2)]), down(), Move::Both, 0),
        ],
    }
}

/// Transitions t1 to t5: matched pair with or without substitution, an
/// unmatched pair removed from both sides, and single deletions on either side.
pub fn edit(subst: Rational, insdel: Rational) -> Raa {
    let two_insdel = &insdel + &insdel;
    Raa {
        num_states: 1,
        num_registers: 0,
        initial: 0,
        accepting: vec![true],
        transitions: vec![
            t(
                0,
                g(vec![atom(C1, CmpOp::Ne, C2)]),
                AccUpdate::constant(subst),
                Move::Both,
                0,
            ),
            t(
                0,
                g(vec![atom(C1, CmpOp::Eq, C2)]),
                AccUpdate::zero(),
                Move::Both,
                0,
            ),
            t(
                0,
                Guard::top(),
                AccUpdate::constant(two_insdel),
                Move::Both,
                0,
            ),
            t(
                0,
                Guard::top(),
                AccUpdate::constant(insdel.clone()),
                Move::Head1,
                0,
            ),
            t(0, Guard::top(), AccUpdate::constant(insdel), Move::Head2, 0),
        ],
    }
}

/// Charges `|curr1 - curr2|` for the pair under the heads, then advances
/// one or both heads. Acceptance needs both heads exhausted, which only a
/// diagonal step from the last pair achieves (a single-head step would leave
/// the other letter undefined for the next charge).
pub fn dtw() -> Raa {
    let mut transitions = Vec::new();
    for mov in [Move::Head1, Move::Head2, Move::Both] {
        transitions.push(t(0, g(vec![atom(C1, CmpOp::Le, C2)]), up(), mov, 0));
        transitions.push(t(0, g(vec![atom(C1, CmpOp::Gt, C2)]), down(), mov, 0));
    }
    Raa {
        num_states: 1,
        num_registers: 0,
        initial: 0,
        accepting: vec![true],
        transitions,
    }
}

/// States q0 (equal prefix) and p (after the last pair).
pub fn last_letter() -> Raa {
    Raa {
        num_states: 2,
        num_registers: 0,
        initial: 0,
        accepting: vec![false, true],
        transitions: vec![
            t(
                0,
                g(vec![atom(C1, CmpOp::Eq, C2)]),
                AccUpdate::zero(),
                Move::Both,
                0,
            ),
            t(0, g(vec![atom(C1, CmpOp::Ge, C2)]), down(), Move::Both, 1),
            t(0, g(vec![atom(C1, CmpOp::Lt, C2)]), up(), Move::Both, 1),
        ],
    }
}

/// Counts positions with `|curr1 - curr2| > c`.
pub fn threshold_hamming(c: Rational) -> Raa {
    let neg_c = -&c;
    Raa {
        num_states: 1,
        num_registers: 0,
        initial: 0,
        accepting: vec![true],
        transitions: vec![
            t(
                0,
                g(vec![Atom::with_offset(C2, CmpOp::Lt, C1, neg_c.clone())]),
                AccUpdate::constant(q(1)),
                Move::Both,
                0,
            ),
            t(
                0,
                g(vec![Atom::with_offset(C2, CmpOp::Gt, C1, c.clone())]),
                AccUpdate::constant(q(1)),
                Move::Both,
                0,
            ),
            t(
                0,
                g(vec![
                    Atom::with_offset(C2, CmpOp::Ge, C1, neg_c),
                    Atom::with_offset(C2, CmpOp::Le, C1, c),
                ]),
                AccUpdate::zero(),
                Move::Both,
                0,
            ),
        ],
    }
}

pub fn build_metric(kind: &MetricKind) -> Raa {
    match kind {
        MetricKind::LastLetter => last_letter(),
        MetricKind::Hamming => hamming(),
        MetricKind::ThresholdHamming(c) => threshold_hamming(c.clone()),
        MetricKind::Manhattan => manhattan(),
        MetricKind::Edit { subst, insdel } => edit(subst.clone(), insdel.clone()),
        MetricKind::Dtw => dtw(),
    }
}
