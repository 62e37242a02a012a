//! Interval guards `low ≤ curr ≤ high` (either side possibly strict or
//! absent) and register update sources, shared by both learners.

use crate::automata::guard::{Assignment, Atom, CmpOp, Guard, Operand};
use crate::rational::Rational;

/// An interval endpoint: a register or a constant slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Reg(usize),
    Const(usize),
}

impl Endpoint {
    pub fn operand(self, consts: &[Rational]) -> Operand {
        match self {
            Endpoint::Reg(i) => Operand::Reg(i),
            Endpoint::Const(j) => Operand::Const(consts[j].clone()),
        }
    }

    /// All endpoints over `k` registers and `c` constant slots.
    pub fn all(k: usize, c: usize) -> Vec<Endpoint> {
        (0..k).map(Endpoint::Reg).chain((0..c).map(Endpoint::Const)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bound {
    pub at: Endpoint,
    pub strict: bool,
}

/// `None` on a side means unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalGuard {
    pub low: Option<Bound>,
    pub high: Option<Bound>,
}

impl IntervalGuard {
    pub const TOP: IntervalGuard = IntervalGuard { low: None, high: None };

    pub fn point(at: Endpoint) -> IntervalGuard {
        let b = Some(Bound { at, strict: false });
        IntervalGuard { low: b, high: b }
    }

    pub fn to_guard(&self, consts: &[Rational]) -> Guard {
        if let (Some(l), Some(h)) = (self.low, self.high) {
            if l.at == h.at && !l.strict && !h.strict {
                return Guard::new(vec![Atom::new(l.at.operand(consts), CmpOp::Eq, Operand::Curr)]);
            }
        }
        let mut atoms = Vec::new();
        if let Some(l) = self.low {
            let op = if l.strict { CmpOp::Lt } else { CmpOp::Le };
            atoms.push(Atom::new(l.at.operand(consts), op, Operand::Curr));
        }
        if let Some(h) = self.high {
            let op = if h.strict { CmpOp::Lt } else { CmpOp::Le };
            atoms.push(Atom::new(Operand::Curr, op, h.at.operand(consts)));
        }
        Guard::new(atoms)
    }

    /// Every shape over `k` registers and `c` constant slots.
    pub fn lattice(k: usize, c: usize) -> Vec<IntervalGuard> {
        let mut sides = vec![None];
        for at in Endpoint::all(k, c) {
            for strict in [false, true] {
                sides.push(Some(Bound { at, strict }));
            }
        }
        let mut out = Vec::new();
        for &low in &sides {
            for &high in &sides {
                out.push(IntervalGuard { low, high });
            }
        }
        out
    }
}

/// Where a register's next value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Keep,
    Reg(usize),
    Const(usize),
    Curr,
}

impl Source {
    /// Sources available to register `i`.
    pub fn all_for(i: usize, k: usize, c: usize) -> Vec<Source> {
        let mut out = vec![Source::Keep, Source::Curr];
        out.extend((0..k).filter(|&j| j != i).map(Source::Reg));
        out.extend((0..c).map(Source::Const));
        out
    }
}

pub fn to_assignment(sources: &[Source], consts: &[Rational]) -> Assignment {
    let updates = sources
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            let src = match *s {
                Source::Keep => return None,
                Source::Reg(j) => Operand::Reg(j),
                Source::Const(j) => Operand::Const(consts[j].clone()),
                Source::Curr => Operand::Curr,
            };
            Some((i, src))
        })
        .collect();
    Assignment::new(updates)
}
