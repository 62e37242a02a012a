use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// One side of a comparison, or the source of a register update.
///
/// `Curr` is the letter read by a single-head automaton; `Curr1` and `Curr2`
/// are the letters under the two heads of a two-head automaton.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operand {
    Reg(usize),
    Curr,
    Curr1,
    Curr2,
    Const(Rational),
}

impl Operand {
    pub fn is_const(&self) -> bool {
        matches!(self, Operand::Const(_))
    }

    pub fn constant(&self) -> Option<&Rational> {
        match self {
            Operand::Const(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Reg(i) => write!(f, "r{}", i + 1),
            Operand::Curr => f.write_str("curr"),
            Operand::Curr1 => f.write_str("curr1"),
            Operand::Curr2 => f.write_str("curr2"),
            Operand::Const(c) => write!(f, "{c:?}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=", alias = "≤")]
    Le,
    #[serde(rename = "=", alias = "==")]
    Eq,
    #[serde(rename = "!=", alias = "≠")]
    Ne,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=", alias = "≥")]
    Ge,
}

impl CmpOp {
    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }

    /// The operator obtained by exchanging the two sides.
    pub fn mirrored(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            other => other,
        }
    }

    /// Replaces strict comparisons by their non-strict counterparts.
    pub fn closed(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Le,
            CmpOp::Gt => CmpOp::Ge,
            other => other,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Gt)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// Value domains a guard can be evaluated over: plain rationals, and the
/// infinitesimally perturbed values used by the robustness graph.
pub trait Value: Ord + Clone {
    fn constant(c: &Rational) -> Self;
    fn shifted(&self, by: &Rational) -> Self;
}

impl Value for Rational {
    fn constant(c: &Rational) -> Self {
        c.clone()
    }

    fn shifted(&self, by: &Rational) -> Self {
        self + by
    }
}

/// `lhs op rhs + offset`. The offset is zero for every register automaton
/// guard; only threshold metrics use it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub lhs: Operand,
    pub op: CmpOp,
    pub rhs: Operand,
    pub offset: Rational,
}

impl Atom {
    pub fn new(lhs: Operand, op: CmpOp, rhs: Operand) -> Atom {
        Atom {
            lhs,
            op,
            rhs,
            offset: Rational::zero(),
        }
    }

    pub fn with_offset(lhs: Operand, op: CmpOp, rhs: Operand, offset: Rational) -> Atom {
        Atom {
            lhs,
            op,
            rhs,
            offset,
        }
    }

    pub fn operands(&self) -> [&Operand; 2] {
        [&self.lhs, &self.rhs]
    }

    pub fn mentions(&self, o: &Operand) -> bool {
        &self.lhs == o || &self.rhs == o
    }

    /// Atoms whose disjunction is the negation of `self`. Only `=` needs two.
    pub fn negation(&self) -> Vec<Atom> {
        let with = |op| Atom {
            lhs: self.lhs.clone(),
            op,
            rhs: self.rhs.clone(),
            offset: self.offset.clone(),
        };
        match self.op {
            CmpOp::Lt => vec![with(CmpOp::Ge)],
            CmpOp::Le => vec![with(CmpOp::Gt)],
            CmpOp::Gt => vec![with(CmpOp::Le)],
            CmpOp::Ge => vec![with(CmpOp::Lt)],
            CmpOp::Ne => vec![with(CmpOp::Eq)],
            CmpOp::Eq => vec![with(CmpOp::Lt), with(CmpOp::Gt)],
        }
    }

    /// Evaluates over rationals. `None` when an operand is undefined.
    #[inline]
    pub fn eval<'a>(&'a self, lookup: &impl Fn(&Operand) -> Option<&'a Rational>) -> Option<bool> {
        let l = match &self.lhs {
            Operand::Const(c) => c,
            o => lookup(o)?,
        };
        let r = match &self.rhs {
            Operand::Const(c) => c,
            o => lookup(o)?,
        };
        let ord = if self.offset.is_zero() {
            l.cmp(r)
        } else {
            l.cmp(&(r + &self.offset))
        };
        Some(self.op.holds(ord))
    }

    /// Evaluates over an arbitrary ordered value domain.
    pub fn eval_with<V: Value>(&self, lookup: &impl Fn(&Operand) -> Option<V>) -> Option<bool> {
        let get = |o: &Operand| match o {
            Operand::Const(c) => Some(V::constant(c)),
            o => lookup(o),
        };
        let l = get(&self.lhs)?;
        let mut r = get(&self.rhs)?;
        if !self.offset.is_zero() {
            r = r.shifted(&self.offset);
        }
        Some(self.op.holds(l.cmp(&r)))
    }

    pub fn map_operands(&self, f: &impl Fn(&Operand) -> Operand) -> Atom {
        Atom {
            lhs: f(&self.lhs),
            op: self.op,
            rhs: f(&self.rhs),
            offset: self.offset.clone(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), self.rhs)?;
        if !self.offset.is_zero() {
            write!(f, " + {:?}", self.offset)?;
        }
        Ok(())
    }
}

/// A conjunction of atoms; the empty conjunction is ⊤.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard {
    pub atoms: Vec<Atom>,
}

impl Guard {
    pub fn top() -> Guard {
        Guard { atoms: Vec::new() }
    }

    pub fn new(atoms: Vec<Atom>) -> Guard {
        Guard { atoms }
    }

    pub fn is_top(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn and(&self, other: &Guard) -> Guard {
        let mut atoms = self.atoms.clone();
        for a in &other.atoms {
            if !atoms.contains(a) {
                atoms.push(a.clone());
            }
        }
        Guard { atoms }
    }

    pub fn mentions(&self, o: &Operand) -> bool {
        self.atoms.iter().any(|a| a.mentions(o))
    }

    pub fn has_disequality(&self) -> bool {
        self.atoms.iter().any(|a| a.op == CmpOp::Ne)
    }

    #[inline]
    pub fn eval<'a>(&'a self, lookup: &impl Fn(&Operand) -> Option<&'a Rational>) -> Option<bool> {
        for a in &self.atoms {
            if !a.eval(lookup)? {
                return Some(false);
            }
        }
        Some(true)
    }

    pub fn eval_with<V: Value>(&self, lookup: &impl Fn(&Operand) -> Option<V>) -> Option<bool> {
        for a in &self.atoms {
            if !a.eval_with(lookup)? {
                return Some(false);
            }
        }
        Some(true)
    }

    pub fn map_operands(&self, f: &impl Fn(&Operand) -> Operand) -> Guard {
        Guard {
            atoms: self.atoms.iter().map(|a| a.map_operands(f)).collect(),
        }
    }

    pub fn constants(&self) -> impl Iterator<Item = &Rational> {
        self.atoms
            .iter()
            .flat_map(|a| a.operands())
            .filter_map(Operand::constant)
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("true");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Simultaneous register updates `target := source`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub updates: Vec<(usize, Operand)>,
}

impl Assignment {
    pub fn none() -> Assignment {
        Assignment {
            updates: Vec::new(),
        }
    }

    pub fn new(updates: Vec<(usize, Operand)>) -> Assignment {
        Assignment { updates }
    }

    pub fn single(target: usize, src: Operand) -> Assignment {
        Assignment {
            updates: vec![(target, src)],
        }
    }

    pub fn mentions(&self, o: &Operand) -> bool {
        self.updates.iter().any(|(_, s)| s == o)
    }

    pub fn constants(&self) -> impl Iterator<Item = &Rational> {
        self.updates.iter().filter_map(|(_, s)| s.constant())
    }

    /// Applies the updates to `regs`, reading every source from the old values.
    pub fn apply<V: Value>(
        &self,
        regs: &[V],
        letter: &impl Fn(&Operand) -> Option<V>,
    ) -> Option<Vec<V>> {
        let mut next = regs.to_vec();
        for (t, src) in &self.updates {
            next[*t] = match src {
                Operand::Reg(j) => regs[*j].clone(),
                Operand::Const(c) => V::constant(c),
                o => letter(o)?,
            };
        }
        Some(next)
    }

    pub fn map_operands(
        &self,
        target: &impl Fn(usize) -> usize,
        f: &impl Fn(&Operand) -> Operand,
    ) -> Assignment {
        Assignment {
            updates: self
                .updates
                .iter()
                .map(|(t, s)| (target(*t), f(s)))
                .collect(),
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (t, s)) in self.updates.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "r{} := {}", t + 1, s)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negation_covers_complement() {
        let grid: Vec<Rational> = (-2..=2).map(Rational::from_integer).collect();
        for op in [
            CmpOp::Lt,
            CmpOp::Le,
            CmpOp::Eq,
            CmpOp::Ne,
            CmpOp::Gt,
            CmpOp::Ge,
        ] {
            let a = Atom::new(Operand::Reg(0), op, Operand::Curr);
            for x in &grid {
                for y in &grid {
                    let look = |o: &Operand| match o {
                        Operand::Reg(0) => Some(x),
                        Operand::Curr => Some(y),
                        _ => None,
                    };
                    let pos = a.eval(&look).unwrap();
                    let negs: Vec<bool> = a
                        .negation()
                        .iter()
                        .map(|n| n.eval(&look).unwrap())
                        .collect();
                    assert_eq!(
                        negs.iter().filter(|b| **b).count(),
                        usize::from(!pos),
                        "{op:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn offset_shifts_right_side() {
        let a = Atom::with_offset(
            Operand::Curr2,
            CmpOp::Gt,
            Operand::Curr1,
            Rational::from_integer(2),
        );
        let v1 = Rational::from_integer(1);
        let look = |x: &Rational| {
            let x = x.clone();
            let v1 = v1.clone();
            move |o: &Operand| match o {
                Operand::Curr1 => Some(v1.clone()),
                Operand::Curr2 => Some(x.clone()),
                _ => None,
            }
        };
        assert_eq!(a.eval_with(&look(&Rational::from_integer(3))), Some(false));
        assert_eq!(a.eval_with(&look(&Rational::new(7, 2))), Some(true));
    }

    #[test]
    fn assignment_is_simultaneous() {
        let swap = Assignment::new(vec![(0, Operand::Reg(1)), (1, Operand::Reg(0))]);
        let regs = vec![Rational::from_integer(1), Rational::from_integer(2)];
        let out = swap.apply(&regs, &|_: &Operand| None::<Rational>).unwrap();
        assert_eq!(
            out,
            vec![Rational::from_integer(2), Rational::from_integer(1)]
        );
    }
}
