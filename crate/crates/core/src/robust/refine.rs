//! Turning a least-weight graph path into a concrete perturbed sequence.

use std::collections::BTreeMap;

use crate::automata::guard::{CmpOp, Operand};
use crate::automata::order::{holds, solve, Constraint, Rel, Term};
use crate::rational::Rational;
use crate::robust::graph::{CoverabilityGraph, GraphPath};
use crate::robust::RobustError;

/// The guards met along a path, over variables `w_0 .. w_{n-1}` for the
/// head-2 letters, together with the path cost `Σ coeffs[i]·w_i + constant`.
#[derive(Clone, Debug)]
pub struct PathConstraintSystem {
    pub constraints: Vec<Constraint<usize>>,
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
    /// Standard parts of the letters chosen in the graph: a point of the
    /// closed system where the cost equals the path weight.
    pub closed_point: Vec<Rational>,
}

impl PathConstraintSystem {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn cost(&self, w: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(w)
            .fold(self.constant.clone(), |acc, (a, x)| &acc + &(a * x))
    }

    pub fn satisfied_by(&self, w: &[Rational]) -> bool {
        holds(&self.constraints, &as_map(w))
    }

    /// Replays the path with symbolic registers.
    pub fn from_path(g: &CoverabilityGraph<'_>, path: &GraphPath) -> Result<Self, RobustError> {
        let raa = &g.product.raa;
        let mut regs: Vec<Term<usize>> = vec![Term::Const(Rational::zero()); raa.num_registers];
        let mut pending: Option<usize> = None;
        let mut sys = PathConstraintSystem {
            constraints: Vec::new(),
            coeffs: Vec::new(),
            constant: Rational::zero(),
            closed_point: Vec::new(),
        };
        for (from, e) in &path.steps {
            let t = &raa.transitions[e.transition];
            let c1 = g.product.curr1(g.vertices[*from].state).cloned();
            let curr2 = match (&e.letter, pending) {
                (None, _) => None,
                (Some(_), Some(p)) => Some(p),
                (Some(h), None) => {
                    sys.coeffs.push(Rational::zero());
                    sys.closed_point.push(h.std.clone());
                    Some(sys.coeffs.len() - 1)
                }
            };
            let term = |o: &Operand| -> Term<usize> {
                match o {
                    Operand::Reg(r) => regs[*r].clone(),
                    Operand::Curr1 => Term::Const(c1.clone().expect("head 1 within v")),
                    Operand::Curr2 => Term::Var(curr2.expect("letter read")),
                    Operand::Const(c) => Term::Const(c.clone()),
                    Operand::Curr => unreachable!("product guards use curr1 and curr2"),
                }
            };
            for a in &t.guard.atoms {
                let (mut l, mut r) = (term(&a.lhs), term(&a.rhs));
                let mut op = a.op;
                if !a.offset.is_zero() {
                    match (&l, &r) {
                        (_, Term::Const(c)) => r = Term::Const(c + &a.offset),
                        (Term::Const(c), _) => l = Term::Const(c - &a.offset),
                        _ => {
                            return Err(RobustError::UnsupportedOffset {
                                transition: e.transition,
                            })
                        }
                    }
                }
                if matches!(op, CmpOp::Gt | CmpOp::Ge) {
                    std::mem::swap(&mut l, &mut r);
                    op = op.mirrored();
                }
                let rel = match op {
                    CmpOp::Lt => Rel::Lt,
                    CmpOp::Le => Rel::Le,
                    CmpOp::Eq => Rel::Eq,
                    _ => Rel::Ne,
                };
                sys.constraints.push(Constraint::new(l, rel, r));
            }
            sys.constant += &t.acc.b;
            if let Some(i) = curr2 {
                sys.coeffs[i] += &t.acc.a2;
            }
            let mut next = regs.clone();
            for (target, src) in &t.assign.updates {
                next[*target] = term(src);
            }
            regs = next;
            pending = if t.mov.moves_head2() { None } else { curr2 };
        }
        Ok(sys)
    }
}

fn as_map(w: &[Rational]) -> BTreeMap<usize, Rational> {
    w.iter().cloned().enumerate().collect()
}

fn value(t: &Term<usize>, w: &[Rational]) -> Rational {
    match t {
        Term::Const(c) => c.clone(),
        Term::Var(i) => w[*i].clone(),
    }
}

/// A direction `d` with `w' + t·d` satisfying the strict system for all small
/// `t > 0`: the constraints tight at `w'` must hold for `d` (constants move
/// by 0), the others have slack.
pub fn tangent_direction(sys: &PathConstraintSystem) -> Option<Vec<Rational>> {
    let w = &sys.closed_point;
    let zero = Rational::zero();
    let mut active = Vec::new();
    for c in &sys.constraints {
        if value(&c.lhs, w) == value(&c.rhs, w) {
            let dir = |t: &Term<usize>| match t {
                Term::Var(i) => Term::Var(*i),
                Term::Const(_) => Term::Const(zero.clone()),
            };
            active.push(Constraint::new(dir(&c.lhs), c.rel, dir(&c.rhs)));
        }
    }
    let sol = solve(&active)?;
    Some(
        (0..sys.len())
            .map(|i| sol.get(&i).cloned().unwrap_or_else(Rational::zero))
            .collect(),
    )
}

/// Moves the closed optimum into the strict system while keeping the cost
/// below `delta`. `accept` re-checks a candidate by execution; the step is
/// halved until it passes.
pub fn refine_witness(
    sys: &PathConstraintSystem,
    delta: &Rational,
    accept: impl Fn(&[Rational]) -> bool,
) -> Result<Vec<Rational>, RobustError> {
    let optimum = sys.cost(&sys.closed_point);
    if optimum >= *delta {
        return Err(RobustError::RefinementFailed);
    }
    let base = &sys.closed_point;
    if sys.satisfied_by(base) && accept(base) {
        return Ok(base.clone());
    }
    let d = tangent_direction(sys).ok_or(RobustError::RefinementFailed)?;
    let one = Rational::one();
    let total: Rational = sys.coeffs.iter().map(|a| a.abs()).sum();
    let eta = (delta - &optimum) / (&(&one + &total) * &Rational::from_integer(2));
    let spread = d
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    let mut t = &eta / &(&one + &spread);
    let half = Rational::new(1, 2);
    for _ in 0..=40 {
        let w: Vec<Rational> = base.iter().zip(&d).map(|(x, dx)| x + &(&t * dx)).collect();
        if sys.satisfied_by(&w) && sys.cost(&w) < *delta && accept(&w) {
            return Ok(w);
        }
        t = &t * &half;
    }
    Err(RobustError::RefinementFailed)
}
