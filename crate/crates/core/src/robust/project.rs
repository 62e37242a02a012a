//! Fixing the first input of a metric automaton and pairing it with the
//! automaton whose label should flip.

use crate::automata::dra::Dra;
use crate::automata::guard::{Assignment, Atom, CmpOp, Guard, Operand};
use crate::automata::order::{check_atoms, normalize, Normalized, Rel, Sat, Term};
use crate::metric::raa::{AccUpdate, Move, Raa, RaaTransition};
use crate::rational::Rational;
use crate::robust::RobustError;

/// A metric automaton whose head 1 can only read `v`, with head-2 letters
/// confined to `[-alpha, alpha]`.
///
/// State `s` encodes the metric state `s / (|v| + 1)` with head 1 at
/// position `s % (|v| + 1) + 1`. The unbounded automaton is kept so that the
/// bound can be widened once the constants of the other automaton are known.
#[derive(Clone, Debug)]
pub struct BoundedProjectedRaa {
    pub raa: Raa,
    pub alpha: Rational,
    pub v: Vec<Rational>,
    unbounded: Raa,
}

impl BoundedProjectedRaa {
    /// Position of head 1 (1-based) in a state of the projected automaton.
    pub fn head1(&self, state: usize) -> usize {
        state % (self.v.len() + 1) + 1
    }

    pub fn unbounded(&self) -> &Raa {
        &self.unbounded
    }
}

fn atom_from(lhs: Term<Operand>, rel: Rel, rhs: Term<Operand>) -> Atom {
    let op = |t: Term<Operand>| match t {
        Term::Var(o) => o,
        Term::Const(c) => Operand::Const(c),
    };
    let cmp = match rel {
        Rel::Lt => CmpOp::Lt,
        Rel::Le => CmpOp::Le,
        Rel::Eq => CmpOp::Eq,
        Rel::Ne => CmpOp::Ne,
    };
    Atom::new(op(lhs), cmp, op(rhs))
}

/// Substitutes constants and folds offsets. `None` when the guard is
/// unsatisfiable on constants alone; each returned guard is `!=`-free.
fn fold_guard(
    guard: &Guard,
    subst: &impl Fn(&Operand) -> Operand,
    index: usize,
) -> Result<Option<Vec<Guard>>, RobustError> {
    let mut alternatives: Vec<Vec<Atom>> = vec![Vec::new()];
    for a in &guard.atoms {
        let a = a.map_operands(subst);
        match normalize(&a) {
            Normalized::True => {}
            Normalized::False => return Ok(None),
            Normalized::Unsupported => {
                return Err(RobustError::UnsupportedOffset { transition: index })
            }
            Normalized::Constraint(c) if c.rel == Rel::Ne => {
                let lt = atom_from(c.lhs.clone(), Rel::Lt, c.rhs.clone());
                let gt = atom_from(c.rhs, Rel::Lt, c.lhs);
                alternatives = alternatives
                    .into_iter()
                    .flat_map(|alt| {
                        let mut x = alt.clone();
                        x.push(lt.clone());
                        let mut y = alt;
                        y.push(gt.clone());
                        [x, y]
                    })
                    .collect();
            }
            Normalized::Constraint(c) => {
                let atom = atom_from(c.lhs, c.rel, c.rhs);
                for alt in &mut alternatives {
                    alt.push(atom.clone());
                }
            }
        }
    }
    Ok(Some(
        alternatives
            .into_iter()
            .filter(|alt| !matches!(check_atoms(alt.iter()), Sat::Unsat))
            .map(Guard::new)
            .collect(),
    ))
}

fn max_abs<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Rational {
    xs.into_iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

fn bounded(raa: &Raa, alpha: &Rational) -> Raa {
    let mut out = raa.clone();
    let neg = -alpha;
    for t in &mut out.transitions {
        if t.mov.moves_head2() {
            t.guard.atoms.push(Atom::new(
                Operand::Curr2,
                CmpOp::Ge,
                Operand::Const(neg.clone()),
            ));
            t.guard.atoms.push(Atom::new(
                Operand::Curr2,
                CmpOp::Le,
                Operand::Const(alpha.clone()),
            ));
        }
    }
    out
}

/// Pins head 1 to `v` and bounds head-2 letters.
///
/// With `delta` the bound starts from `max |(delta - b) / a|` over cost
/// updates `a·curr2 + b` with `a ≠ 0`; without it only the widening applies:
/// one more than the largest absolute constant, letter of `v` or cost root
/// `-b / a`.
pub fn project_and_bound(
    metric: &Raa,
    v: &[Rational],
    delta: Option<&Rational>,
) -> Result<BoundedProjectedRaa, RobustError> {
    let rows = v.len() + 1;
    let id = |q: usize, h1: usize| q * rows + (h1 - 1);
    let mut transitions = Vec::new();
    for (index, t) in metric.transitions.iter().enumerate() {
        for h1 in 1..=rows {
            let c1 = v.get(h1 - 1);
            if c1.is_none() && (t.mov.moves_head1() || t.reads_curr1()) {
                continue;
            }
            let subst = |o: &Operand| match (o, c1) {
                (Operand::Curr1, Some(c)) => Operand::Const(c.clone()),
                _ => o.clone(),
            };
            let Some(guards) = fold_guard(&t.guard, &subst, index)? else {
                continue;
            };
            let mut b = t.acc.b.clone();
            if let Some(c) = c1 {
                b += &(&t.acc.a1 * c);
            }
            let acc = AccUpdate::new(Rational::zero(), t.acc.a2.clone(), b);
            let assign = t.assign.map_operands(&|i| i, &subst);
            let to = id(t.to, h1 + usize::from(t.mov.moves_head1()));
            for mut g in guards {
                if let (true, Some(c)) = (t.mov.moves_head1(), c1) {
                    g.atoms.push(Atom::new(
                        Operand::Curr1,
                        CmpOp::Eq,
                        Operand::Const(c.clone()),
                    ));
                }
                transitions.push(RaaTransition::new(
                    id(t.from, h1),
                    g,
                    assign.clone(),
                    acc.clone(),
                    t.mov,
                    to,
                ));
            }
        }
    }
    let mut accepting = vec![false; metric.num_states * rows];
    for q in 0..metric.num_states {
        accepting[id(q, rows)] = metric.accepting[q];
    }
    let unbounded = Raa {
        num_states: metric.num_states * rows,
        num_registers: metric.num_registers,
        initial: id(metric.initial, 1),
        accepting,
        transitions,
    };

    let mut alpha = Rational::one();
    let mut consts: Vec<Rational> = unbounded.constants();
    consts.extend(v.iter().cloned());
    for t in &unbounded.transitions {
        if !t.acc.a2.is_zero() {
            let root = -(&t.acc.b / &t.acc.a2);
            consts.push(root);
            if let Some(d) = delta {
                alpha = alpha.max(((d - &t.acc.b) / &t.acc.a2).abs());
            }
        }
    }
    alpha = alpha.max(&max_abs(&consts) + &Rational::one());
    Ok(BoundedProjectedRaa {
        raa: bounded(&unbounded, &alpha),
        alpha,
        v: v.to_vec(),
        unbounded,
    })
}

/// The product of a projected metric with the automaton that must accept the
/// perturbed sequence. State `s` is `(projected state s / n, target state s % n)`.
#[derive(Clone, Debug)]
pub struct ProductRaa {
    pub raa: Raa,
    pub alpha: Rational,
    pub v: Vec<Rational>,
    target_states: usize,
}

impl ProductRaa {
    pub fn head1(&self, state: usize) -> usize {
        (state / self.target_states) % (self.v.len() + 1) + 1
    }

    pub fn curr1(&self, state: usize) -> Option<&Rational> {
        self.v.get(self.head1(state) - 1)
    }
}

/// Pairs `bp` with `target`, which reads head-2 letters and stays put on
/// moves of head 1 alone. `target` must be complete and `!=`-free; the
/// product accepts when both components do.
pub fn product(bp: &BoundedProjectedRaa, target: &Dra) -> ProductRaa {
    let alpha = bp
        .alpha
        .clone()
        .max(&max_abs(&target.constants()) + &Rational::one());
    let proj = bounded(&bp.unbounded, &alpha);
    let n = target.num_states;
    let km = proj.num_registers;
    let lift = |o: &Operand| match o {
        Operand::Curr => Operand::Curr2,
        Operand::Reg(i) => Operand::Reg(km + i),
        other => other.clone(),
    };
    let mut transitions = Vec::new();
    for t in &proj.transitions {
        for p in 0..n {
            if t.mov == Move::Head1 {
                transitions.push(RaaTransition::new(
                    t.from * n + p,
                    t.guard.clone(),
                    t.assign.clone(),
                    t.acc.clone(),
                    t.mov,
                    t.to * n + p,
                ));
                continue;
            }
            for (_, u) in target.outgoing(p) {
                let guard = t.guard.and(&u.guard.map_operands(&lift));
                if matches!(check_atoms(guard.atoms.iter()), Sat::Unsat) {
                    continue;
                }
                let mut updates = t.assign.updates.clone();
                updates.extend(u.assign.map_operands(&|i| km + i, &lift).updates);
                transitions.push(RaaTransition::new(
                    t.from * n + p,
                    guard,
                    Assignment::new(updates),
                    t.acc.clone(),
                    t.mov,
                    t.to * n + u.to,
                ));
            }
        }
    }
    let num_states = proj.num_states * n;
    let accepting = (0..num_states)
        .map(|s| proj.accepting[s / n] && target.accepting[s % n])
        .collect();
    ProductRaa {
        raa: Raa {
            num_states,
            num_registers: km + target.num_registers,
            initial: proj.initial * n + target.initial,
            accepting,
            transitions,
        },
        alpha,
        v: bp.v.clone(),
        target_states: n,
    }
}

/// Replaces strict comparisons by their non-strict counterparts.
pub fn closure(raa: &Raa) -> Result<Raa, RobustError> {
    let mut out = raa.clone();
    for t in &mut out.transitions {
        for a in &mut t.guard.atoms {
            if a.op == CmpOp::Ne {
                return Err(RobustError::DisequalityPresent);
            }
            a.op = a.op.closed();
        }
    }
    Ok(out)
}
