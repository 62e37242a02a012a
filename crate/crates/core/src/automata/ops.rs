//! Language-level constructions on DRAs.

use crate::automata::dra::{Dra, Transition};
use crate::automata::guard::{Assignment, Atom, CmpOp, Guard};
use crate::automata::order::maybe_satisfiable;

/// Disjoint guards whose union is the complement of `g`:
/// `¬(a1 ∧ … ∧ an) = ⋃_i (a1 ∧ … ∧ a_{i-1} ∧ ¬a_i)`.
pub fn negate_guard(g: &Guard) -> Vec<Guard> {
    let mut pieces = Vec::new();
    for (i, a) in g.atoms.iter().enumerate() {
        for neg in a.negation() {
            let mut atoms: Vec<Atom> = g.atoms[..i].to_vec();
            atoms.push(neg);
            if maybe_satisfiable(&atoms) {
                pieces.push(Guard::new(atoms));
            }
        }
    }
    pieces
}

/// Disjoint guards covering exactly the valuations where none of `guards` holds.
pub fn uncovered_region(guards: &[&Guard]) -> Vec<Guard> {
    let mut region = vec![Guard::top()];
    for g in guards {
        let negs = negate_guard(g);
        let mut next = Vec::new();
        for piece in &region {
            for n in &negs {
                let joined = piece.and(n);
                if maybe_satisfiable(&joined.atoms) {
                    next.push(joined);
                }
            }
        }
        region = next;
        if region.is_empty() {
            break;
        }
    }
    region
}

/// Adds a rejecting sink that receives every letter no existing guard accepts.
pub fn complete(dra: &Dra) -> Dra {
    let sink = dra.num_states;
    let mut transitions = dra.transitions.clone();
    for q in 0..dra.num_states {
        let guards: Vec<&Guard> = dra.outgoing(q).map(|(_, t)| &t.guard).collect();
        for g in uncovered_region(&guards) {
            transitions.push(Transition::new(q, g, Assignment::none(), sink));
        }
    }
    transitions.push(Transition::new(
        sink,
        Guard::top(),
        Assignment::none(),
        sink,
    ));
    let mut accepting = dra.accepting.clone();
    accepting.push(false);
    Dra {
        num_states: dra.num_states + 1,
        num_registers: dra.num_registers,
        initial: dra.initial,
        accepting,
        transitions,
    }
}

/// An automaton accepting exactly the sequences `dra` rejects.
pub fn complement(dra: &Dra) -> Dra {
    let mut c = complete(dra);
    for a in c.accepting.iter_mut() {
        *a = !*a;
    }
    c
}

/// Replaces every `x != y` atom by the two cases `x < y` and `x > y`,
/// dropping combinations that cannot hold.
pub fn split_guard(g: &Guard) -> Vec<Guard> {
    let mut out = vec![Vec::<Atom>::new()];
    for a in &g.atoms {
        if a.op == CmpOp::Ne {
            let mut next = Vec::with_capacity(out.len() * 2);
            for prefix in &out {
                for op in [CmpOp::Lt, CmpOp::Gt] {
                    let mut p = prefix.clone();
                    p.push(Atom { op, ..a.clone() });
                    next.push(p);
                }
            }
            out = next;
        } else {
            for p in out.iter_mut() {
                p.push(a.clone());
            }
        }
    }
    if !g.has_disequality() {
        return vec![g.clone()];
    }
    out.into_iter()
        .filter(|atoms| maybe_satisfiable(atoms))
        .map(Guard::new)
        .collect()
}

pub fn split_disequalities(dra: &Dra) -> Dra {
    let mut transitions = Vec::with_capacity(dra.transitions.len());
    for t in &dra.transitions {
        for g in split_guard(&t.guard) {
            transitions.push(Transition::new(t.from, g, t.assign.clone(), t.to));
        }
    }
    Dra {
        transitions,
        ..dra.clone()
    }
}

/// One accepting state looping on every letter.
pub fn universal() -> Dra {
    Dra {
        num_states: 1,
        num_registers: 0,
        initial: 0,
        accepting: vec![true],
        transitions: vec![Transition::new(0, Guard::top(), Assignment::none(), 0)],
    }
}

/// One rejecting state looping on every letter.
pub fn empty_language() -> Dra {
    Dra {
        accepting: vec![false],
        ..universal()
    }
}

/// The automaton reading `-x` for every letter `x`: comparisons are
/// mirrored and constants negated.
pub fn mirror(dra: &Dra) -> Dra {
    use crate::automata::guard::Operand;
    let neg = |o: &Operand| match o {
        Operand::Const(c) => Operand::Const(-c),
        other => other.clone(),
    };
    let transitions = dra
        .transitions
        .iter()
        .map(|t| {
            let atoms = t
                .guard
                .atoms
                .iter()
                .map(|a| Atom {
                    lhs: neg(&a.lhs),
                    op: a.op.mirrored(),
                    rhs: neg(&a.rhs),
                    offset: -&a.offset,
                })
                .collect();
            Transition::new(
                t.from,
                Guard::new(atoms),
                t.assign.map_operands(&|r| r, &neg),
                t.to,
            )
        })
        .collect();
    Dra {
        transitions,
        ..dra.clone()
    }
}
