use crate::automata::dra::{Dra, Transition};
use crate::automata::guard::{Assignment, Guard, Operand};
use crate::metric::raa::{Raa, RaaTransition};

/// Distance restricted to `v ∈ L(l1)` and `w ∈ L(l2)`, with ∞ elsewhere.
///
/// States are triples `(q, p1, p2)` and registers are laid out as the
/// metric's, then `l1`'s, then `l2`'s. `l1` steps on `curr1` whenever head 1
/// moves and `l2` steps on `curr2` whenever head 2 moves.
pub fn restrict_metric(raa: &Raa, l1: &Dra, l2: &Dra) -> Raa {
    let (n0, n1, n2) = (raa.num_states, l1.num_states, l2.num_states);
    let k0 = raa.num_registers;
    let off1 = k0;
    let off2 = k0 + l1.num_registers;
    let id = |q: usize, p1: usize, p2: usize| (q * n1 + p1) * n2 + p2;

    let lift = |t: &Transition, letter: Operand, offset: usize| -> (Guard, Assignment) {
        let f = |o: &Operand| match o {
            Operand::Curr => letter.clone(),
            Operand::Reg(i) => Operand::Reg(i + offset),
            other => other.clone(),
        };
        (
            t.guard.map_operands(&f),
            t.assign.map_operands(&|i| i + offset, &f),
        )
    };

    let mut transitions = Vec::new();
    for t in &raa.transitions {
        for p1 in 0..n1 {
            let steps1: Vec<Option<&Transition>> = if t.mov.moves_head1() {
                l1.outgoing(p1).map(|(_, x)| Some(x)).collect()
            } else {
                vec![None]
            };
            for p2 in 0..n2 {
                let steps2: Vec<Option<&Transition>> = if t.mov.moves_head2() {
                    l2.outgoing(p2).map(|(_, x)| Some(x)).collect()
                } else {
                    vec![None]
                };
                for s1 in &steps1 {
                    for s2 in &steps2 {
                        let mut guard = t.guard.clone();
                        let mut updates = t.assign.updates.clone();
                        let mut to1 = p1;
                        let mut to2 = p2;
                        if let Some(x) = s1 {
                            let (g, a) = lift(x, Operand::Curr1, off1);
                            guard = guard.and(&g);
                            updates.extend(a.updates);
                            to1 = x.to;
                        }
                        if let Some(x) = s2 {
                            let (g, a) = lift(x, Operand::Curr2, off2);
                            guard = guard.and(&g);
                            updates.extend(a.updates);
                            to2 = x.to;
                        }
                        transitions.push(RaaTransition::new(
                            id(t.from, p1, p2),
                            guard,
                            Assignment::new(updates),
                            t.acc.clone(),
                            t.mov,
                            id(t.to, to1, to2),
                        ));
                    }
                }
            }
        }
    }

    let mut accepting = vec![false; n0 * n1 * n2];
    for q in 0..n0 {
        for p1 in 0..n1 {
            for p2 in 0..n2 {
                accepting[id(q, p1, p2)] = raa.accepting[q] && l1.accepting[p1] && l2.accepting[p2];
            }
        }
    }
    Raa {
        num_states: n0 * n1 * n2,
        num_registers: off2 + l2.num_registers,
        initial: id(raa.initial, l1.initial, l2.initial),
        accepting,
        transitions,
    }
}
