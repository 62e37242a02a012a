#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use regrobust::automata::{Assignment, Atom, CmpOp, Dra, Guard, Operand, Transition};
use regrobust::Rational;

/// A deterministic automaton whose guards come from splitting `true`
/// recursively on random comparisons, so sibling guards are disjoint and no
/// guard uses `!=`.
pub fn random_dra(
    rng: &mut ChaCha8Rng,
    max_states: usize,
    max_regs: usize,
    constants: &[i64],
) -> Dra {
    let n = rng.random_range(1..=max_states);
    let k = rng.random_range(0..=max_regs);
    let mut operands: Vec<Operand> = (0..k).map(Operand::Reg).collect();
    operands.extend(
        constants
            .iter()
            .map(|&c| Operand::Const(Rational::from_integer(c))),
    );
    let mut transitions = Vec::new();
    for q in 0..n {
        let mut leaves = Vec::new();
        split(rng, &operands, Vec::new(), 0, &mut leaves);
        for atoms in leaves {
            if rng.random_bool(0.15) {
                continue;
            }
            let updates: Vec<(usize, Operand)> = (0..k)
                .filter_map(|r| match rng.random_range(0..4) {
                    0 | 1 => Some((r, Operand::Curr)),
                    2 if k > 1 => Some((r, Operand::Reg((r + 1) % k))),
                    _ => None,
                })
                .collect();
            transitions.push(Transition::new(
                q,
                Guard::new(atoms),
                Assignment::new(updates),
                rng.random_range(0..n),
            ));
        }
    }
    let accepting: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    Dra::new(n, k, 0, accepting, transitions).expect("generated automaton is well formed")
}

fn split(
    rng: &mut ChaCha8Rng,
    operands: &[Operand],
    atoms: Vec<Atom>,
    depth: usize,
    out: &mut Vec<Vec<Atom>>,
) {
    if depth >= 2 || operands.is_empty() || rng.random_bool(0.35) {
        out.push(atoms);
        return;
    }
    let x = operands[rng.random_range(0..operands.len())].clone();
    let pieces: Vec<CmpOp> = match rng.random_range(0..3) {
        0 => vec![CmpOp::Lt, CmpOp::Ge],
        1 => vec![CmpOp::Le, CmpOp::Gt],
        _ => vec![CmpOp::Lt, CmpOp::Eq, CmpOp::Gt],
    };
    for op in pieces {
        let mut a = atoms.clone();
        a.push(Atom::new(Operand::Curr, op, x.clone()));
        split(rng, operands, a, depth + 1, out);
    }
}
