#![allow(dead_code)]

use regrobust::automata::{Assignment, Atom, CmpOp, Dra, Guard, Operand, Transition};

use Operand::{Curr, Reg};

pub fn atom(l: Operand, op: CmpOp, r: Operand) -> Atom {
    Atom::new(l, op, r)
}

pub fn tr(from: usize, atoms: Vec<Atom>, updates: Vec<(usize, Operand)>, to: usize) -> Transition {
    Transition::new(from, Guard::new(atoms), Assignment::new(updates), to)
}

/// Higher highs and higher lows; registers hold the last trough, the last
/// peak and the previous value.
pub fn hhhl() -> Dra {
    let (r1, r2, r3) = (Reg(0), Reg(1), Reg(2));
    Dra::with_accepting(
        4,
        3,
        0,
        &[1, 2, 3],
        vec![
            tr(
                0,
                vec![atom(r1.clone(), CmpOp::Ge, Curr)],
                vec![(0, Curr)],
                0,
            ),
            tr(
                0,
                vec![atom(r1.clone(), CmpOp::Lt, Curr)],
                vec![(1, Curr)],
                1,
            ),
            tr(
                1,
                vec![atom(r2.clone(), CmpOp::Le, Curr)],
                vec![(1, Curr)],
                1,
            ),
            tr(
                1,
                vec![
                    atom(r2.clone(), CmpOp::Gt, Curr),
                    atom(r1.clone(), CmpOp::Lt, Curr),
                ],
                vec![(2, Curr)],
                2,
            ),
            tr(
                2,
                vec![
                    atom(r3.clone(), CmpOp::Ge, Curr),
                    atom(r1.clone(), CmpOp::Lt, Curr),
                ],
                vec![(2, Curr)],
                2,
            ),
            tr(
                2,
                vec![atom(r3.clone(), CmpOp::Lt, Curr)],
                vec![(0, r3.clone()), (2, Curr)],
                3,
            ),
            tr(
                3,
                vec![atom(r3.clone(), CmpOp::Le, Curr)],
                vec![(2, Curr)],
                3,
            ),
            tr(
                3,
                vec![
                    atom(r3.clone(), CmpOp::Gt, Curr),
                    atom(r2, CmpOp::Lt, r3.clone()),
                ],
                vec![(1, r3), (2, Curr)],
                2,
            ),
        ],
    )
    .unwrap()
}

/// Strictly increasing sequences.
pub fn increasing() -> Dra {
    Dra::with_accepting(
        2,
        1,
        0,
        &[1],
        vec![
            tr(0, vec![], vec![(0, Curr)], 1),
            tr(1, vec![atom(Reg(0), CmpOp::Lt, Curr)], vec![(0, Curr)], 1),
        ],
    )
    .unwrap()
}
