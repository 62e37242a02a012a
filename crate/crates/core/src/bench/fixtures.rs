use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::automata::guard::{Assignment, Atom, CmpOp, Guard, Operand};
use crate::automata::ops::mirror;
use crate::automata::{Dra, Transition};
use crate::rational::Rational;

use Operand::{Curr, Reg};

/// The eighteen benchmark languages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BenchmarkId {
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
    L7,
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
    S8,
    S9,
    S10,
    S11,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 18] = [
        BenchmarkId::L1,
        BenchmarkId::L2,
        BenchmarkId::L3,
        BenchmarkId::L4,
        BenchmarkId::L5,
        BenchmarkId::L6,
        BenchmarkId::L7,
        BenchmarkId::S1,
        BenchmarkId::S2,
        BenchmarkId::S3,
        BenchmarkId::S4,
        BenchmarkId::S5,
        BenchmarkId::S6,
        BenchmarkId::S7,
        BenchmarkId::S8,
        BenchmarkId::S9,
        BenchmarkId::S10,
        BenchmarkId::S11,
    ];

    pub fn name(self) -> &'static str {
        use BenchmarkId::*;
        match self {
            L1 => "L1",
            L2 => "L2",
            L3 => "L3",
            L4 => "L4",
            L5 => "L5",
            L6 => "L6",
            L7 => "L7",
            S1 => "S1",
            S2 => "S2",
            S3 => "S3",
            S4 => "S4",
            S5 => "S5",
            S6 => "S6",
            S7 => "S7",
            S8 => "S8",
            S9 => "S9",
            S10 => "S10",
            S11 => "S11",
        }
    }

    pub fn description(self) -> &'static str {
        use BenchmarkId::*;
        match self {
            L1 => "a* with a in [0, 5]",
            L2 => "(ab)*",
            L3 => "a^n b^m with n odd and m even",
            L4 => "no symbol three times in a row",
            L5 => "a(a|b)* with even counts of a and b",
            L6 => "a(a|b)* with count_a = count_b mod 3",
            L7 => "a+ b* a* b*",
            S1 => "strictly increasing",
            S2 => "strictly decreasing",
            S3 => "non-strictly decreasing",
            S4 => "non-strictly increasing",
            S5 => "single peak",
            S6 => "single valley",
            S7 => "two peaks",
            S8 => "three peaks",
            S9 => "higher highs and higher lows",
            S10 => "higher highs and lower lows",
            S11 => "lower highs and lower lows",
        }
    }

    /// File stem used under `benchmarks/`.
    pub fn file_stem(self) -> String {
        self.name().to_lowercase()
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown benchmark `{0}` (expected L1..L7 or S1..S11)")]
pub struct UnknownBenchmark(pub String);

impl FromStr for BenchmarkId {
    type Err = UnknownBenchmark;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BenchmarkId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownBenchmark(s.to_string()))
    }
}

impl TryFrom<String> for BenchmarkId {
    type Error = UnknownBenchmark;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<BenchmarkId> for String {
    fn from(id: BenchmarkId) -> String {
        id.name().to_string()
    }
}

fn atom(l: Operand, op: CmpOp, r: Operand) -> Atom {
    Atom::new(l, op, r)
}

fn tr(from: usize, atoms: Vec<Atom>, updates: Vec<(usize, Operand)>, to: usize) -> Transition {
    Transition::new(from, Guard::new(atoms), Assignment::new(updates), to)
}

fn konst(n: i64) -> Operand {
    Operand::Const(Rational::from_integer(n))
}

pub fn ground_truth(id: BenchmarkId) -> Dra {
    use BenchmarkId::*;
    match id {
        L1 => l1(),
        L2 => tomita(&TOMITA_L2),
        L3 => tomita(&TOMITA_L3),
        L4 => tomita(&TOMITA_L4),
        L5 => tomita(&TOMITA_L5),
        L6 => tomita(&TOMITA_L6),
        L7 => tomita(&TOMITA_L7),
        S1 => monotone(CmpOp::Lt),
        S2 => monotone(CmpOp::Gt),
        S3 => monotone(CmpOp::Ge),
        S4 => monotone(CmpOp::Le),
        S5 => extrema(&[CmpOp::Lt, CmpOp::Gt]),
        S6 => mirror(&extrema(&[CmpOp::Lt, CmpOp::Gt])),
        S7 => extrema(&[CmpOp::Lt, CmpOp::Gt, CmpOp::Lt, CmpOp::Gt]),
        S8 => extrema(&[
            CmpOp::Lt,
            CmpOp::Gt,
            CmpOp::Lt,
            CmpOp::Gt,
            CmpOp::Lt,
            CmpOp::Gt,
        ]),
        S9 => higher_highs_higher_lows(),
        S10 => higher_highs_lower_lows(),
        S11 => mirror(&higher_highs_higher_lows()),
    }
}

/// One register bound to the first letter, which must lie in `[0, 5]`;
/// every later letter must repeat it.
fn l1() -> Dra {
    Dra::with_accepting(
        2,
        1,
        0,
        &[0, 1],
        vec![
            tr(
                0,
                vec![
                    atom(konst(0), CmpOp::Le, Curr),
                    atom(Curr, CmpOp::Le, konst(5)),
                ],
                vec![(0, Curr)],
                1,
            ),
            tr(1, vec![atom(Reg(0), CmpOp::Eq, Curr)], vec![], 1),
        ],
    )
    .expect("fixture is well formed")
}

/// A partial DFA over the symbols `a` (index 0) and `b` (index 1), started
/// in state 0.
struct SymbolicDfa {
    accepting: &'static [usize],
    delta: &'static [[Option<usize>; 2]],
}

const TOMITA_L2: SymbolicDfa = SymbolicDfa {
    accepting: &[0],
    delta: &[[Some(1), None], [None, Some(0)]],
};

// 0 start, 1 odd a's, 2 even a's, 3 odd b's, 4 even (positive) b's.
const TOMITA_L3: SymbolicDfa = SymbolicDfa {
    accepting: &[1, 4],
    delta: &[
        [Some(1), None],
        [Some(2), Some(3)],
        [Some(1), None],
        [None, Some(4)],
        [None, Some(3)],
    ],
};

// 0 start, 1 one a, 2 two a's, 3 one b, 4 two b's.
const TOMITA_L4: SymbolicDfa = SymbolicDfa {
    accepting: &[0, 1, 2, 3, 4],
    delta: &[
        [Some(1), Some(3)],
        [Some(2), Some(3)],
        [None, Some(3)],
        [Some(1), Some(4)],
        [Some(1), None],
    ],
};

// 0 start, then 1 + (count_a mod 2) + 2 (count_b mod 2).
const TOMITA_L5: SymbolicDfa = SymbolicDfa {
    accepting: &[1],
    delta: &[
        [Some(2), None],
        [Some(2), Some(3)],
        [Some(1), Some(4)],
        [Some(4), Some(1)],
        [Some(3), Some(2)],
    ],
};

// 0 start, then 1 + (count_a - count_b mod 3).
const TOMITA_L6: SymbolicDfa = SymbolicDfa {
    accepting: &[1],
    delta: &[
        [Some(2), None],
        [Some(2), Some(3)],
        [Some(3), Some(1)],
        [Some(1), Some(2)],
    ],
};

// 0 start, then the block a+, b*, a*, b* currently being read.
const TOMITA_L7: SymbolicDfa = SymbolicDfa {
    accepting: &[1, 2, 3, 4],
    delta: &[
        [Some(1), None],
        [Some(1), Some(2)],
        [Some(3), Some(2)],
        [Some(3), Some(4)],
        [None, Some(4)],
    ],
};

/// Source index, guard atoms, updates and the target as (dfa state, b bound).
type Edge = (usize, Vec<Atom>, Vec<(usize, Operand)>, (usize, bool));

/// Binds `a` to the first letter (register r1) and `b` to the first later
/// letter above it (register r2). Letters equal to neither symbol, or below
/// `a` before `b` is known, end the run.
///
/// States are `(dfa state, b bound)`; only the reachable ones are kept.
fn tomita(dfa: &SymbolicDfa) -> Dra {
    let (r1, r2) = (Reg(0), Reg(1));
    let mut ids: Vec<(usize, bool)> = vec![(0, false)];
    let mut edges: Vec<Edge> = Vec::new();
    let mut i = 0;
    while i < ids.len() {
        let (s, bound) = ids[i];
        let mut out = Vec::new();
        if i == 0 {
            if let Some(t) = dfa.delta[s][0] {
                out.push((vec![], vec![(0, Curr)], (t, false)));
            }
        } else if !bound {
            if let Some(t) = dfa.delta[s][0] {
                out.push((vec![atom(r1.clone(), CmpOp::Eq, Curr)], vec![], (t, false)));
            }
            if let Some(t) = dfa.delta[s][1] {
                out.push((
                    vec![atom(r1.clone(), CmpOp::Lt, Curr)],
                    vec![(1, Curr)],
                    (t, true),
                ));
            }
        } else {
            if let Some(t) = dfa.delta[s][0] {
                out.push((vec![atom(r1.clone(), CmpOp::Eq, Curr)], vec![], (t, true)));
            }
            if let Some(t) = dfa.delta[s][1] {
                out.push((
                    vec![
                        atom(r2.clone(), CmpOp::Eq, Curr),
                        atom(r1.clone(), CmpOp::Lt, r2.clone()),
                    ],
                    vec![],
                    (t, true),
                ));
            }
        }
        for (atoms, assign, target) in out {
            if !ids.contains(&target) {
                ids.push(target);
            }
            edges.push((i, atoms, assign, target));
        }
        i += 1;
    }
    let transitions = edges
        .into_iter()
        .map(|(from, atoms, assign, target)| {
            let to = ids
                .iter()
                .position(|x| *x == target)
                .expect("target was registered");
            tr(from, atoms, assign, to)
        })
        .collect();
    let accepting = ids.iter().map(|(s, _)| dfa.accepting.contains(s)).collect();
    Dra::new(ids.len(), 2, 0, accepting, transitions).expect("fixture is well formed")
}

/// Every letter compares to its predecessor by `op` (`prev op curr`).
fn monotone(op: CmpOp) -> Dra {
    Dra::with_accepting(
        2,
        1,
        0,
        &[0, 1],
        vec![
            tr(0, vec![], vec![(0, Curr)], 1),
            tr(1, vec![atom(Reg(0), op, Curr)], vec![(0, Curr)], 1),
        ],
    )
    .expect("fixture is well formed")
}

/// Strict runs in the given directions (`prev op curr`), each at least one
/// step long, with acceptance in the last run. Equal neighbours end the run.
fn extrema(phases: &[CmpOp]) -> Dra {
    let r = Reg(0);
    let n = phases.len() + 2;
    let mut ts = vec![
        tr(0, vec![], vec![(0, Curr)], 1),
        tr(
            1,
            vec![atom(r.clone(), phases[0], Curr)],
            vec![(0, Curr)],
            2,
        ),
    ];
    for (i, &op) in phases.iter().enumerate() {
        let q = i + 2;
        ts.push(tr(q, vec![atom(r.clone(), op, Curr)], vec![(0, Curr)], q));
        if let Some(&next) = phases.get(i + 1) {
            ts.push(tr(
                q,
                vec![atom(r.clone(), next, Curr)],
                vec![(0, Curr)],
                q + 1,
            ));
        }
    }
    Dra::with_accepting(n, 1, 0, &[n - 1], ts).expect("fixture is well formed")
}

/// Registers hold the last trough, the last peak and the previous value.
/// Descends in q0, ascends in q1, then alternates between q2 (falling,
/// staying above the last trough) and q3 (rising, after a higher trough).
fn higher_highs_higher_lows() -> Dra {
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
    .expect("fixture is well formed")
}

/// Same register discipline, but each completed trough must lie below the
/// previous one while each peak still rises. A descent in progress is not
/// yet a trough and stays accepted.
fn higher_highs_lower_lows() -> Dra {
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
                vec![atom(r2.clone(), CmpOp::Gt, Curr)],
                vec![(2, Curr)],
                2,
            ),
            tr(
                2,
                vec![atom(r3.clone(), CmpOp::Ge, Curr)],
                vec![(2, Curr)],
                2,
            ),
            tr(
                2,
                vec![
                    atom(r3.clone(), CmpOp::Lt, Curr),
                    atom(r3.clone(), CmpOp::Lt, r1.clone()),
                ],
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
    .expect("fixture is well formed")
}
