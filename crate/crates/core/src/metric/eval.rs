//! Minimum-cost evaluation of two-head automata.
//!
//! Every transition advances at least one head, so configurations are
//! layered by `h1 + h2` and a single forward sweep yields the least
//! accumulated cost. Register-free automata (all the standard metrics) use a
//! column-by-column table over `(state, h1)` that can also be grown and
//! shrunk one letter of `w` at a time.

use std::collections::HashMap;
use std::rc::Rc;

use crate::automata::guard::Operand;
use crate::metric::raa::{ExtendedCost, Move, Raa, RaaTransition};
use crate::rational::Rational;

/// Least accumulated cost of an accepting run on `(v, w)`, or ∞.
pub fn evaluate(raa: &Raa, v: &[Rational], w: &[Rational]) -> ExtendedCost {
    if raa.num_registers == 0 {
        let mut ev = ColumnEvaluator::new(raa, v);
        for a in w {
            ev.push(a.clone());
        }
        ev.result()
    } else {
        evaluate_general(raa, v, w)
    }
}

#[inline]
fn fire_cost(t: &RaaTransition, c1: Option<&Rational>, c2: Option<&Rational>) -> Option<Rational> {
    let lookup = |o: &Operand| match o {
        Operand::Curr1 => c1,
        Operand::Curr2 => c2,
        _ => None,
    };
    if t.guard.eval(&lookup) != Some(true) {
        return None;
    }
    let inc = t.acc.increment(c1, c2)?;
    if inc.is_negative() {
        None
    } else {
        Some(inc)
    }
}

#[inline]
fn relax(cell: &mut Option<Rational>, cost: Rational) {
    match cell {
        Some(c) if *c <= cost => {}
        _ => *cell = Some(cost),
    }
}

/// Incremental evaluator for a register-free automaton and a fixed `v`.
///
/// Column `j` holds, for every state and head-1 position, the least cost of
/// reaching that configuration with head 2 at position `j`. Alongside each
/// column the evaluator keeps its outflow: the costs carried into column
/// `j + 1` by moves of head 2, which do not depend on the next letter.
pub struct ColumnEvaluator<'a> {
    raa: &'a Raa,
    v: Vec<Rational>,
    rows: usize,
    into_next: Vec<Vec<usize>>,
    within: Vec<Vec<usize>>,
    w: Vec<Rational>,
    start: Vec<Option<Rational>>,
    outflows: Vec<Vec<Option<Rational>>>,
    /// Increment of transition `t` at head-1 position `h1` for a given
    /// head-2 letter, indexed `t * rows + h1 - 1`; `None` when it cannot fire.
    tables: HashMap<Rational, Rc<Vec<Option<Rational>>>>,
    exhausted: Vec<Option<Rational>>,
}

impl<'a> ColumnEvaluator<'a> {
    pub fn new(raa: &'a Raa, v: &[Rational]) -> Self {
        assert_eq!(
            raa.num_registers, 0,
            "column evaluation needs a register-free automaton"
        );
        let mut into_next = vec![Vec::new(); raa.num_states];
        let mut within = vec![Vec::new(); raa.num_states];
        for (i, t) in raa.transitions.iter().enumerate() {
            match t.mov {
                Move::Head1 => within[t.from].push(i),
                Move::Head2 | Move::Both => into_next[t.from].push(i),
            }
        }
        let rows = v.len() + 1;
        let mut start = vec![None; raa.num_states * rows];
        start[raa.initial * rows] = Some(Rational::zero());
        let mut ev = ColumnEvaluator {
            raa,
            v: v.to_vec(),
            rows,
            into_next,
            within,
            w: Vec::new(),
            start,
            outflows: Vec::new(),
            tables: HashMap::new(),
            exhausted: Vec::new(),
        };
        ev.exhausted = ev.table(None);
        ev
    }

    fn table(&self, c2: Option<&Rational>) -> Vec<Option<Rational>> {
        let mut out = Vec::with_capacity(self.raa.transitions.len() * self.rows);
        for t in &self.raa.transitions {
            for h1 in 1..=self.rows {
                out.push(fire_cost(t, self.curr1(h1), c2));
            }
        }
        out
    }

    fn table_for(&mut self, a: &Rational) -> Rc<Vec<Option<Rational>>> {
        if let Some(t) = self.tables.get(a) {
            return t.clone();
        }
        let t = Rc::new(self.table(Some(a)));
        self.tables.insert(a.clone(), t.clone());
        t
    }

    fn idx(&self, q: usize, h1: usize) -> usize {
        q * self.rows + (h1 - 1)
    }

    fn curr1(&self, h1: usize) -> Option<&Rational> {
        self.v.get(h1 - 1)
    }

    /// Costs carried out of a settled column whose letter is `c2`.
    fn outflow(
        &self,
        col: &[Option<Rational>],
        table: &[Option<Rational>],
    ) -> Vec<Option<Rational>> {
        let mut next = vec![None; col.len()];
        for q in 0..self.raa.num_states {
            for h1 in 1..=self.rows {
                let Some(base) = &col[self.idx(q, h1)] else {
                    continue;
                };
                for &ti in &self.into_next[q] {
                    let t = &self.raa.transitions[ti];
                    let next_h1 = if t.mov == Move::Both {
                        if h1 == self.rows {
                            continue;
                        }
                        h1 + 1
                    } else {
                        h1
                    };
                    if let Some(inc) = &table[ti * self.rows + h1 - 1] {
                        let target = self.idx(t.to, next_h1);
                        relax(&mut next[target], base + inc);
                    }
                }
            }
        }
        next
    }

    fn settle(&self, col: &mut [Option<Rational>], table: &[Option<Rational>]) {
        for h1 in 1..self.rows {
            for q in 0..self.raa.num_states {
                let Some(base) = col[self.idx(q, h1)].clone() else {
                    continue;
                };
                for &ti in &self.within[q] {
                    let t = &self.raa.transitions[ti];
                    if let Some(inc) = &table[ti * self.rows + h1 - 1] {
                        let target = self.idx(t.to, h1 + 1);
                        relax(&mut col[target], &base + inc);
                    }
                }
            }
        }
    }

    fn pending(&self) -> &[Option<Rational>] {
        self.outflows.last().unwrap_or(&self.start)
    }

    /// Appends a letter to `w`.
    pub fn push(&mut self, a: Rational) {
        let table = self.table_for(&a);
        let mut col = self.pending().to_vec();
        self.settle(&mut col, &table);
        let out = self.outflow(&col, &table);
        self.outflows.push(out);
        self.w.push(a);
    }

    /// Removes the last letter of `w`.
    pub fn pop(&mut self) {
        self.outflows.pop();
        self.w.pop();
    }

    pub fn w(&self) -> &[Rational] {
        &self.w
    }

    /// The automaton's output on `(v, w)` for the current `w`.
    pub fn result(&self) -> ExtendedCost {
        let mut col = self.pending().to_vec();
        self.settle(&mut col, &self.exhausted);
        let mut best: Option<Rational> = None;
        for q in 0..self.raa.num_states {
            if self.raa.accepting[q] {
                if let Some(c) = &col[self.idx(q, self.rows)] {
                    relax(&mut best, c.clone());
                }
            }
        }
        best.into()
    }
}

type Key = (usize, usize, Vec<Rational>);

/// Forward sweep over configurations `(state, h1, h2, registers)`.
pub fn evaluate_general(raa: &Raa, v: &[Rational], w: &[Rational]) -> ExtendedCost {
    let (m, n) = (v.len(), w.len());
    // layers[s] holds configurations with h1 + h2 = s + 2, keyed by (state, h1, registers).
    let mut layers: Vec<HashMap<Key, Rational>> = vec![HashMap::new(); m + n + 1];
    layers[0].insert(
        (raa.initial, 1, vec![Rational::zero(); raa.num_registers]),
        Rational::zero(),
    );
    let mut best: Option<Rational> = None;
    for s in 0..layers.len() {
        let layer = std::mem::take(&mut layers[s]);
        for ((q, h1, regs), cost) in layer {
            let h2 = s + 2 - h1;
            if h1 == m + 1 && h2 == n + 1 && raa.accepting[q] {
                relax(&mut best, cost.clone());
            }
            let c1 = v.get(h1 - 1);
            let c2 = w.get(h2 - 1);
            for (_, t) in raa.outgoing(q) {
                if (t.mov.moves_head1() && h1 > m) || (t.mov.moves_head2() && h2 > n) {
                    continue;
                }
                let lookup = |o: &Operand| match o {
                    Operand::Reg(i) => regs.get(*i),
                    Operand::Curr1 => c1,
                    Operand::Curr2 => c2,
                    _ => None,
                };
                if t.guard.eval(&lookup) != Some(true) {
                    continue;
                }
                let Some(inc) = t.acc.increment(c1, c2) else {
                    continue;
                };
                if inc.is_negative() {
                    continue;
                }
                let letters = |o: &Operand| match o {
                    Operand::Curr1 => c1.cloned(),
                    Operand::Curr2 => c2.cloned(),
                    _ => None,
                };
                let Some(next) = t.assign.apply(&regs, &letters) else {
                    continue;
                };
                let nh1 = h1 + usize::from(t.mov.moves_head1());
                let ns = s + 1 + usize::from(t.mov == Move::Both);
                let entry = layers[ns]
                    .entry((t.to, nh1, next))
                    .or_insert_with(|| &cost + &inc);
                let cand = &cost + &inc;
                if cand < *entry {
                    *entry = cand;
                }
            }
        }
    }
    best.into()
}
