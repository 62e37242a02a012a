//! Exhaustive minimum flip cost over letters `c + j·ε`, for metrics that
//! compare equal-length sequences position by position.

#![allow(dead_code)]

use std::collections::HashMap;

use regrobust::automata::{dra::step_with, Dra, Value};
use regrobust::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Eps(pub Rational, pub i64);

impl Value for Eps {
    fn constant(c: &Rational) -> Self {
        Eps(c.clone(), 0)
    }

    fn shifted(&self, by: &Rational) -> Self {
        Eps(&self.0 + by, self.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pointwise {
    Hamming,
    Manhattan,
    LastLetter,
}

impl Pointwise {
    /// Infimum contribution of position `i` (0-based, of `n`), or `None` for ∞.
    fn cost(self, v: &Rational, w: &Eps, i: usize, n: usize) -> Option<Rational> {
        let exact = w.0 == *v && w.1 == 0;
        match self {
            Pointwise::Hamming => Some(if exact {
                Rational::zero()
            } else {
                Rational::one()
            }),
            Pointwise::Manhattan => Some((v - &w.0).abs()),
            Pointwise::LastLetter if i + 1 < n => exact.then(Rational::zero),
            Pointwise::LastLetter => Some((v - &w.0).abs()),
        }
    }
}

/// The least distance from `v` to a sequence of the same length whose label
/// differs from that of `v`, or `None` when there is none. Also returns such
/// a sequence in `Eps` form.
pub fn min_flip(dra: &Dra, v: &[Rational], metric: Pointwise) -> Option<(Rational, Vec<Eps>)> {
    let n = v.len() as i64;
    let mut cs: Vec<Rational> = dra.constants();
    cs.push(Rational::zero());
    cs.extend(v.iter().cloned());
    cs.sort();
    cs.dedup();
    let letters: Vec<Eps> = cs
        .iter()
        .flat_map(|c| (-n..=n).map(move |j| Eps(c.clone(), j)))
        .collect();
    let want = !dra.accepts(v).expect("deterministic");
    let mut memo = HashMap::new();
    let start = vec![Eps(Rational::zero(), 0); dra.num_registers];
    let mut search = Search {
        dra,
        v,
        metric,
        letters: &letters,
        want,
        memo: &mut memo,
    };
    let best = search.best(0, Some(dra.initial), start.clone())?;
    // Walk the memo table to recover a minimising sequence.
    let mut word = Vec::new();
    let (mut state, mut regs) = (Some(dra.initial), start);
    for i in 0..v.len() {
        let target = search.best(i, state, regs.clone()).unwrap();
        let mut chosen = None;
        for a in search.letters.iter() {
            let Some(c) = metric.cost(&v[i], a, i, v.len()) else {
                continue;
            };
            let (nq, nr) = search.step(state, &regs, a);
            if let Some(rest) = search.best(i + 1, nq, nr.clone()) {
                if &c + &rest == target {
                    chosen = Some((a.clone(), nq, nr));
                    break;
                }
            }
        }
        let (a, nq, nr) = chosen.unwrap();
        word.push(a);
        state = nq;
        regs = nr;
    }
    Some((best, word))
}

type Key = (usize, Option<usize>, Vec<Eps>);

struct Search<'a> {
    dra: &'a Dra,
    v: &'a [Rational],
    metric: Pointwise,
    letters: &'a [Eps],
    want: bool,
    memo: &'a mut HashMap<Key, Option<Rational>>,
}

impl Search<'_> {
    fn step(&self, state: Option<usize>, regs: &[Eps], a: &Eps) -> (Option<usize>, Vec<Eps>) {
        match state.and_then(|q| step_with(self.dra, q, regs, a)) {
            Some((q, r)) => (Some(q), r),
            None => (None, Vec::new()),
        }
    }

    fn best(&mut self, i: usize, state: Option<usize>, regs: Vec<Eps>) -> Option<Rational> {
        let n = self.v.len();
        if i == n {
            let accepted = state.is_some_and(|q| self.dra.accepting[q]);
            return (accepted == self.want).then(Rational::zero);
        }
        let key = (i, state, regs);
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let (_, state, regs) = key.clone();
        let mut best: Option<Rational> = None;
        for a in self.letters {
            let Some(c) = self.metric.cost(&self.v[i], a, i, n) else {
                continue;
            };
            if best.as_ref().is_some_and(|b| c >= *b) {
                continue;
            }
            let (nq, nr) = self.step(state, &regs, a);
            if let Some(rest) = self.best(i + 1, nq, nr) {
                let total = &c + &rest;
                if best.as_ref().is_none_or(|b| total < *b) {
                    best = Some(total);
                }
            }
        }
        self.memo.insert(key, best.clone());
        best
    }
}
