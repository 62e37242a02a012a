//! Values of the form `c + j·ε` for a rational `c`, an integer `j` and a
//! positive infinitesimal `ε`, compared lexicographically.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::automata::guard::Value;
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyper {
    pub std: Rational,
    pub inf: i32,
}

impl Hyper {
    pub fn new(std: Rational, inf: i32) -> Hyper {
        Hyper { std, inf }
    }

    pub fn exact(std: Rational) -> Hyper {
        Hyper { std, inf: 0 }
    }

    /// Value at a concrete `ε`.
    pub fn at(&self, eps: &Rational) -> Rational {
        &self.std + &(eps * &Rational::from_integer(self.inf.into()))
    }
}

impl Value for Hyper {
    fn constant(c: &Rational) -> Self {
        Hyper::exact(c.clone())
    }

    fn shifted(&self, by: &Rational) -> Self {
        Hyper::new(&self.std + by, self.inf)
    }
}

impl fmt::Debug for Hyper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.inf {
            0 => write!(f, "{:?}", self.std),
            j if j > 0 => write!(f, "{:?}+{j}ε", self.std),
            j => write!(f, "{:?}{j}ε", self.std),
        }
    }
}

/// Relabels infinitesimal parts so that, per standard part, the distinct
/// values in use sit at consecutive even offsets around the constant itself
/// (which keeps offset 0). Order among all values and constants is unchanged,
/// and an odd offset always lies strictly between two neighbours.
pub fn renormalize<'a>(values: impl IntoIterator<Item = &'a mut Hyper>) {
    let mut values: Vec<&mut Hyper> = values.into_iter().collect();
    let mut used: BTreeMap<Rational, BTreeSet<i32>> = BTreeMap::new();
    for h in values.iter() {
        if h.inf != 0 {
            used.entry(h.std.clone()).or_default().insert(h.inf);
        }
    }
    if used.is_empty() {
        return;
    }
    let mut relabel: BTreeMap<(Rational, i32), i32> = BTreeMap::new();
    for (c, js) in used {
        let (neg, pos): (Vec<i32>, Vec<i32>) = js.into_iter().partition(|&j| j < 0);
        for (rank, j) in neg.iter().rev().enumerate() {
            relabel.insert((c.clone(), *j), -2 * (rank as i32 + 1));
        }
        for (rank, j) in pos.iter().enumerate() {
            relabel.insert((c.clone(), *j), 2 * (rank as i32 + 1));
        }
    }
    for h in values.iter_mut() {
        if h.inf != 0 {
            h.inf = relabel[&(h.std.clone(), h.inf)];
        }
    }
}

/// Every value that can take a different position relative to `live` and the
/// constants: for each constant, the offsets one beyond the outermost in use
/// and everything in between.
pub fn candidates(constants: &[Rational], live: &[&Hyper]) -> Vec<Hyper> {
    let mut out = Vec::new();
    for c in constants {
        let (mut lo, mut hi) = (0, 0);
        for h in live {
            if h.std == *c {
                lo = lo.min(h.inf);
                hi = hi.max(h.inf);
            }
        }
        for j in lo - 1..=hi + 1 {
            out.push(Hyper::new(c.clone(), j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(c: i64, j: i32) -> Hyper {
        Hyper::new(Rational::from_integer(c), j)
    }

    #[test]
    fn order_is_lexicographic() {
        assert!(h(1, 5) < h(2, -5));
        assert!(h(1, -1) < h(1, 0));
        assert!(h(1, 0) < h(1, 1));
    }

    #[test]
    fn renormalize_compacts_per_constant() {
        let mut vals = vec![h(1, 7), h(1, -3), h(1, 3), h(2, 1), h(1, 7), h(1, -9)];
        renormalize(vals.iter_mut());
        assert_eq!(
            vals,
            vec![h(1, 4), h(1, -2), h(1, 2), h(2, 2), h(1, 4), h(1, -4)]
        );
    }

    #[test]
    fn candidates_cover_every_gap() {
        let a = h(0, 2);
        let cs = candidates(&[Rational::zero(), Rational::one()], &[&a]);
        let js: Vec<i32> = cs
            .iter()
            .filter(|x| x.std.is_zero())
            .map(|x| x.inf)
            .collect();
        assert_eq!(js, vec![-1, 0, 1, 2, 3]);
        assert_eq!(cs.iter().filter(|x| x.std == Rational::one()).count(), 3);
    }
}
