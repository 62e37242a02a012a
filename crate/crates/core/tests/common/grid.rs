#![allow(dead_code)]

use regrobust::metric::{ColumnEvaluator, ExtendedCost, Raa};
use regrobust::Rational;

use super::oracles::{all_sequences, ColumnOracle};

pub type Mismatch = (Vec<i64>, Vec<i64>, ExtendedCost, Option<i64>);

pub struct GridReport {
    pub pairs: u64,
    pub mismatches: Vec<Mismatch>,
}

/// Compares the automaton against an oracle on every pair of sequences over
/// `letters` with lengths up to `max_len`, empty sequences included. The `w`
/// side is walked depth-first so both sides extend one column per prefix.
pub fn exhaustive<O: ColumnOracle>(
    raa: &Raa,
    letters: &[i64],
    max_len: usize,
    oracle: impl Fn(&[i64]) -> O,
) -> GridReport {
    let mut report = GridReport {
        pairs: 0,
        mismatches: Vec::new(),
    };
    for v in all_sequences(letters, max_len) {
        let vq: Vec<Rational> = v.iter().map(|&x| Rational::from_integer(x)).collect();
        let mut walker = Walker {
            ev: ColumnEvaluator::new(raa, &vq),
            oracle: oracle(&v),
            v,
            w: Vec::new(),
            letters,
            max_len,
        };
        walker.walk(&mut report);
    }
    report
}

struct Walker<'a, O> {
    ev: ColumnEvaluator<'a>,
    oracle: O,
    v: Vec<i64>,
    w: Vec<i64>,
    letters: &'a [i64],
    max_len: usize,
}

impl<O: ColumnOracle> Walker<'_, O> {
    fn walk(&mut self, report: &mut GridReport) {
        let got = self.ev.result();
        let want = self.oracle.value();
        report.pairs += 1;
        let agree = match (&got, want) {
            (ExtendedCost::Finite(g), Some(x)) => *g == Rational::from_integer(x),
            (ExtendedCost::Infinite, None) => true,
            _ => false,
        };
        if !agree && report.mismatches.len() < 10 {
            report
                .mismatches
                .push((self.v.clone(), self.w.clone(), got, want));
        }
        if self.w.len() == self.max_len {
            return;
        }
        for &a in self.letters {
            self.ev.push(Rational::from_integer(a));
            self.oracle.push(a);
            self.w.push(a);
            self.walk(report);
            self.w.pop();
            self.oracle.pop();
            self.ev.pop();
        }
    }
}
