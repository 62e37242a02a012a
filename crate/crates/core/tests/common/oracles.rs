//! Reference computations written independently of the library's automata.

#![allow(dead_code)]

use regrobust::Rational;

pub fn levenshtein(a: &[i64], b: &[i64]) -> i64 {
    let mut prev: Vec<i64> = (0..=b.len() as i64).collect();
    for (i, x) in a.iter().enumerate() {
        let mut cur = vec![i as i64 + 1; b.len() + 1];
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + i64::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

/// Classic DTW with `|a_i - b_j|` cell cost. `None` stands for ∞, which is the
/// value whenever exactly one side is empty.
pub fn dtw(a: &[i64], b: &[i64]) -> Option<i64> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return Some(0),
        (true, false) | (false, true) => return None,
        _ => {}
    }
    let inf = i64::MAX / 4;
    let (m, n) = (a.len(), b.len());
    let mut d = vec![vec![inf; n + 1]; m + 1];
    d[0][0] = 0;
    for i in 1..=m {
        for j in 1..=n {
            let best = d[i - 1][j - 1].min(d[i - 1][j]).min(d[i][j - 1]);
            d[i][j] = (a[i - 1] - b[j - 1]).abs() + best;
        }
    }
    Some(d[m][n])
}

pub fn hamming(v: &[Rational], w: &[Rational]) -> Option<Rational> {
    (v.len() == w.len())
        .then(|| Rational::from_integer(v.iter().zip(w).filter(|(a, b)| a != b).count() as i64))
}

pub fn manhattan(v: &[Rational], w: &[Rational]) -> Option<Rational> {
    (v.len() == w.len()).then(|| v.iter().zip(w).map(|(a, b)| (a - b).abs()).sum())
}

pub fn threshold_hamming(v: &[Rational], w: &[Rational], c: &Rational) -> Option<Rational> {
    (v.len() == w.len()).then(|| {
        Rational::from_integer(
            v.iter()
                .zip(w)
                .filter(|(a, b)| (*a - *b).abs() > *c)
                .count() as i64,
        )
    })
}

/// Equal lengths, equal on all but the last position, then `|v_n - w_n|`.
pub fn last_letter(v: &[Rational], w: &[Rational]) -> Option<Rational> {
    if v.len() != w.len() || v.is_empty() {
        return None;
    }
    let n = v.len();
    (v[..n - 1] == w[..n - 1]).then(|| (&v[n - 1] - &w[n - 1]).abs())
}

/// All sequences over `letters` with lengths in `lens`, in depth-first order.
pub fn all_sequences(letters: &[i64], max_len: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for &a in letters {
                let mut t: Vec<i64> = s.clone();
                t.push(a);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// A DP table over `v` grown one letter of `w` at a time.
pub trait ColumnOracle {
    fn push(&mut self, a: i64);
    fn pop(&mut self);
    fn value(&self) -> Option<i64>;
}

/// Levenshtein columns: `col[i]` is the distance between `v[..i]` and `w`.
pub struct LevenshteinColumns {
    v: Vec<i64>,
    cols: Vec<Vec<i64>>,
}

impl LevenshteinColumns {
    pub fn new(v: &[i64]) -> Self {
        LevenshteinColumns {
            v: v.to_vec(),
            cols: vec![(0..=v.len() as i64).collect()],
        }
    }
}

impl ColumnOracle for LevenshteinColumns {
    fn push(&mut self, a: i64) {
        let prev = self.cols.last().unwrap();
        let mut cur = vec![prev[0] + 1; self.v.len() + 1];
        for i in 1..=self.v.len() {
            let sub = prev[i - 1] + i64::from(self.v[i - 1] != a);
            cur[i] = sub.min(prev[i] + 1).min(cur[i - 1] + 1);
        }
        self.cols.push(cur);
    }

    fn pop(&mut self) {
        self.cols.pop();
    }

    fn value(&self) -> Option<i64> {
        Some(*self.cols.last().unwrap().last().unwrap())
    }
}

/// DTW columns with `None` for unreachable cells.
pub struct DtwColumns {
    v: Vec<i64>,
    cols: Vec<Vec<Option<i64>>>,
}

impl DtwColumns {
    pub fn new(v: &[i64]) -> Self {
        let mut first = vec![None; v.len() + 1];
        first[0] = Some(0);
        DtwColumns {
            v: v.to_vec(),
            cols: vec![first],
        }
    }
}

impl ColumnOracle for DtwColumns {
    fn push(&mut self, a: i64) {
        let prev = self.cols.last().unwrap();
        let mut cur: Vec<Option<i64>> = vec![None; self.v.len() + 1];
        for i in 1..=self.v.len() {
            let best = [prev[i - 1], prev[i], cur[i - 1]]
                .into_iter()
                .flatten()
                .min();
            cur[i] = best.map(|b| b + (self.v[i - 1] - a).abs());
        }
        self.cols.push(cur);
    }

    fn pop(&mut self) {
        self.cols.pop();
    }

    fn value(&self) -> Option<i64> {
        *self.cols.last().unwrap().last().unwrap()
    }
}
