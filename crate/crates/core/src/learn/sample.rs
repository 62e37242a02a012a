use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::automata::dra::{Dra, RunError};
use crate::rational::Rational;

#[derive(Debug, thiserror::Error)]
pub enum SampleError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("sequence {seq:?} is labelled both positive and negative")]
    Conflict { seq: Vec<Rational> },
    #[error("empty sequences are not samples")]
    EmptySequence,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, thiserror::Error)]
pub enum ScoreError {
    #[error("cannot score against an empty sample set")]
    EmptySampleSet,
    #[error(transparent)]
    Run(#[from] RunError),
}

#[derive(Serialize, Deserialize)]
struct Line {
    seq: Vec<Rational>,
    label: u8,
}

/// Labelled sequences in insertion order. A sequence appears at most once.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SampleSet {
    records: Vec<(Vec<Rational>, bool)>,
    index: HashMap<Vec<Rational>, usize>,
}

impl SampleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(
        positives: Vec<Vec<Rational>>,
        negatives: Vec<Vec<Rational>>,
    ) -> Result<Self, SampleError> {
        let mut s = SampleSet::new();
        for p in positives {
            s.insert(p, true)?;
        }
        for n in negatives {
            s.insert(n, false)?;
        }
        Ok(s)
    }

    /// Adds a sample. Returns `false` when it was already present with the
    /// same label.
    pub fn insert(&mut self, seq: Vec<Rational>, label: bool) -> Result<bool, SampleError> {
        if seq.is_empty() {
            return Err(SampleError::EmptySequence);
        }
        if let Some(&i) = self.index.get(&seq) {
            return if self.records[i].1 == label {
                Ok(false)
            } else {
                Err(SampleError::Conflict { seq })
            };
        }
        self.index.insert(seq.clone(), self.records.len());
        self.records.push((seq, label));
        Ok(true)
    }

    pub fn label(&self, seq: &[Rational]) -> Option<bool> {
        self.index.get(seq).map(|&i| self.records[i].1)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Rational], bool)> {
        self.records.iter().map(|(s, l)| (s.as_slice(), *l))
    }

    pub fn positives(&self) -> impl Iterator<Item = &[Rational]> {
        self.iter().filter(|(_, l)| *l).map(|(s, _)| s)
    }

    pub fn negatives(&self) -> impl Iterator<Item = &[Rational]> {
        self.iter().filter(|(_, l)| !*l).map(|(s, _)| s)
    }

    pub fn count(&self, label: bool) -> usize {
        self.records.iter().filter(|(_, l)| *l == label).count()
    }

    /// The first `n` records.
    pub fn prefix(&self, n: usize) -> SampleSet {
        let mut s = SampleSet::new();
        for (seq, l) in self.records.iter().take(n) {
            s.insert(seq.clone(), *l)
                .expect("subset of a consistent set");
        }
        s
    }

    /// JSON lines `{"seq":["n/d",…],"label":0|1}`. Blank lines are skipped.
    pub fn read_jsonl(reader: impl BufRead) -> Result<Self, SampleError> {
        let mut s = SampleSet::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: Line = serde_json::from_str(&line).map_err(|e| SampleError::Format {
                line: i + 1,
                message: e.to_string(),
            })?;
            if rec.label > 1 {
                return Err(SampleError::Format {
                    line: i + 1,
                    message: format!("label {} is not 0 or 1", rec.label),
                });
            }
            s.insert(rec.seq, rec.label == 1).map_err(|e| match e {
                SampleError::EmptySequence => SampleError::Format {
                    line: i + 1,
                    message: "empty sequence".into(),
                },
                other => other,
            })?;
        }
        Ok(s)
    }

    pub fn from_jsonl(text: &str) -> Result<Self, SampleError> {
        Self::read_jsonl(text.as_bytes())
    }

    pub fn write_jsonl(&self, mut out: impl Write) -> std::io::Result<()> {
        for (seq, label) in &self.records {
            let line = Line {
                seq: seq.clone(),
                label: u8::from(*label),
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }
}

/// Fraction of samples the automaton labels correctly.
pub fn score(dra: &Dra, s: &SampleSet) -> Result<Rational, ScoreError> {
    if s.is_empty() {
        return Err(ScoreError::EmptySampleSet);
    }
    let mut right = 0i64;
    for (seq, label) in s.iter() {
        if dra.accepts(seq)? == label {
            right += 1;
        }
    }
    Ok(Rational::new(right, s.len() as i64))
}

/// Every positive accepted and every negative rejected. A determinism
/// violation met during a run counts as inconsistency.
pub fn validate_consistency(dra: &Dra, s: &SampleSet) -> bool {
    s.iter()
        .all(|(seq, label)| matches!(dra.accepts(seq), Ok(a) if a == label))
}
