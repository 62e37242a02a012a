//! Random walks over a ground-truth automaton.
//!
//! At every step the values of the registers and the guard constants cut the
//! line into points and open intervals; every guard of the current state is
//! constant on each such region. A step either follows an enabled transition,
//! choosing one of its regions, or deviates into a region no transition
//! covers. Labels come from re-running the ground truth on the emitted word.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automata::dra::Dra;
use crate::automata::guard::Operand;
use crate::bench::fixtures::{ground_truth, BenchmarkId};
use crate::learn::sample::SampleSet;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplerError {
    #[error("gave up after {attempts} walks with {positives}/{want_pos} positives and {negatives}/{want_neg} negatives")]
    QuotaUnreachable {
        attempts: usize,
        positives: usize,
        negatives: usize,
        want_pos: usize,
        want_neg: usize,
    },
    #[error("noise must lie in [0, 1], got {0}")]
    Noise(f64),
    #[error("max_length must be positive")]
    MaxLength,
}

/// A region of the line on which every guard of a state is constant.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Region {
    Point(Rational),
    Between(Rational, Rational),
    Below(Rational),
    Above(Rational),
    Line,
}

impl Region {
    fn representative(&self) -> Rational {
        let one = Rational::one();
        match self {
            Region::Point(x) => x.clone(),
            Region::Between(a, b) => Rational::midpoint(a, b),
            Region::Below(a) => a - &one,
            Region::Above(a) => a + &one,
            Region::Line => Rational::zero(),
        }
    }

    fn is_point(&self) -> bool {
        matches!(self, Region::Point(_))
    }
}

fn regions(mut cuts: Vec<Rational>) -> Vec<Region> {
    cuts.sort();
    cuts.dedup();
    let (Some(first), Some(last)) = (cuts.first().cloned(), cuts.last().cloned()) else {
        return vec![Region::Line];
    };
    let mut out = vec![Region::Below(first)];
    for (i, c) in cuts.iter().enumerate() {
        out.push(Region::Point(c.clone()));
        if let Some(next) = cuts.get(i + 1) {
            out.push(Region::Between(c.clone(), next.clone()));
        }
    }
    out.push(Region::Above(last));
    out
}

/// Walk generator with a private RNG.
#[derive(Clone, Debug)]
pub struct MarkovSampler {
    dra: Dra,
    noise: f64,
    max_length: usize,
    rng: ChaCha8Rng,
}

impl MarkovSampler {
    pub fn new(dra: Dra, noise: f64, max_length: usize, seed: u64) -> Result<Self, SamplerError> {
        if !(0.0..=1.0).contains(&noise) {
            return Err(SamplerError::Noise(noise));
        }
        if max_length == 0 {
            return Err(SamplerError::MaxLength);
        }
        Ok(MarkovSampler {
            dra,
            noise,
            max_length,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn dra(&self) -> &Dra {
        &self.dra
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    /// Values a letter is compared with at `state`.
    fn cuts(&self, state: usize, regs: &[Rational]) -> Vec<Rational> {
        let mut cuts = Vec::new();
        for (_, t) in self.dra.outgoing(state) {
            for a in &t.guard.atoms {
                let (other, off) = match (&a.lhs, &a.rhs) {
                    (Operand::Curr, Operand::Curr) => continue,
                    (Operand::Curr, o) => (o, a.offset.clone()),
                    (o, Operand::Curr) => (o, -&a.offset),
                    _ => continue,
                };
                let v = match other {
                    Operand::Reg(i) => regs[*i].clone(),
                    Operand::Const(c) => c.clone(),
                    _ => continue,
                };
                cuts.push(&v + &off);
            }
        }
        cuts
    }

    /// A letter inside `region`, jittered away from its representative.
    fn instantiate(&mut self, region: &Region) -> Rational {
        match region {
            Region::Point(x) => x.clone(),
            Region::Between(a, b) => {
                let k = self.rng.random_range(-100i64..=100);
                let width = b - a;
                &Rational::midpoint(a, b) + &(&width * &Rational::new(k, 400))
            }
            Region::Below(a) => {
                a - &(Rational::one() + Rational::new(self.rng.random_range(0i64..=4), 2))
            }
            Region::Above(a) => {
                a + &(Rational::one() + Rational::new(self.rng.random_range(0i64..=4), 2))
            }
            Region::Line => Rational::new(self.rng.random_range(-10i64..=10), 2),
        }
    }

    /// One walk; the length is uniform in `1..=max_length`.
    pub fn walk(&mut self) -> Vec<Rational> {
        let len = self.rng.random_range(1..=self.max_length);
        let mut seq = Vec::with_capacity(len);
        let mut config = Some((
            self.dra.initial,
            vec![Rational::zero(); self.dra.num_registers],
        ));
        while seq.len() < len {
            let Some((state, regs)) = config.take() else {
                // The run has died: continue with a bounded random drift.
                let prev = seq.last().cloned().unwrap_or_else(Rational::zero);
                let k = self.rng.random_range(-6i64..=6);
                seq.push(&prev + &Rational::new(k, 2));
                continue;
            };
            let regions = regions(self.cuts(state, &regs));
            // Transition fired on each region, if any.
            let fired: Vec<Option<usize>> = regions
                .iter()
                .map(|r| {
                    self.dra
                        .step_index(state, &regs, &r.representative(), seq.len())
                        .ok()
                        .flatten()
                })
                .collect();
            let mut enabled: Vec<usize> = fired.iter().flatten().copied().collect();
            enabled.sort_unstable();
            enabled.dedup();
            let uncovered: Vec<usize> =
                (0..regions.len()).filter(|&i| fired[i].is_none()).collect();
            let deviate =
                !uncovered.is_empty() && (enabled.is_empty() || self.rng.random_bool(self.noise));
            let region = if deviate {
                // Open regions keep deviations at a distance from the guards.
                let open: Vec<usize> = uncovered
                    .iter()
                    .copied()
                    .filter(|&i| !regions[i].is_point())
                    .collect();
                let pool = if open.is_empty() { &uncovered } else { &open };
                pool[self.rng.random_range(0..pool.len())]
            } else {
                let t = enabled[self.rng.random_range(0..enabled.len())];
                let mine: Vec<usize> = (0..regions.len())
                    .filter(|&i| fired[i] == Some(t))
                    .collect();
                mine[self.rng.random_range(0..mine.len())]
            };
            let letter = self.instantiate(&regions[region]);
            config = match self
                .dra
                .step_index(state, &regs, &letter, seq.len())
                .ok()
                .flatten()
            {
                Some(t) => Some(self.dra.fire(t, &regs, &letter)),
                None => None,
            };
            seq.push(letter);
        }
        seq
    }

    /// A walk with its ground-truth label.
    pub fn draw(&mut self) -> (Vec<Rational>, bool) {
        let seq = self.walk();
        let label = self
            .dra
            .accepts(&seq)
            .expect("ground-truth automata are deterministic");
        (seq, label)
    }
}

/// Sampler over a benchmark's ground truth.
pub fn build_sampler(
    id: BenchmarkId,
    noise: f64,
    max_length: usize,
    seed: u64,
) -> Result<MarkovSampler, SamplerError> {
    MarkovSampler::new(ground_truth(id), noise, max_length, seed)
}

/// Walks are drawn until both quotas hold. Duplicates and walks of a class
/// whose quota is already met are discarded. The attempt bound defaults to
/// `1000 * (n_pos + n_neg) + 1000`.
pub fn generate(
    sampler: &mut MarkovSampler,
    n_pos: usize,
    n_neg: usize,
) -> Result<SampleSet, SamplerError> {
    generate_bounded(sampler, n_pos, n_neg, 1000 * (n_pos + n_neg) + 1000)
}

pub fn generate_bounded(
    sampler: &mut MarkovSampler,
    n_pos: usize,
    n_neg: usize,
    max_attempts: usize,
) -> Result<SampleSet, SamplerError> {
    let mut set = SampleSet::new();
    let (mut pos, mut neg) = (0, 0);
    let mut attempts = 0;
    while pos < n_pos || neg < n_neg {
        if attempts == max_attempts {
            return Err(SamplerError::QuotaUnreachable {
                attempts,
                positives: pos,
                negatives: neg,
                want_pos: n_pos,
                want_neg: n_neg,
            });
        }
        attempts += 1;
        let (seq, label) = sampler.draw();
        let wanted = if label { pos < n_pos } else { neg < n_neg };
        if wanted
            && set
                .insert(seq, label)
                .expect("labels come from one automaton")
        {
            if label {
                pos += 1;
            } else {
                neg += 1;
            }
        }
    }
    Ok(set)
}
