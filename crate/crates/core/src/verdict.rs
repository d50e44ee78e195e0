//! Finite-horizon answers to "is this sequence Cauchy at precision `1/m`?".
//!
//! Cauchy-ness of a black-box sequence is not decidable, so every check looks
//! at indices `first..=last` only and answers with a [`Verdict`].

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<D> {
    /// Every inspected pair with both indices `>= witness` is closer than `1/precision`.
    ConvergedUpTo { precision: u64, witness: usize },
    /// Indices `k`, `j` observed at distance `>= 1/m` past every candidate witness.
    RefutedAt { k: usize, j: usize, observed: D },
    /// The horizon is too short to say anything.
    Unknown { horizon: usize },
}

impl<D> Verdict<D> {
    pub fn is_converged(&self) -> bool {
        matches!(self, Verdict::ConvergedUpTo { .. })
    }

    pub fn witness(&self) -> Option<usize> {
        match self {
            Verdict::ConvergedUpTo { witness, .. } => Some(*witness),
            _ => None,
        }
    }
}

impl<D: fmt::Display> fmt::Display for Verdict<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ConvergedUpTo { precision, witness } => {
                write!(f, "ConvergedUpTo(m={precision}, K={witness})")
            }
            Verdict::RefutedAt { k, j, observed } => {
                write!(f, "RefutedAt(k={k}, j={j}, distance={observed})")
            }
            Verdict::Unknown { horizon } => write!(f, "Unknown(H={horizon})"),
        }
    }
}

/// Which index pairs a check inspects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairSampling {
    /// Adjacent pairs, `(K, last)`, and 64 seeded random tail pairs. Adequate
    /// for ultrametrics, where adjacent pairs bound every tail pair.
    Ultrametric,
    /// Every pair in the window.
    Exhaustive,
}

const RANDOM_TAIL_PAIRS: usize = 64;
const SAMPLING_SEED: u64 = 0x5eed_cafe;

/// Settles convergence of a sequence observed on `first..=last`.
///
/// Candidate witnesses are `first..=first + (last - first) / 2`, so a
/// converged answer is always backed by at least half of the window.
pub fn settle<D, F, B>(
    first: usize,
    last: usize,
    precision: u64,
    sampling: PairSampling,
    mut dist: F,
    below: B,
) -> Verdict<D>
where
    F: FnMut(usize, usize) -> D,
    B: Fn(&D) -> bool,
{
    if last <= first {
        return Verdict::Unknown { horizon: last };
    }
    let max_candidate = first + (last - first) / 2;

    // latest violating pair, if any
    let mut latest: Option<(usize, usize, D)> = None;
    match sampling {
        PairSampling::Ultrametric => {
            for k in first..last {
                let d = dist(k, k + 1);
                if !below(&d) {
                    latest = Some((k, k + 1, d));
                }
            }
        }
        PairSampling::Exhaustive => {
            // scan from the right so the first hit has the largest smaller index
            'outer: for k in (first..last).rev() {
                for j in (k + 1..=last).rev() {
                    let d = dist(k, j);
                    if !below(&d) {
                        latest = Some((k, j, d));
                        break 'outer;
                    }
                }
            }
        }
    }

    let witness = match &latest {
        None => first,
        Some((k, _, _)) => k + 1,
    };
    if witness > max_candidate {
        let (k, j, observed) = latest.expect("a violation moved the witness");
        return Verdict::RefutedAt { k, j, observed };
    }

    if sampling == PairSampling::Ultrametric && witness < last {
        let d = dist(witness, last);
        if !below(&d) {
            return Verdict::RefutedAt {
                k: witness,
                j: last,
                observed: d,
            };
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLING_SEED);
        for _ in 0..RANDOM_TAIL_PAIRS {
            let k = rng.gen_range(witness..=last);
            let j = rng.gen_range(witness..=last);
            if k == j {
                continue;
            }
            let d = dist(k.min(j), k.max(j));
            if !below(&d) {
                return Verdict::RefutedAt {
                    k: k.min(j),
                    j: k.max(j),
                    observed: d,
                };
            }
        }
    }
    Verdict::ConvergedUpTo { precision, witness }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gap(seq: &[i64]) -> impl FnMut(usize, usize) -> i64 + '_ {
        move |k, j| (seq[k] - seq[j]).abs()
    }

    #[test]
    fn constant_sequence_converges_immediately() {
        let seq = [3; 10];
        let v = settle(0, 9, 5, PairSampling::Exhaustive, gap(&seq), |d| *d < 1);
        assert_eq!(v, Verdict::ConvergedUpTo { precision: 5, witness: 0 });
    }

    #[test]
    fn late_settling_is_reported_with_witness() {
        let seq = [0, 5, 0, 5, 1, 1, 1, 1, 1, 1, 1];
        let v = settle(0, 10, 1, PairSampling::Exhaustive, gap(&seq), |d| *d < 1);
        assert_eq!(v, Verdict::ConvergedUpTo { precision: 1, witness: 4 });
    }

    #[test]
    fn persistent_oscillation_is_refuted() {
        let seq: Vec<i64> = (0..11).map(|i| i % 2).collect();
        let v = settle(0, 10, 1, PairSampling::Ultrametric, gap(&seq), |d| *d < 1);
        assert!(matches!(v, Verdict::RefutedAt { k: 9, j: 10, observed: 1 }));
    }

    #[test]
    fn degenerate_window_is_unknown() {
        let seq = [0];
        let v = settle(0, 0, 1, PairSampling::Exhaustive, gap(&seq), |d| *d < 1);
        assert_eq!(v, Verdict::Unknown { horizon: 0 });
    }
}
