use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::sets::ConceptSets;
use crate::config::ConfigurationStore;
use crate::error::{Error, Result};

/// Exact rational `|c̄_i - c̄_neg,i|`, kept as `numerator / denominator` with
/// `denominator = |S| * |S_neg|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Score {
    pub numerator: u64,
    pub denominator: u64,
}

impl Score {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.numerator as u128 * other.denominator as u128)
            .cmp(&(other.numerator as u128 * self.denominator as u128))
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.value())
    }
}

/// Value of the principal-configuration objective
/// `E_S[d_H(c(x), c_p)] - E_neg[d_H(c(y), c_p)]`, scaled by `|S| * |S_neg|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Objective {
    pub scaled: i64,
    pub denominator: u64,
}

impl Objective {
    pub fn value(&self) -> f64 {
        self.scaled as f64 / self.denominator as f64
    }
}

/// Per-neuron activation counts over the positive and negative sets.
///
/// Frequencies are `count / total`; all comparisons use the integer counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyProfile {
    positive_counts: Vec<u32>,
    positive_total: u32,
    negative_counts: Vec<u32>,
    negative_total: u32,
}

impl FrequencyProfile {
    pub fn from_counts(
        positive_counts: Vec<u32>,
        positive_total: u32,
        negative_counts: Vec<u32>,
        negative_total: u32,
    ) -> Result<Self> {
        if positive_counts.len() != negative_counts.len() {
            return Err(Error::query("positive and negative count vectors differ in length"));
        }
        if positive_total == 0 || negative_total == 0 {
            return Err(Error::degenerate("positive and negative sets must be non-empty"));
        }
        if positive_counts.iter().any(|&c| c > positive_total)
            || negative_counts.iter().any(|&c| c > negative_total)
        {
            return Err(Error::query("activation count exceeds set size"));
        }
        Ok(FrequencyProfile {
            positive_counts,
            positive_total,
            negative_counts,
            negative_total,
        })
    }

    /// Counts active states of every neuron over `sets.positive` and `sets.negative`.
    pub fn from_sets(store: &ConfigurationStore, sets: &ConceptSets) -> Result<Self> {
        let n = store.code_len();
        let count = |members: &[usize]| -> Vec<u32> {
            members
                .par_iter()
                .fold(
                    || vec![0u32; n],
                    |mut acc, &i| {
                        for (w, &word) in store.code_words(i).iter().enumerate() {
                            let mut bits = word;
                            while bits != 0 {
                                let b = bits.trailing_zeros() as usize;
                                acc[w * 64 + b] += 1;
                                bits &= bits - 1;
                            }
                        }
                        acc
                    },
                )
                .reduce(
                    || vec![0u32; n],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                )
        };
        FrequencyProfile::from_counts(
            count(&sets.positive),
            sets.positive.len() as u32,
            count(&sets.negative),
            sets.negative.len() as u32,
        )
    }

    pub fn len(&self) -> usize {
        self.positive_counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positive_counts.is_empty()
    }

    pub fn positive_total(&self) -> u32 {
        self.positive_total
    }

    pub fn negative_total(&self) -> u32 {
        self.negative_total
    }

    pub fn positive_count(&self, i: usize) -> u32 {
        self.positive_counts[i]
    }

    pub fn negative_count(&self, i: usize) -> u32 {
        self.negative_counts[i]
    }

    /// `c̄_i`
    pub fn positive_freq(&self, i: usize) -> f64 {
        self.positive_counts[i] as f64 / self.positive_total as f64
    }

    /// `c̄_neg,i`
    pub fn negative_freq(&self, i: usize) -> f64 {
        self.negative_counts[i] as f64 / self.negative_total as f64
    }

    pub fn denominator(&self) -> u64 {
        self.positive_total as u64 * self.negative_total as u64
    }

    pub fn score(&self, i: usize) -> Score {
        let pos = self.positive_counts[i] as i64 * self.negative_total as i64;
        let neg = self.negative_counts[i] as i64 * self.positive_total as i64;
        Score {
            numerator: pos.abs_diff(neg),
            denominator: self.denominator(),
        }
    }

    /// State assigned when neuron `i` is selected: the unanimous positive state when there
    /// is one, otherwise 1 iff `c̄_i >= c̄_neg,i`.
    pub fn preferred_state(&self, i: usize) -> bool {
        let pc = self.positive_counts[i];
        if pc == self.positive_total {
            return true;
        }
        if pc == 0 {
            return false;
        }
        pc as u64 * self.negative_total as u64 >= self.negative_counts[i] as u64 * self.positive_total as u64
    }

    /// Whether every positive instance shares one state at neuron `i`.
    pub fn is_unanimous(&self, i: usize) -> bool {
        let pc = self.positive_counts[i];
        pc == 0 || pc == self.positive_total
    }

    /// Objective of constraining neurons to the given states, computed from expected
    /// mismatch counts on each side.
    pub fn objective(&self, selection: &[(usize, bool)]) -> Objective {
        let pt = self.positive_total as i64;
        let nt = self.negative_total as i64;
        let scaled = selection
            .iter()
            .map(|&(i, state)| {
                let pc = self.positive_counts[i] as i64;
                let nc = self.negative_counts[i] as i64;
                let pos_mismatch = if state { pt - pc } else { pc };
                let neg_mismatch = if state { nt - nc } else { nc };
                pos_mismatch * nt - neg_mismatch * pt
            })
            .sum();
        Objective {
            scaled,
            denominator: self.denominator(),
        }
    }
}
