use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{config_knn, ConfigurationStore};
use crate::error::{Error, Result};

/// How the negative (contrast) set is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativePolicy {
    /// Every instance outside the positive set.
    Rest,
    /// Instances whose true label equals the given class, minus the positive set.
    SameTrueLabel(u32),
}

impl fmt::Display for NegativePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegativePolicy::Rest => f.write_str("rest"),
            NegativePolicy::SameTrueLabel(label) => write!(f, "same_true_label({label})"),
        }
    }
}

/// Positive set `S` (the target's configuration neighbors, target first) and negative
/// set `S_neg` (ascending indices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConceptSets {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
}

impl ConceptSets {
    pub fn target(&self) -> usize {
        self.positive[0]
    }
}

pub fn build_concept_sets(
    store: &ConfigurationStore,
    target: usize,
    k: usize,
    policy: NegativePolicy,
) -> Result<ConceptSets> {
    let positive: Vec<usize> = config_knn(store, target, k)?.into_iter().map(|(i, _)| i).collect();
    let mut in_positive = vec![false; store.num_instances()];
    positive.iter().for_each(|&i| in_positive[i] = true);

    let negative: Vec<usize> = match policy {
        NegativePolicy::Rest => (0..store.num_instances()).filter(|&i| !in_positive[i]).collect(),
        NegativePolicy::SameTrueLabel(label) => {
            let labels = store
                .meta()
                .labels
                .as_ref()
                .ok_or_else(|| Error::query("same-true-label negatives need a label column"))?;
            (0..store.num_instances())
                .filter(|&i| !in_positive[i] && labels[i] == label)
                .collect()
        }
    };
    if negative.is_empty() {
        return Err(Error::degenerate(format!(
            "negative set is empty (k = {k}, policy {policy})"
        )));
    }
    Ok(ConceptSets { positive, negative })
}

/// Canonical positions of neurons on which every positive instance has the same state.
pub fn candidate_neurons(store: &ConfigurationStore, sets: &ConceptSets) -> Vec<usize> {
    let words = store.words_per_code();
    let mut all_on = vec![u64::MAX; words];
    let mut any_on = vec![0u64; words];
    for &i in &sets.positive {
        for (w, &code) in store.code_words(i).iter().enumerate() {
            all_on[w] &= code;
            any_on[w] |= code;
        }
    }
    (0..store.code_len())
        .filter(|&pos| {
            let (w, b) = (pos / 64, pos % 64);
            let on = all_on[w] >> b & 1 == 1;
            let off = any_on[w] >> b & 1 == 0;
            on || off
        })
        .collect()
}
