use rayon::prelude::*;

use super::bits::{hamming_words, words_for, Configuration};
use super::neuron_set::NeuronSet;
use crate::error::{Error, Result};
use crate::store::{ActivationDataset, Metadata};

/// Bit-packed configurations, one per instance, over a fixed [`NeuronSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationStore {
    neuron_set: NeuronSet,
    words_per_code: usize,
    data: Vec<u64>,
    meta: Metadata,
}

/// Binarizes every instance of `dataset` over `neuron_set` (state 1 iff activation > 0).
pub fn binarize(dataset: &ActivationDataset, neuron_set: &NeuronSet) -> Result<ConfigurationStore> {
    let matrices = neuron_set
        .layers()
        .iter()
        .map(|spec| {
            let found = dataset.layer(spec.layer_id)?;
            if found.shape != spec.shape {
                return Err(Error::query(format!(
                    "layer {} is {} in the dataset but {} in the neuron set",
                    spec.layer_id, found.shape, spec.shape
                )));
            }
            dataset.activations(spec.layer_id)
        })
        .collect::<Result<Vec<_>>>()?;

    let words_per_code = words_for(neuron_set.total_size());
    let mut data = vec![0u64; words_per_code * dataset.num_instances()];
    if words_per_code > 0 {
        data.par_chunks_mut(words_per_code)
            .enumerate()
            .for_each(|(row, code)| {
                let mut pos = 0;
                for matrix in &matrices {
                    for &v in matrix.row(row) {
                        if v > 0.0 {
                            code[pos / 64] |= 1 << (pos % 64);
                        }
                        pos += 1;
                    }
                }
            });
    }
    Ok(ConfigurationStore {
        neuron_set: neuron_set.clone(),
        words_per_code,
        data,
        meta: dataset.meta().clone(),
    })
}

impl ConfigurationStore {
    /// Store over hand-built codes. All codes must have `neuron_set.total_size()` bits.
    pub fn from_codes(neuron_set: NeuronSet, codes: &[Configuration], meta: Metadata) -> Result<Self> {
        if meta.instance_ids.len() != codes.len() {
            return Err(Error::Schema(format!(
                "{} codes but {} instance ids",
                codes.len(),
                meta.instance_ids.len()
            )));
        }
        let words_per_code = words_for(neuron_set.total_size());
        let mut data = Vec::with_capacity(words_per_code * codes.len());
        for (i, code) in codes.iter().enumerate() {
            if code.len() != neuron_set.total_size() {
                return Err(Error::query(format!(
                    "code {i} has {} bits, neuron set has {}",
                    code.len(),
                    neuron_set.total_size()
                )));
            }
            data.extend_from_slice(code.words());
        }
        Ok(ConfigurationStore {
            neuron_set,
            words_per_code,
            data,
            meta,
        })
    }

    pub(crate) fn from_raw(neuron_set: NeuronSet, data: Vec<u64>, meta: Metadata) -> Result<Self> {
        let words_per_code = words_for(neuron_set.total_size());
        if data.len() != words_per_code * meta.instance_ids.len() {
            return Err(Error::Schema("packed code length does not match instance count".into()));
        }
        Ok(ConfigurationStore {
            neuron_set,
            words_per_code,
            data,
            meta,
        })
    }

    pub fn neuron_set(&self) -> &NeuronSet {
        &self.neuron_set
    }

    pub fn meta(&self) -> &Metadata {
        &self.meta
    }

    pub fn num_instances(&self) -> usize {
        self.meta.instance_ids.len()
    }

    pub fn code_len(&self) -> usize {
        self.neuron_set.total_size()
    }

    pub fn words_per_code(&self) -> usize {
        self.words_per_code
    }

    pub(crate) fn raw_words(&self) -> &[u64] {
        &self.data
    }

    /// Packed words of instance `i`.
    pub fn code_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.words_per_code..(i + 1) * self.words_per_code]
    }

    pub fn configuration(&self, i: usize) -> Configuration {
        Configuration::from_words(self.code_words(i).to_vec(), self.code_len())
    }

    /// State of instance `i` at canonical position `pos`.
    #[inline]
    pub fn bit(&self, i: usize, pos: usize) -> bool {
        self.data[i * self.words_per_code + pos / 64] >> (pos % 64) & 1 == 1
    }

    pub fn distance(&self, a: usize, b: usize) -> u32 {
        hamming_words(self.code_words(a), self.code_words(b))
    }

    pub(crate) fn check_instance(&self, i: usize) -> Result<()> {
        if i >= self.num_instances() {
            return Err(Error::query(format!(
                "instance {i} out of range (store has {})",
                self.num_instances()
            )));
        }
        Ok(())
    }

    pub fn instance_id(&self, i: usize) -> &str {
        &self.meta.instance_ids[i]
    }
}
