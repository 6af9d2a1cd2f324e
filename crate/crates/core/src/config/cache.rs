//! Packed configuration cache.
//!
//! Layout (all integers little-endian): 8-byte magic `RDRCODE1`, neuron-set fingerprint
//! (u64), instance count (u64), bits per code (u64), then `instances * ceil(bits / 64)`
//! u64 words.

use std::fs;
use std::path::Path;

use super::neuron_set::NeuronSet;
use super::store::{binarize, ConfigurationStore};
use crate::error::Result;
use crate::store::ActivationDataset;

const MAGIC: &[u8; 8] = b"RDRCODE1";
const HEADER_LEN: usize = 32;

pub fn write_cache(store: &ConfigurationStore, path: impl AsRef<Path>) -> Result<()> {
    let words = store.raw_words();
    let mut out = Vec::with_capacity(HEADER_LEN + words.len() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&store.neuron_set().fingerprint().to_le_bytes());
    out.extend_from_slice(&(store.num_instances() as u64).to_le_bytes());
    out.extend_from_slice(&(store.code_len() as u64).to_le_bytes());
    for w in words {
        out.extend_from_slice(&w.to_le_bytes());
    }
    fs::write(path, out)?;
    Ok(())
}

/// Packed words from `path` if its header matches `neuron_set` and `num_instances`.
pub fn read_cache(path: impl AsRef<Path>, neuron_set: &NeuronSet, num_instances: usize) -> Option<Vec<u64>> {
    let bytes = fs::read(path).ok()?;
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return None;
    }
    let field = |i: usize| u64::from_le_bytes(bytes[8 + 8 * i..16 + 8 * i].try_into().unwrap());
    if field(0) != neuron_set.fingerprint()
        || field(1) != num_instances as u64
        || field(2) != neuron_set.total_size() as u64
    {
        return None;
    }
    let body = &bytes[HEADER_LEN..];
    let expected = num_instances * neuron_set.total_size().div_ceil(64) * 8;
    if body.len() != expected {
        return None;
    }
    Some(
        body.chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
    )
}

/// Loads the store from `path` when the cache is valid, otherwise binarizes and rewrites it.
pub fn binarize_cached(
    dataset: &ActivationDataset,
    neuron_set: &NeuronSet,
    path: impl AsRef<Path>,
) -> Result<ConfigurationStore> {
    let path = path.as_ref();
    if let Some(words) = read_cache(path, neuron_set, dataset.num_instances()) {
        return ConfigurationStore::from_raw(neuron_set.clone(), words, dataset.meta().clone());
    }
    let store = binarize(dataset, neuron_set)?;
    write_cache(&store, path)?;
    Ok(store)
}
