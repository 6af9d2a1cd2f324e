use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::config::{binarize, NeuronSet};
use crate::error::{Error, Result};
use crate::region::{build_rdr, NegativePolicy, RelaxedDecisionRegion};
use crate::store::{ActivationDataset, LayerId};

/// One independent region per layer, each built from that layer's configuration alone.
/// Duplicate layers are collapsed; errors are tagged with their layer.
pub fn layer_sweep(
    dataset: &ActivationDataset,
    target: usize,
    layers: &[LayerId],
    k: usize,
    t: usize,
    policy: NegativePolicy,
) -> Result<BTreeMap<LayerId, RelaxedDecisionRegion>> {
    let mut unique = layers.to_vec();
    unique.sort_unstable();
    unique.dedup();
    unique
        .par_iter()
        .map(|&layer| {
            let tag = |e: Error| Error::Layer {
                layer,
                source: Box::new(e),
            };
            let set = NeuronSet::from_dataset(dataset, &[layer]).map_err(tag)?;
            let store = Arc::new(binarize(dataset, &set).map_err(tag)?);
            let region = build_rdr(&store, target, k, t, policy).map_err(tag)?;
            Ok((layer, region))
        })
        .collect()
}
