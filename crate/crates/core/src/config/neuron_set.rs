use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::store::{ActivationDataset, LayerId, LayerSpec, NeuronRef};

/// Ordered set of layers whose neurons make up a configuration.
///
/// Canonical order is ascending layer id, then ascending flat index within the layer;
/// this fixes the concatenation order of per-layer states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeuronSet {
    layers: Vec<LayerSpec>,
    offsets: Vec<usize>,
    total: usize,
    states_per_neuron: u8,
}

impl NeuronSet {
    pub fn new(mut layers: Vec<LayerSpec>) -> Result<Self> {
        layers.sort_by_key(|s| s.layer_id);
        layers.dedup_by_key(|s| s.layer_id);
        if layers.is_empty() {
            return Err(Error::query("neuron set must contain at least one layer"));
        }
        let mut offsets = Vec::with_capacity(layers.len());
        let mut total = 0;
        for spec in &layers {
            offsets.push(total);
            total += spec.neurons();
        }
        Ok(NeuronSet {
            layers,
            offsets,
            total,
            // Only binary (ReLU-style) states are implemented.
            states_per_neuron: 2,
        })
    }

    pub fn from_dataset(dataset: &ActivationDataset, layers: &[LayerId]) -> Result<Self> {
        let specs = layers
            .iter()
            .map(|&id| dataset.layer(id).cloned())
            .collect::<Result<Vec<_>>>()?;
        NeuronSet::new(specs)
    }

    /// Every layer of the dataset.
    pub fn all(dataset: &ActivationDataset) -> Result<Self> {
        NeuronSet::new(dataset.layers().to_vec())
    }

    pub fn total_size(&self) -> usize {
        self.total
    }

    pub fn states_per_neuron(&self) -> u8 {
        self.states_per_neuron
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn layer_ids(&self) -> Vec<LayerId> {
        self.layers.iter().map(|s| s.layer_id).collect()
    }

    pub fn layer(&self, id: LayerId) -> Option<&LayerSpec> {
        self.layers.iter().find(|s| s.layer_id == id)
    }

    /// Neuron at canonical position `pos`.
    pub fn neuron(&self, pos: usize) -> NeuronRef {
        assert!(pos < self.total, "position {pos} out of range");
        let slot = self.offsets.partition_point(|&o| o <= pos) - 1;
        NeuronRef::new(self.layers[slot].layer_id, pos - self.offsets[slot])
    }

    /// Canonical position of `neuron`, if it belongs to this set.
    pub fn position(&self, neuron: NeuronRef) -> Option<usize> {
        let slot = self.layers.iter().position(|s| s.layer_id == neuron.layer)?;
        (neuron.index < self.layers[slot].neurons()).then(|| self.offsets[slot] + neuron.index)
    }

    pub fn neurons(&self) -> impl Iterator<Item = NeuronRef> + '_ {
        self.layers
            .iter()
            .flat_map(|s| (0..s.neurons()).map(move |i| NeuronRef::new(s.layer_id, i)))
    }

    /// Stable 64-bit digest of the layer list (ids, names, shapes).
    pub fn fingerprint(&self) -> u64 {
        let mut hasher = Sha256::new();
        for spec in &self.layers {
            hasher.update(spec.layer_id.to_le_bytes());
            hasher.update(spec.name.as_bytes());
            hasher.update([0]);
            for d in spec.shape.dims() {
                hasher.update((d as u64).to_le_bytes());
            }
        }
        let digest = hasher.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::LayerShape;

    #[test]
    fn canonical_positions_follow_layer_order() {
        let set = NeuronSet::new(vec![
            LayerSpec::new(7, "b", LayerShape::Flat(3)),
            LayerSpec::new(2, "a", LayerShape::Flat(4)),
        ])
        .unwrap();
        assert_eq!(set.layer_ids(), vec![2, 7]);
        assert_eq!(set.total_size(), 7);
        assert_eq!(set.neuron(3), NeuronRef::new(2, 3));
        assert_eq!(set.neuron(4), NeuronRef::new(7, 0));
        assert_eq!(set.position(NeuronRef::new(7, 2)), Some(6));
        assert_eq!(set.position(NeuronRef::new(7, 3)), None);
        let all: Vec<_> = set.neurons().collect();
        assert_eq!(all.len(), 7);
        assert!(all.iter().enumerate().all(|(p, n)| set.position(*n) == Some(p)));
    }

    #[test]
    fn empty_set_is_rejected() {
        assert!(matches!(NeuronSet::new(vec![]), Err(Error::Query(_))));
    }
}
