//! Seeded synthetic activation datasets with known structure.

use ndarray::Array2;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::store::{ActivationDataset, LayerShape, LayerSpec, Metadata, NeuronRef};

/// Instances in `subclasses` groups; each group switches on its own block of designated
/// neurons and leaves the other designated neurons at zero. Remaining neurons carry
/// ReLU'd Gaussian noise.
#[derive(Debug, Clone, PartialEq)]
pub struct SubclassSpec {
    pub subclasses: usize,
    pub per_subclass: usize,
    pub neurons: usize,
    pub designated: usize,
    /// Subclasses per coarse class label (`label = subclass / subclasses_per_class`).
    pub subclasses_per_class: usize,
}

impl Default for SubclassSpec {
    fn default() -> Self {
        SubclassSpec {
            subclasses: 4,
            per_subclass: 200,
            neurons: 64,
            designated: 12,
            subclasses_per_class: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SubclassData {
    pub dataset: ActivationDataset,
    /// Designated neurons, ordered by subclass block.
    pub designated: Vec<NeuronRef>,
}

fn relu_noise(rng: &mut ChaCha8Rng) -> f32 {
    let v: f64 = StandardNormal.sample(rng);
    v.max(0.0) as f32
}

fn active_value(rng: &mut ChaCha8Rng) -> f32 {
    let v: f64 = StandardNormal.sample(rng);
    (0.5 + v.abs()) as f32
}

/// Single flat layer (id 1) of subclass-imprinted activations. Instances are shuffled.
pub fn subclass_dataset(spec: &SubclassSpec, seed: u64) -> Result<SubclassData> {
    if spec.subclasses == 0 || spec.designated < spec.subclasses || spec.designated > spec.neurons {
        return Err(Error::query("designated neurons must cover every subclass and fit the layer"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let designated = sample(&mut rng, spec.neurons, spec.designated).into_vec();
    let block = spec.designated / spec.subclasses;
    // designated[b * block .. (b + 1) * block] belongs to subclass b; leftovers stay off
    let owner = |slot: usize| (slot / block < spec.subclasses).then_some(slot / block);

    let n = spec.subclasses * spec.per_subclass;
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut acts = Array2::<f32>::zeros((n, spec.neurons));
    let mut subclasses = vec![0u32; n];
    for (row, &item) in order.iter().enumerate() {
        let sub = item / spec.per_subclass;
        subclasses[row] = sub as u32;
        for col in 0..spec.neurons {
            acts[[row, col]] = relu_noise(&mut rng);
        }
        for (slot, &col) in designated.iter().enumerate() {
            acts[[row, col]] = if owner(slot) == Some(sub) { active_value(&mut rng) } else { 0.0 };
        }
    }
    let labels: Vec<u32> = subclasses.iter().map(|s| s / spec.subclasses_per_class.max(1) as u32).collect();
    let meta = Metadata::anonymous(n)
        .with_labels(labels.clone())
        .with_predictions(labels)
        .with_subclass_labels(subclasses);
    let layers = vec![LayerSpec::new(1, "synthetic", LayerShape::Flat(spec.neurons))];
    Ok(SubclassData {
        dataset: ActivationDataset::new(layers, vec![acts], meta)?,
        designated: designated.into_iter().map(|i| NeuronRef::new(1, i)).collect(),
    })
}

/// Two-class dataset in which some class-0 instances are predicted as class 1 because
/// they share the class-1 signature and a planted "spurious" neuron that is active for
/// every class-1 and misclassified instance and inactive for every correctly classified
/// class-0 instance.
#[derive(Debug, Clone)]
pub struct SpuriousData {
    pub dataset: ActivationDataset,
    pub spurious: NeuronRef,
    /// Indices of the misclassified instances.
    pub misclassified: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpuriousSpec {
    pub class0: usize,
    pub class1: usize,
    pub misclassified: usize,
    /// Conv shape of the single layer (id 1).
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub signature: usize,
}

impl Default for SpuriousSpec {
    fn default() -> Self {
        SpuriousSpec {
            class0: 200,
            class1: 200,
            misclassified: 20,
            channels: 4,
            height: 4,
            width: 4,
            signature: 16,
        }
    }
}

pub fn spurious_dataset(spec: &SpuriousSpec, seed: u64) -> Result<SpuriousData> {
    let neurons = spec.channels * spec.height * spec.width;
    if spec.signature + 1 > neurons {
        return Err(Error::query("signature does not fit the layer"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = sample(&mut rng, neurons, spec.signature + 1).into_vec();
    let spurious = picked[0];
    let signature = &picked[1..];

    // 0: correct class 0, 1: class 1, 2: class 0 predicted as 1
    let mut kinds: Vec<u8> = std::iter::repeat_n(0, spec.class0)
        .chain(std::iter::repeat_n(1, spec.class1))
        .chain(std::iter::repeat_n(2, spec.misclassified))
        .collect();
    for i in (1..kinds.len()).rev() {
        kinds.swap(i, rng.gen_range(0..=i));
    }
    let n = kinds.len();
    let mut acts = Array2::<f32>::zeros((n, neurons));
    for (row, &kind) in kinds.iter().enumerate() {
        for col in 0..neurons {
            acts[[row, col]] = relu_noise(&mut rng);
        }
        for &col in signature {
            acts[[row, col]] = if kind == 0 {
                if rng.gen_bool(0.5) {
                    active_value(&mut rng)
                } else {
                    0.0
                }
            } else {
                active_value(&mut rng)
            };
        }
        acts[[row, spurious]] = if kind == 0 { 0.0 } else { active_value(&mut rng) };
    }
    let labels: Vec<u32> = kinds.iter().map(|&k| (k == 1) as u32).collect();
    let predictions: Vec<u32> = kinds.iter().map(|&k| (k != 0) as u32).collect();
    let meta = Metadata::anonymous(n).with_labels(labels).with_predictions(predictions);
    let layers = vec![LayerSpec::new(
        1,
        "synthetic_conv",
        LayerShape::Conv {
            channels: spec.channels,
            height: spec.height,
            width: spec.width,
        },
    )];
    Ok(SpuriousData {
        dataset: ActivationDataset::new(layers, vec![acts], meta)?,
        spurious: NeuronRef::new(1, spurious),
        misclassified: kinds.iter().enumerate().filter(|(_, &k)| k == 2).map(|(i, _)| i).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subclass_layout() {
        let data = subclass_dataset(&SubclassSpec::default(), 1).unwrap();
        let ds = &data.dataset;
        assert_eq!(ds.num_instances(), 800);
        let subs = ds.meta().subclass_labels.as_ref().unwrap();
        let acts = ds.activations(1).unwrap();
        for (row, &s) in subs.iter().enumerate() {
            for (slot, n) in data.designated.iter().enumerate() {
                let on = acts[[row, n.index]] > 0.0;
                assert_eq!(on, slot / 3 == s as usize);
            }
        }
        assert_eq!(subclass_dataset(&SubclassSpec::default(), 1).unwrap().dataset, data.dataset);
    }

    #[test]
    fn spurious_layout() {
        let data = spurious_dataset(&SpuriousSpec::default(), 2).unwrap();
        let ds = &data.dataset;
        assert_eq!(data.misclassified.len(), 20);
        let labels = ds.meta().labels.as_ref().unwrap();
        let preds = ds.meta().predictions.as_ref().unwrap();
        let acts = ds.activations(1).unwrap();
        for i in 0..ds.num_instances() {
            let correct0 = labels[i] == 0 && preds[i] == 0;
            assert_eq!(acts[[i, data.spurious.index]] > 0.0, !correct0);
        }
        assert!(data.misclassified.iter().all(|&i| labels[i] == 0 && preds[i] == 1));
    }
}
