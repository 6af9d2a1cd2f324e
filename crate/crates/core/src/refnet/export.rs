use std::path::Path;

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::net::RefNet;
use super::weights::save_weights;
use crate::error::Result;
use crate::store::{write_dump, ActivationDataset, LayerShape, LayerSpec, Metadata};

/// File name of the network weights written next to an exported dump.
pub const WEIGHTS_FILE: &str = "refnet.weights";

/// `n` standard-normal inputs of width `dim`, one per row.
pub fn sample_inputs(n: usize, dim: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_simple_fn((n, dim), || StandardNormal.sample(&mut rng))
}

/// Class labels from a seeded random linear map of the inputs (argmax of `inputs * A`).
pub fn teacher_labels(inputs: &Array2<f64>, classes: usize, seed: u64) -> Vec<u32> {
    let teacher = sample_inputs(inputs.ncols(), classes, seed);
    inputs.dot(&teacher).outer_iter().map(|row| argmax(row.iter().copied())).collect()
}

pub(crate) fn argmax(values: impl Iterator<Item = f64>) -> u32 {
    let mut best = (0u32, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i as u32, v);
        }
    }
    best.0
}

/// Runs every input through the network and collects hidden activations (layers `1..=L`,
/// as `f32`) with predictions and the optional labels.
pub fn activation_dataset(net: &RefNet, inputs: &Array2<f64>, labels: Option<Vec<u32>>) -> Result<ActivationDataset> {
    let n = inputs.nrows();
    let forwards = inputs
        .outer_iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|row| net.forward_record(&row.to_vec()))
        .collect::<Result<Vec<_>>>()?;

    let layers: Vec<LayerSpec> = (1..=net.depth())
        .map(|l| LayerSpec::new(l as u32, format!("dense{l}_relu"), LayerShape::Flat(net.width(l))))
        .collect();
    let activations: Vec<Array2<f32>> = (0..net.depth())
        .map(|l| Array2::from_shape_fn((n, net.width(l + 1)), |(r, c)| forwards[r].activations[l][c] as f32))
        .collect();
    let predictions = forwards.iter().map(|f| argmax(f.logits.iter().copied())).collect();
    let mut meta = Metadata::anonymous(n).with_predictions(predictions);
    meta.labels = labels;
    ActivationDataset::new(layers, activations, meta)
}

/// Writes the activation dump of `inputs` to `dir` along with the network weights.
pub fn export_activations(
    net: &RefNet,
    inputs: &Array2<f64>,
    labels: Option<Vec<u32>>,
    dir: impl AsRef<Path>,
) -> Result<ActivationDataset> {
    let dataset = activation_dataset(net, inputs, labels)?;
    write_dump(&dataset, dir.as_ref())?;
    save_weights(net, dir.as_ref().join(WEIGHTS_FILE))?;
    Ok(dataset)
}

/// Logits for each row of `inputs`.
pub fn batch_logits(net: &RefNet, inputs: &Array2<f64>) -> Result<Vec<Array1<f64>>> {
    inputs.outer_iter().map(|row| net.logits(&row.to_vec())).collect()
}
