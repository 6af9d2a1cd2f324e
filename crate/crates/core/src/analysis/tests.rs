use std::sync::Arc;

use ndarray::Array2;

use super::*;
use crate::config::{binarize, NeuronSet};
use crate::error::Error;
use crate::region::{build_rdr, NegativePolicy};
use crate::store::{ActivationDataset, LayerShape, LayerSpec, Metadata};
use crate::synth::{spurious_dataset, SpuriousSpec};

/// conv[2,4,4]; the first 10 rows share a pattern switching on positions 0..7 of channel 0
/// and 0..3 of channel 1. The remaining rows leave those off and toggle everything else.
fn split_dataset() -> ActivationDataset {
    let shape = LayerShape::Conv {
        channels: 2,
        height: 4,
        width: 4,
    };
    let designated: Vec<usize> = (0..7).chain(16..19).collect();
    let n = 40;
    let mut acts = Array2::<f32>::zeros((n, 32));
    for i in 0..n {
        for j in 0..32 {
            let on = if i < 10 {
                designated.contains(&j)
            } else {
                !designated.contains(&j) && (i * 7 + j * 3) % 5 < 2
            };
            acts[[i, j]] = if on { 1.0 + (i + j) as f32 / 100.0 } else { 0.0 };
        }
    }
    ActivationDataset::new(vec![LayerSpec::new(3, "conv", shape)], vec![acts], Metadata::anonymous(n)).unwrap()
}

#[test]
fn localization_counts_channels() {
    let ds = split_dataset();
    let set = NeuronSet::all(&ds).unwrap();
    let store = Arc::new(binarize(&ds, &set).unwrap());
    let region = build_rdr(&store, 0, 8, 10, NegativePolicy::Rest).unwrap();
    let report = localize(&region, &ds, 3, Aggregation::Mean).unwrap();
    assert_eq!(
        report.channels,
        vec![ChannelCount { channel: 0, neurons: 7 }, ChannelCount { channel: 1, neurons: 3 }]
    );
    assert_eq!(report.maps.len(), 10);
    for map in &report.maps {
        assert_eq!(map.values.len(), 16);
        assert!(map.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn single_channel_aggregations_agree() {
    let ds = split_dataset();
    let set = NeuronSet::all(&ds).unwrap();
    let store = Arc::new(binarize(&ds, &set).unwrap());
    // top 7 by score then lowest position all sit in channel 0
    let region = build_rdr(&store, 0, 8, 7, NegativePolicy::Rest).unwrap();
    let mean = localize(&region, &ds, 3, Aggregation::Mean).unwrap();
    let weighted = localize(&region, &ds, 3, Aggregation::ScoreWeighted).unwrap();
    assert_eq!(mean.channels, vec![ChannelCount { channel: 0, neurons: 7 }]);
    for (a, b) in mean.maps.iter().zip(&weighted.maps) {
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn flat_layer_cannot_be_localized() {
    let data = crate::synth::subclass_dataset(&Default::default(), 0).unwrap();
    let set = NeuronSet::all(&data.dataset).unwrap();
    let store = Arc::new(binarize(&data.dataset, &set).unwrap());
    let region = build_rdr(&store, 0, 8, 4, NegativePolicy::Rest).unwrap();
    assert!(matches!(localize(&region, &data.dataset, 1, Aggregation::Mean), Err(Error::Query(_))));
}

#[test]
fn misclassification_finds_planted_neuron() {
    let data = spurious_dataset(&SpuriousSpec::default(), 11).unwrap();
    let set = NeuronSet::all(&data.dataset).unwrap();
    let store = Arc::new(binarize(&data.dataset, &set).unwrap());
    let target = data.misclassified[0];
    let report = misclassification_report(&data.dataset, &store, target, 8, 5).unwrap();
    let selected: Vec<_> = report.region.selected_neurons().into_iter().map(|(n, _)| n).collect();
    assert!(selected.contains(&data.spurious));
    assert_eq!(report.class_ratio.total(), report.region.members().len());
    assert!(report.localization.is_some());
    assert_eq!(report.region.policy(), NegativePolicy::SameTrueLabel(0));

    let labels = data.dataset.meta().labels.as_ref().unwrap();
    let preds = data.dataset.meta().predictions.as_ref().unwrap();
    let correct = (0..labels.len()).find(|&i| labels[i] == preds[i]).unwrap();
    assert!(matches!(
        misclassification_report(&data.dataset, &store, correct, 8, 5),
        Err(Error::Query(_))
    ));
}

#[test]
fn sweep_builds_one_region_per_layer() {
    let a = split_dataset();
    let acts = a.activations(3).unwrap().clone();
    let small = acts.slice(ndarray::s![.., ..4]).to_owned();
    let ds = ActivationDataset::new(
        vec![a.layers()[0].clone(), LayerSpec::new(5, "small", LayerShape::Flat(4))],
        vec![acts, small],
        Metadata::anonymous(40),
    )
    .unwrap();
    let sweep = layer_sweep(&ds, 0, &[3, 3], 8, 3, NegativePolicy::Rest).unwrap();
    assert_eq!(sweep.keys().copied().collect::<Vec<_>>(), vec![3]);
    assert_eq!(sweep[&3].store().neuron_set().layer_ids(), vec![3]);

    match layer_sweep(&ds, 0, &[3, 5], 8, 10, NegativePolicy::Rest) {
        Err(Error::Layer { layer: 5, source }) => {
            assert!(matches!(*source, Error::InsufficientCandidates { .. }))
        }
        other => panic!("unexpected {other:?}"),
    }
}
