use std::sync::Arc;

use ndarray::Array2;
use proptest::prelude::*;
use rdr::analysis::layer_sweep;
use rdr::config::{binarize, config_knn, Configuration, ConfigurationStore, NeuronSet};
use rdr::region::{
    brute_force_select, build_rdr, greedy_select, FrequencyProfile, NegativePolicy, DEFAULT_K, DEFAULT_T,
};
use rdr::store::{ActivationDataset, LayerShape, LayerSpec, Metadata};

fn bits(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<bool>> {
    len.prop_flat_map(|n| proptest::collection::vec(any::<bool>(), n))
}

/// Random dataset whose entries are zero with probability ~1/2 and otherwise signed values.
fn dataset(rows: usize, cols: usize) -> impl Strategy<Value = ActivationDataset> {
    proptest::collection::vec(prop_oneof![Just(0.0f32), -3.0f32..3.0], rows * cols).prop_map(move |v| {
        let acts = Array2::from_shape_vec((rows, cols), v).unwrap();
        let layers = vec![LayerSpec::new(1, "a", LayerShape::Flat(cols))];
        ActivationDataset::new(layers, vec![acts], Metadata::anonymous(rows)).unwrap()
    })
}

fn store_of(ds: &ActivationDataset) -> Arc<ConfigurationStore> {
    Arc::new(binarize(ds, &NeuronSet::all(ds).unwrap()).unwrap())
}

proptest! {
    #[test]
    fn configuration_distance_is_a_metric(
        (a, b, c) in (1usize..300).prop_flat_map(|n| (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(any::<bool>(), n),
        ))
    ) {
        let (a, b, c) = (Configuration::from_bits(a), Configuration::from_bits(b), Configuration::from_bits(c));
        prop_assert_eq!(a.distance(&a).unwrap(), 0);
        prop_assert_eq!(a.distance(&b).unwrap(), b.distance(&a).unwrap());
        prop_assert!(a.distance(&c).unwrap() <= a.distance(&b).unwrap() + b.distance(&c).unwrap());
    }

    #[test]
    fn complement_is_at_full_distance(a in bits(1..500)) {
        let c = Configuration::from_bits(a.clone());
        prop_assert_eq!(c.distance(&c.complement()).unwrap() as usize, a.len());
    }

    #[test]
    fn knn_matches_sorted_scan(ds in dataset(30, 20), target in 0usize..30, k in 1usize..=30) {
        let store = store_of(&ds);
        let got = config_knn(&store, target, k).unwrap();
        let mut rest: Vec<(u32, usize)> = (0..30)
            .filter(|&i| i != target)
            .map(|i| (store.distance(target, i), i))
            .collect();
        rest.sort();
        let want: Vec<(usize, u32)> = std::iter::once((target, 0))
            .chain(rest.into_iter().map(|(d, i)| (i, d)))
            .take(k)
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn greedy_attains_the_exhaustive_optimum(
        (pt, nt, pos, neg, t) in (1u32..10, 1u32..20, 4usize..12).prop_flat_map(|(pt, nt, n)| (
            Just(pt),
            Just(nt),
            proptest::collection::vec(0..=pt, n),
            proptest::collection::vec(0..=nt, n),
            1..=n.min(4),
        ))
    ) {
        let n = pos.len();
        let profile = FrequencyProfile::from_counts(pos, pt, neg, nt).unwrap();
        let candidates: Vec<usize> = (0..n).collect();
        let greedy = greedy_select(&profile, &candidates, t).unwrap();
        let exact = brute_force_select(&profile, &candidates, t).unwrap();
        prop_assert_eq!(greedy.objective(), exact.objective());
        prop_assert_eq!(profile.objective(&greedy.entries().iter().map(|e| (e.position, e.state)).collect::<Vec<_>>()), greedy.objective());
    }

    #[test]
    fn regions_cover_positives_and_nest(ds in dataset(40, 48), target in 0usize..40) {
        let store = store_of(&ds);
        let Ok(region) = build_rdr(&store, target, 3, 6, NegativePolicy::Rest) else {
            return Ok(());
        };
        let members = region.members();
        for p in &region.sets().positive {
            prop_assert!(members.contains(p));
        }
        for t in 1..6 {
            let wider = region.truncated(t).members();
            prop_assert!(members.iter().all(|m| wider.contains(m)));
        }
        // membership is exactly the mask test against the target's states
        for i in 0..40 {
            let matches = region.principal().entries().iter().all(|e| store.bit(i, e.position) == e.state);
            prop_assert_eq!(matches, members.contains(&i));
        }
    }

    #[test]
    fn positive_scaling_preserves_regions(ds in dataset(30, 40), target in 0usize..30, factor in 0.01f32..100.0) {
        let a = store_of(&ds);
        let b = store_of(&ds.scaled(factor).unwrap());
        for i in 0..30 {
            prop_assert_eq!(a.configuration(i), b.configuration(i));
        }
        if let Ok(ra) = build_rdr(&a, target, 3, 4, NegativePolicy::Rest) {
            let rb = build_rdr(&b, target, 3, 4, NegativePolicy::Rest).unwrap();
            prop_assert_eq!(ra.members(), rb.members());
        }
    }
}

#[test]
fn zero_maps_to_inactive() {
    let c = Configuration::binarize(&[-0.5, 0.0, 2.3]);
    assert_eq!(c.to_string(), "001");
}

#[test]
fn default_parameters() {
    assert_eq!((DEFAULT_K, DEFAULT_T), (8, 10));
}

#[test]
fn noncontiguous_layer_lists() {
    let ids = [12u32, 14, 16, 17];
    let layers: Vec<LayerSpec> = (10..18).map(|id| LayerSpec::new(id, format!("l{id}"), LayerShape::Flat(16))).collect();
    let acts: Vec<Array2<f32>> = (0..8)
        .map(|l| Array2::from_shape_fn((50, 16), |(i, j)| if (i * 31 + j * 17 + l * 7) % 5 < 2 { 1.0 } else { 0.0 }))
        .collect();
    let ds = ActivationDataset::new(layers, acts, Metadata::anonymous(50)).unwrap();
    let set = NeuronSet::from_dataset(&ds, &ids).unwrap();
    assert_eq!(set.layer_ids(), ids.to_vec());
    assert_eq!(set.total_size(), 64);
    let sweep = layer_sweep(&ds, 0, &ids, 4, 2, NegativePolicy::Rest).unwrap();
    assert_eq!(sweep.keys().copied().collect::<Vec<_>>(), ids.to_vec());
}
