//! Exact nearest-neighbor scans.
//!
//! The query instance is always returned first at distance 0; remaining entries are
//! ordered by ascending distance, ties by ascending instance index.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use ndarray::ArrayView1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::store::ConfigurationStore;
use crate::error::{Error, Result};
use crate::store::{ActivationDataset, LayerId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Hamming distance between configurations.
    Configuration,
    /// L2 distance between one layer's raw activations.
    Euclidean,
    /// `1 - cos` between one layer's raw activations.
    Cosine,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "configuration" | "config" | "hamming" => Ok(Metric::Configuration),
            "euclidean" | "l2" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::query(format!("unknown metric {other:?}"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Configuration => "configuration",
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::query(format!("k must be in [1, {n}], got {k}")));
    }
    Ok(())
}

/// Target first, then the `k - 1` smallest `(distance, index)` pairs among the rest.
fn select_smallest<D, F>(target: usize, zero: D, distances: Vec<D>, k: usize, cmp: F) -> Vec<(usize, D)>
where
    D: Copy,
    F: Fn(&D, &D) -> Ordering,
{
    let key = |a: &(usize, D), b: &(usize, D)| cmp(&a.1, &b.1).then(a.0.cmp(&b.0));
    let mut rest: Vec<(usize, D)> = distances
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| i != target)
        .collect();
    let take = k - 1;
    if take > 0 && take < rest.len() {
        rest.select_nth_unstable_by(take - 1, key);
    }
    rest.truncate(take);
    rest.sort_unstable_by(key);
    let mut out = Vec::with_capacity(k);
    out.push((target, zero));
    out.extend(rest);
    out
}

/// Configuration distance from `target` to every instance, in index order.
pub fn config_distances(store: &ConfigurationStore, target: usize) -> Result<Vec<u32>> {
    store.check_instance(target)?;
    Ok((0..store.num_instances())
        .into_par_iter()
        .map(|i| store.distance(target, i))
        .collect())
}

/// `k` configuration-nearest instances of `target`, the target included.
pub fn config_knn(store: &ConfigurationStore, target: usize, k: usize) -> Result<Vec<(usize, u32)>> {
    store.check_instance(target)?;
    check_k(k, store.num_instances())?;
    let distances = config_distances(store, target)?;
    Ok(select_smallest(target, 0, distances, k, u32::cmp))
}

/// Ascending list of the `top_m` smallest configuration distances from `target`
/// (the target's own zero included).
pub fn distance_histogram(store: &ConfigurationStore, target: usize, top_m: usize) -> Result<Vec<u32>> {
    Ok(config_knn(store, target, top_m)?
        .into_iter()
        .map(|(_, d)| d)
        .collect())
}

fn cosine_distance(a: ArrayView1<f32>, b: ArrayView1<f32>, norm_a: f64, norm_b: f64) -> f64 {
    let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| *x as f64 * *y as f64).sum();
    1.0 - dot / (norm_a * norm_b)
}

fn euclidean_distance(a: ArrayView1<f32>, b: ArrayView1<f32>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let d = *x as f64 - *y as f64;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// `k` nearest instances of `target` under a raw-activation metric on one layer.
pub fn feature_knn(
    dataset: &ActivationDataset,
    layer: LayerId,
    target: usize,
    k: usize,
    metric: Metric,
) -> Result<Vec<Neighbor>> {
    let n = dataset.num_instances();
    if target >= n {
        return Err(Error::query(format!("instance {target} out of range ({n} instances)")));
    }
    check_k(k, n)?;
    let features = dataset.activations(layer)?;
    let distances: Vec<f64> = match metric {
        Metric::Euclidean => (0..n)
            .into_par_iter()
            .map(|i| euclidean_distance(features.row(target), features.row(i)))
            .collect(),
        Metric::Cosine => {
            let norms: Vec<f64> = features
                .outer_iter()
                .map(|row| row.iter().map(|v| (*v as f64).powi(2)).sum::<f64>().sqrt())
                .collect();
            if let Some(zero) = norms.iter().position(|&nrm| nrm == 0.0) {
                return Err(Error::degenerate(format!(
                    "instance {} ({:?}) has a zero-norm feature vector in layer {layer}",
                    zero,
                    dataset.meta().instance_ids[zero]
                )));
            }
            (0..n)
                .into_par_iter()
                .map(|i| cosine_distance(features.row(target), features.row(i), norms[target], norms[i]))
                .collect()
        }
        Metric::Configuration => {
            return Err(Error::query("configuration metric needs a configuration store"))
        }
    };
    Ok(select_smallest(target, 0.0, distances, k, f64::total_cmp)
        .into_iter()
        .map(|(index, distance)| Neighbor { index, distance })
        .collect())
}

/// Dispatches to [`config_knn`] or [`feature_knn`]. Feature metrics need the dataset and
/// a `feature_layer`.
pub fn knn(
    store: &ConfigurationStore,
    dataset: Option<&ActivationDataset>,
    target: usize,
    k: usize,
    metric: Metric,
    feature_layer: Option<LayerId>,
) -> Result<Vec<Neighbor>> {
    match metric {
        Metric::Configuration => Ok(config_knn(store, target, k)?
            .into_iter()
            .map(|(index, d)| Neighbor {
                index,
                distance: d as f64,
            })
            .collect()),
        Metric::Euclidean | Metric::Cosine => {
            let dataset = dataset.ok_or_else(|| Error::query(format!("{metric} needs raw activations")))?;
            let layer = feature_layer.ok_or_else(|| Error::query(format!("{metric} needs a feature layer")))?;
            feature_knn(dataset, layer, target, k, metric)
        }
    }
}
