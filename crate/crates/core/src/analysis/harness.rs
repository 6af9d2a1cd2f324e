//! Group-quality protocol: equal-size groups for several methods over random targets.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::metrics::{evaluate_group, GroupEvaluation};
use crate::config::{config_distances, ConfigurationStore};
use crate::error::{Error, Result};
use crate::region::{build_rdr, NegativePolicy};
use std::sync::Arc;

/// Brings `members` to exactly `size` instances: members nearest to the target first
/// (configuration distance, then index); if there are too few, the nearest non-members
/// fill the remainder.
pub fn equalize_group(store: &ConfigurationStore, target: usize, members: &[usize], size: usize) -> Result<Vec<usize>> {
    if size == 0 || size > store.num_instances() {
        return Err(Error::query(format!("group size must be in [1, {}]", store.num_instances())));
    }
    let distances = config_distances(store, target)?;
    let mut is_member = vec![false; store.num_instances()];
    members.iter().for_each(|&m| is_member[m] = true);
    let mut order: Vec<usize> = (0..store.num_instances()).collect();
    order.sort_by_key(|&i| (!is_member[i], i != target, distances[i], i));
    order.truncate(size);
    Ok(order)
}

/// The target plus `size - 1` distinct instances drawn uniformly.
pub fn random_group(num_instances: usize, target: usize, size: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut group = vec![target];
    group.extend(
        sample(rng, num_instances - 1, size - 1)
            .into_iter()
            .map(|i| if i >= target { i + 1 } else { i }),
    );
    group
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MethodSummary {
    pub mean_purity: f64,
    pub mean_entropy: f64,
}

impl MethodSummary {
    fn from(evals: &[GroupEvaluation]) -> Self {
        let n = evals.len() as f64;
        MethodSummary {
            mean_purity: evals.iter().map(|e| e.purity).sum::<f64>() / n,
            mean_entropy: evals.iter().map(|e| e.entropy).sum::<f64>() / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetResult {
    pub target: usize,
    pub region_size: usize,
    pub rdr: GroupEvaluation,
    pub knn: GroupEvaluation,
    pub random: GroupEvaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupBenchmark {
    pub targets: usize,
    pub group_size: usize,
    pub k: usize,
    pub t: usize,
    pub rdr: MethodSummary,
    /// Configuration k-nearest neighbors of the same size.
    pub knn: MethodSummary,
    pub random: MethodSummary,
    pub per_target: Vec<TargetResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkParams {
    pub targets: usize,
    pub group_size: usize,
    pub k: usize,
    pub t: usize,
    pub seed: u64,
}

impl Default for BenchmarkParams {
    fn default() -> Self {
        BenchmarkParams {
            targets: 50,
            group_size: 30,
            k: crate::region::DEFAULT_K,
            t: crate::region::DEFAULT_T,
            seed: 0,
        }
    }
}

/// Purity and entropy of RDR, k-NN and random groups of equal size over random targets.
pub fn group_benchmark(store: &Arc<ConfigurationStore>, params: &BenchmarkParams) -> Result<GroupBenchmark> {
    let n = store.num_instances();
    let subclasses = store.meta().subclass_labels.as_deref();
    if params.targets == 0 || params.targets > n {
        return Err(Error::query(format!("target count must be in [1, {n}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let targets = sample(&mut rng, n, params.targets).into_vec();
    let mut per_target = Vec::with_capacity(targets.len());
    for &target in &targets {
        let region = build_rdr(store, target, params.k, params.t, NegativePolicy::Rest)?;
        let members = region.members();
        let rdr_group = equalize_group(store, target, &members, params.group_size)?;
        let knn_group = equalize_group(store, target, &[], params.group_size)?;
        let random = random_group(n, target, params.group_size, &mut rng);
        per_target.push(TargetResult {
            target,
            region_size: members.len(),
            rdr: evaluate_group(&rdr_group, subclasses, target)?,
            knn: evaluate_group(&knn_group, subclasses, target)?,
            random: evaluate_group(&random, subclasses, target)?,
        });
    }
    let collect = |f: fn(&TargetResult) -> &GroupEvaluation| {
        MethodSummary::from(&per_target.iter().map(|r| f(r).clone()).collect::<Vec<_>>())
    };
    Ok(GroupBenchmark {
        targets: params.targets,
        group_size: params.group_size,
        k: params.k,
        t: params.t,
        rdr: collect(|r| &r.rdr),
        knn: collect(|r| &r.knn),
        random: collect(|r| &r.random),
        per_target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Configuration, NeuronSet};
    use crate::store::{LayerShape, LayerSpec, Metadata};

    fn store_of(codes: &[&str]) -> ConfigurationStore {
        let set = NeuronSet::new(vec![LayerSpec::new(1, "l", LayerShape::Flat(codes[0].len()))]).unwrap();
        let codes: Vec<_> = codes.iter().map(|c| Configuration::parse(c).unwrap()).collect();
        ConfigurationStore::from_codes(set, &codes, Metadata::anonymous(codes.len())).unwrap()
    }

    #[test]
    fn equalize_truncates_then_pads() {
        let store = store_of(&["0000", "0001", "0011", "0111", "1111"]);
        // members sorted by distance from target 0
        assert_eq!(equalize_group(&store, 0, &[4, 3, 0, 1], 2).unwrap(), vec![0, 1]);
        assert_eq!(equalize_group(&store, 0, &[0, 4], 4).unwrap(), vec![0, 4, 1, 2]);
        assert!(equalize_group(&store, 0, &[0], 6).is_err());
    }

    #[test]
    fn random_group_is_distinct_and_contains_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for target in [0, 5, 9] {
            let mut g = random_group(10, target, 10, &mut rng);
            assert_eq!(g[0], target);
            g.sort_unstable();
            assert_eq!(g, (0..10).collect::<Vec<_>>());
        }
    }
}
