use std::sync::Arc;

use rayon::prelude::*;

use super::profile::FrequencyProfile;
use super::select::{greedy_select, PrincipalConfiguration};
use super::sets::{build_concept_sets, candidate_neurons, ConceptSets, NegativePolicy};
use crate::config::ConfigurationStore;
use crate::error::Result;
use crate::store::NeuronRef;

/// Default positive-set size.
pub const DEFAULT_K: usize = 8;
/// Default number of principal neurons.
pub const DEFAULT_T: usize = 10;

/// Principal configuration over a store, plus the inputs that produced it.
///
/// An instance is a member iff its configuration matches every selected state.
#[derive(Debug, Clone)]
pub struct RelaxedDecisionRegion {
    store: Arc<ConfigurationStore>,
    target: usize,
    k: usize,
    policy: NegativePolicy,
    sets: ConceptSets,
    candidate_count: usize,
    profile: FrequencyProfile,
    principal: PrincipalConfiguration,
}

/// Runs the full pipeline: concept sets, unanimous candidates, frequency profile,
/// greedy selection of `t` neurons.
pub fn build_rdr(
    store: &Arc<ConfigurationStore>,
    target: usize,
    k: usize,
    t: usize,
    policy: NegativePolicy,
) -> Result<RelaxedDecisionRegion> {
    let sets = build_concept_sets(store, target, k, policy)?;
    let candidates = candidate_neurons(store, &sets);
    let profile = FrequencyProfile::from_sets(store, &sets)?;
    let principal = greedy_select(&profile, &candidates, t)?;
    Ok(RelaxedDecisionRegion {
        store: Arc::clone(store),
        target,
        k,
        policy,
        sets,
        candidate_count: candidates.len(),
        profile,
        principal,
    })
}

impl RelaxedDecisionRegion {
    pub fn store(&self) -> &Arc<ConfigurationStore> {
        &self.store
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.principal.len()
    }

    pub fn policy(&self) -> NegativePolicy {
        self.policy
    }

    pub fn sets(&self) -> &ConceptSets {
        &self.sets
    }

    pub fn candidate_count(&self) -> usize {
        self.candidate_count
    }

    pub fn profile(&self) -> &FrequencyProfile {
        &self.profile
    }

    pub fn principal(&self) -> &PrincipalConfiguration {
        &self.principal
    }

    /// Selected neurons with their required states, in selection order.
    pub fn selected_neurons(&self) -> Vec<(NeuronRef, bool)> {
        let set = self.store.neuron_set();
        self.principal
            .entries()
            .iter()
            .map(|e| (set.neuron(e.position), e.state))
            .collect()
    }

    /// The same region restricted to its first `t` principal neurons.
    pub fn truncated(&self, t: usize) -> RelaxedDecisionRegion {
        RelaxedDecisionRegion {
            principal: self.principal.prefix(t, &self.profile),
            ..self.clone()
        }
    }

    fn mask_and_value(&self) -> (Vec<u64>, Vec<u64>) {
        let words = self.store.words_per_code();
        let mut mask = vec![0u64; words];
        let mut value = vec![0u64; words];
        for e in self.principal.entries() {
            mask[e.position / 64] |= 1 << (e.position % 64);
            if e.state {
                value[e.position / 64] |= 1 << (e.position % 64);
            }
        }
        (mask, value)
    }

    pub fn contains(&self, instance: usize) -> bool {
        let (mask, value) = self.mask_and_value();
        matches(self.store.code_words(instance), &mask, &value)
    }

    /// Every instance whose configuration matches the principal configuration exactly on
    /// the selected neurons, ascending.
    pub fn members(&self) -> Vec<usize> {
        let (mask, value) = self.mask_and_value();
        (0..self.store.num_instances())
            .into_par_iter()
            .filter(|&i| matches(self.store.code_words(i), &mask, &value))
            .collect()
    }
}

#[inline]
fn matches(code: &[u64], mask: &[u64], value: &[u64]) -> bool {
    code.iter().zip(mask).zip(value).all(|((c, m), v)| c & m == *v)
}

/// Free-function form of [`RelaxedDecisionRegion::members`].
pub fn members(region: &RelaxedDecisionRegion) -> Vec<usize> {
    region.members()
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};

    use super::*;
    use crate::config::{Configuration, NeuronSet};
    use crate::error::Error;
    use crate::store::{LayerShape, LayerSpec, Metadata};

    fn store_from(codes: Vec<Configuration>) -> Arc<ConfigurationStore> {
        let set = NeuronSet::new(vec![LayerSpec::new(1, "l", LayerShape::Flat(codes[0].len()))]).unwrap();
        let n = codes.len();
        Arc::new(ConfigurationStore::from_codes(set, &codes, Metadata::anonymous(n)).unwrap())
    }

    fn random_store(seed: u64, n: usize, bits: usize) -> Arc<ConfigurationStore> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        store_from(
            (0..n)
                .map(|_| Configuration::from_bits((0..bits).map(|_| rng.gen_bool(0.5))))
                .collect(),
        )
    }

    /// Exhaustive membership: compare each configuration bit-by-bit with the principal.
    fn scan_members(region: &RelaxedDecisionRegion) -> Vec<usize> {
        let store = region.store();
        (0..store.num_instances())
            .filter(|&i| {
                let c = store.configuration(i);
                region.principal().entries().iter().all(|e| c.get(e.position) == e.state)
            })
            .collect()
    }

    #[test]
    fn members_cover_positive_set() {
        let store = random_store(5, 300, 40);
        for target in [0, 50, 299] {
            let region = build_rdr(&store, target, 4, 3, NegativePolicy::Rest).unwrap();
            let members = region.members();
            assert_eq!(members, scan_members(&region));
            assert!(region.sets().positive.iter().all(|p| members.contains(p)));
            assert!(region.contains(target));
        }
    }

    #[test]
    fn minimal_region_uses_top_neuron() {
        let store = random_store(8, 50, 12);
        let region = build_rdr(&store, 4, 1, 1, NegativePolicy::Rest).unwrap();
        assert_eq!(region.t(), 1);
        let e = region.principal().entries()[0];
        let code = store.configuration(4);
        assert_eq!(e.state, code.get(e.position));
        // all neurons are candidates with |S| = 1; the chosen one has the largest score
        let best = (0..12).map(|i| region.profile().score(i)).max().unwrap();
        assert_eq!(e.score, best);
        let expected: Vec<usize> = (0..50).filter(|&i| store.bit(i, e.position) == e.state).collect();
        assert_eq!(region.members(), expected);
    }

    #[test]
    fn planted_signature_is_recovered() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        // neurons 0..3 carry the signature 101 for instances 0..6 only; neurons 3..9 never vary
        let codes: Vec<Configuration> = (0..60)
            .map(|i| {
                let signature = if i < 6 {
                    [true, false, true]
                } else {
                    loop {
                        let s = [rng.gen_bool(0.5), rng.gen_bool(0.5), rng.gen_bool(0.5)];
                        if s != [true, false, true] {
                            break s;
                        }
                    }
                };
                Configuration::from_bits(signature.into_iter().chain(std::iter::repeat_n(false, 6)))
            })
            .collect();
        let store = store_from(codes);
        let region = build_rdr(&store, 0, 6, 3, NegativePolicy::Rest).unwrap();
        assert_eq!(region.principal().position_set(), vec![0, 1, 2]);
        assert_eq!(region.members(), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn strict_match_excludes_one_bit_difference() {
        let codes = ["1100", "1100", "1101", "0100", "0011"]
            .iter()
            .map(|c| Configuration::parse(c).unwrap())
            .collect();
        let store = store_from(codes);
        let region = build_rdr(&store, 0, 2, 4, NegativePolicy::Rest).unwrap();
        assert_eq!(region.members(), vec![0, 1]);
        assert!(!region.contains(2));
    }

    #[test]
    fn insufficient_candidates_reports_count() {
        let codes = ["0000", "1111", "0101"].iter().map(|c| Configuration::parse(c).unwrap()).collect();
        let store = store_from(codes);
        // S = {0, 2} (distance 2) agrees on neurons 0 and 2
        let err = build_rdr(&store, 0, 2, 3, NegativePolicy::Rest).unwrap_err();
        assert!(matches!(err, Error::InsufficientCandidates { available: 2, requested: 3 }));
    }

    #[test]
    fn nested_in_t() {
        let store = random_store(9, 400, 64);
        for target in [1, 77, 300] {
            let small = build_rdr(&store, target, 5, 3, NegativePolicy::Rest).unwrap().members();
            let large = build_rdr(&store, target, 5, 8, NegativePolicy::Rest).unwrap().members();
            assert!(large.iter().all(|m| small.contains(m)));
        }
    }
}
