//! Principal-configuration selection.
//!
//! The objective separates over neurons: choosing neuron `i` at its preferred state
//! contributes `-|c̄_i - c̄_neg,i|`, so the `t` largest scores form an optimal set.
//! [`greedy_select`] picks them one at a time; [`brute_force_select`] enumerates every
//! `t`-subset and every state assignment and serves as the reference.

use itertools::Itertools;
use serde::Serialize;

use super::profile::{FrequencyProfile, Objective, Score};
use crate::error::{Error, Result};

/// Candidate count above which [`brute_force_select`] refuses to run.
pub const BRUTE_FORCE_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrincipalEntry {
    /// Canonical position in the store's neuron set.
    pub position: usize,
    pub state: bool,
    pub score: Score,
}

/// Selected neurons with their required states, in selection order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrincipalConfiguration {
    entries: Vec<PrincipalEntry>,
    objective: Objective,
}

impl PrincipalConfiguration {
    pub fn entries(&self) -> &[PrincipalEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn positions(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.position).collect()
    }

    /// Selected positions in ascending order.
    pub fn position_set(&self) -> Vec<usize> {
        let mut p = self.positions();
        p.sort_unstable();
        p
    }

    pub fn scores(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.score.value()).collect()
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    /// First `len` entries, as a principal configuration of their own.
    pub fn prefix(&self, len: usize, profile: &FrequencyProfile) -> PrincipalConfiguration {
        let entries = self.entries[..len.min(self.entries.len())].to_vec();
        let objective = profile.objective(&entries.iter().map(|e| (e.position, e.state)).collect::<Vec<_>>());
        PrincipalConfiguration { entries, objective }
    }
}

fn check_request(candidates: &[usize], t: usize, profile: &FrequencyProfile) -> Result<()> {
    if t == 0 {
        return Err(Error::query("t must be at least 1"));
    }
    if let Some(&bad) = candidates.iter().find(|&&c| c >= profile.len()) {
        return Err(Error::query(format!("candidate {bad} outside the profile")));
    }
    if !candidates.iter().all_unique() {
        return Err(Error::query("candidate neurons must be distinct"));
    }
    if t > candidates.len() {
        return Err(Error::InsufficientCandidates {
            available: candidates.len(),
            requested: t,
        });
    }
    Ok(())
}

/// Selects `t` candidates by repeatedly taking the largest remaining score; ties go to the
/// lowest canonical position.
pub fn greedy_select(profile: &FrequencyProfile, candidates: &[usize], t: usize) -> Result<PrincipalConfiguration> {
    check_request(candidates, t, profile)?;
    let mut remaining: Vec<usize> = candidates.to_vec();
    remaining.sort_unstable();
    let mut entries = Vec::with_capacity(t);
    for _ in 0..t {
        let mut best = 0;
        for slot in 1..remaining.len() {
            if profile.score(remaining[slot]) > profile.score(remaining[best]) {
                best = slot;
            }
        }
        let position = remaining.remove(best);
        entries.push(PrincipalEntry {
            position,
            state: profile.preferred_state(position),
            score: profile.score(position),
        });
    }
    let selection: Vec<(usize, bool)> = entries.iter().map(|e| (e.position, e.state)).collect();
    Ok(PrincipalConfiguration {
        objective: profile.objective(&selection),
        entries,
    })
}

/// Exhaustive minimizer over all `t`-subsets of `candidates` and all `2^t` state vectors.
/// Returns the first minimizer in lexicographic subset order, entries sorted by
/// descending score.
pub fn brute_force_select(
    profile: &FrequencyProfile,
    candidates: &[usize],
    t: usize,
) -> Result<PrincipalConfiguration> {
    if candidates.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::query(format!(
            "brute force limited to {BRUTE_FORCE_LIMIT} candidates, got {}",
            candidates.len()
        )));
    }
    check_request(candidates, t, profile)?;
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();

    let mut best: Option<(Objective, Vec<(usize, bool)>)> = None;
    let mut selection = vec![(0usize, false); t];
    for subset in sorted.iter().copied().combinations(t) {
        for states in 0u32..(1 << t) {
            for (slot, &pos) in subset.iter().enumerate() {
                selection[slot] = (pos, states >> slot & 1 == 1);
            }
            let value = profile.objective(&selection);
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, selection.clone()));
            }
        }
    }
    let (objective, chosen) = best.expect("at least one subset");
    let mut entries: Vec<PrincipalEntry> = chosen
        .into_iter()
        .map(|(position, state)| PrincipalEntry {
            position,
            state,
            score: profile.score(position),
        })
        .collect();
    entries.sort_by(|a, b| b.score.cmp(&a.score).then(a.position.cmp(&b.position)));
    Ok(PrincipalConfiguration { entries, objective })
}
