use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::region::{brute_force_select, greedy_select, FrequencyProfile, Objective};

/// One greedy-versus-exhaustive comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleCase {
    pub candidates: usize,
    pub t: usize,
    pub greedy: Objective,
    pub brute_force: Objective,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleSuite {
    pub trials: usize,
    pub mismatches: usize,
    pub cases: Vec<OracleCase>,
}

/// Random profile over `n` neurons with arbitrary (not necessarily unanimous) counts.
pub fn random_profile(rng: &mut ChaCha8Rng, n: usize) -> FrequencyProfile {
    let pt = rng.gen_range(1..=16u32);
    let nt = rng.gen_range(1..=48u32);
    let pos = (0..n).map(|_| rng.gen_range(0..=pt)).collect();
    let neg = (0..n).map(|_| rng.gen_range(0..=nt)).collect();
    FrequencyProfile::from_counts(pos, pt, neg, nt).expect("counts within totals")
}

/// Compares greedy selection with exhaustive search on `trials` random profiles,
/// `5..=20` candidates and `t` in `1..=5`. Objectives are compared as exact integers.
pub fn greedy_oracle_suite(trials: usize, seed: u64) -> Result<OracleSuite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(trials);
    for _ in 0..trials {
        let n = rng.gen_range(5..=20usize);
        let t = rng.gen_range(1..=5usize);
        let profile = random_profile(&mut rng, n);
        let candidates: Vec<usize> = (0..n).collect();
        let greedy = greedy_select(&profile, &candidates, t)?.objective();
        let brute_force = brute_force_select(&profile, &candidates, t)?.objective();
        cases.push(OracleCase {
            candidates: n,
            t,
            greedy,
            brute_force,
        });
    }
    Ok(OracleSuite {
        trials,
        mismatches: cases.iter().filter(|c| c.greedy != c.brute_force).count(),
        cases,
    })
}
