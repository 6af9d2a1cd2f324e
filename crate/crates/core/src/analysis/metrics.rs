use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Subclass coherence of a group of instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupEvaluation {
    /// Fraction of members sharing the target's subclass.
    pub purity: f64,
    /// Shannon entropy (natural log) of the members' subclass distribution.
    pub entropy: f64,
    pub group_size: usize,
    pub target_subclass: u32,
    pub subclass_distribution: BTreeMap<u32, f64>,
}

/// Purity and entropy of a list of member subclasses against `target_subclass`.
pub fn evaluate_labels(group: &[u32], target_subclass: u32) -> Result<GroupEvaluation> {
    if group.is_empty() {
        return Err(Error::degenerate("cannot evaluate an empty group"));
    }
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &y in group {
        *counts.entry(y).or_default() += 1;
    }
    let size = group.len() as f64;
    let distribution: BTreeMap<u32, f64> = counts.iter().map(|(&y, &c)| (y, c as f64 / size)).collect();
    let entropy = distribution.values().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum::<f64>();
    Ok(GroupEvaluation {
        purity: counts.get(&target_subclass).copied().unwrap_or(0) as f64 / size,
        // a single-subclass group has entropy exactly 0, not -0
        entropy: if counts.len() == 1 { 0.0 } else { entropy },
        group_size: group.len(),
        target_subclass,
        subclass_distribution: distribution,
    })
}

/// Evaluates `members` using per-instance subclass labels; the reference subclass is the
/// target's.
pub fn evaluate_group(members: &[usize], subclass_labels: Option<&[u32]>, target: usize) -> Result<GroupEvaluation> {
    let labels = subclass_labels.ok_or_else(|| Error::query("group evaluation needs subclass labels"))?;
    let lookup = |i: usize| {
        labels
            .get(i)
            .copied()
            .ok_or_else(|| Error::query(format!("no subclass label for instance {i}")))
    };
    let target_subclass = lookup(target)?;
    let group = members.iter().map(|&i| lookup(i)).collect::<Result<Vec<_>>>()?;
    evaluate_labels(&group, target_subclass)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn purity_by_hand() {
        // a = 0, b = 1
        let e = evaluate_labels(&[0, 0, 1, 0], 0).unwrap();
        assert_eq!(e.purity, 0.75);
        let expected = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert!((e.entropy - expected).abs() < 1e-12);
    }

    #[test]
    fn point_mass_and_uniform_pair() {
        let e = evaluate_labels(&[3, 3, 3], 3).unwrap();
        assert_eq!((e.purity, e.entropy), (1.0, 0.0));
        let e = evaluate_labels(&[0, 0, 1, 1], 0).unwrap();
        assert!((e.entropy - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(evaluate_labels(&[], 0), Err(Error::DegenerateInput(_))));
        assert!(matches!(evaluate_group(&[0], None, 0), Err(Error::Query(_))));
        assert!(matches!(evaluate_group(&[5], Some(&[0, 1]), 0), Err(Error::Query(_))));
        let e = evaluate_group(&[0, 1, 2], Some(&[4, 4, 5]), 2).unwrap();
        assert!((e.purity - 1.0 / 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn bounds_and_permutation_invariance(mut group in proptest::collection::vec(0u32..5, 1..40), target in 0u32..5) {
            let e = evaluate_labels(&group, target).unwrap();
            prop_assert!((0.0..=1.0).contains(&e.purity));
            prop_assert!(e.entropy >= 0.0);
            prop_assert!((e.subclass_distribution.values().sum::<f64>() - 1.0).abs() < 1e-12);
            let single = group.iter().all(|&y| y == group[0]);
            prop_assert_eq!(e.entropy == 0.0, single);
            group.reverse();
            let half = group.len() / 2;
            group.rotate_left(half);
            let f = evaluate_labels(&group, target).unwrap();
            prop_assert_eq!(e.purity, f.purity);
            prop_assert!((e.entropy - f.entropy).abs() < 1e-12);
        }
    }
}
