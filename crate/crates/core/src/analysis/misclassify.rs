use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::localize::{localize, Aggregation, LocalizationReport};
use crate::config::ConfigurationStore;
use crate::error::{Error, Result};
use crate::region::{build_rdr, NegativePolicy, RelaxedDecisionRegion};
use crate::store::ActivationDataset;

/// Member count per true class label inside a region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassRatioReport {
    pub counts: BTreeMap<u32, usize>,
}

impl ClassRatioReport {
    pub fn new(members: &[usize], labels: &[u32]) -> Self {
        let mut counts = BTreeMap::new();
        for &m in members {
            *counts.entry(labels[m]).or_default() += 1;
        }
        ClassRatioReport { counts }
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

#[derive(Debug, Clone)]
pub struct MisclassificationReport {
    pub region: RelaxedDecisionRegion,
    pub class_ratio: ClassRatioReport,
    /// Present when principal neurons fall in a conv layer (the first such layer).
    pub localization: Option<LocalizationReport>,
}

/// Region for a misclassified target contrasted against instances of its true class.
pub fn misclassification_report(
    dataset: &ActivationDataset,
    store: &Arc<ConfigurationStore>,
    target: usize,
    k: usize,
    t: usize,
) -> Result<MisclassificationReport> {
    let meta = dataset.meta();
    let (labels, predictions) = match (&meta.labels, &meta.predictions) {
        (Some(l), Some(p)) => (l, p),
        _ => return Err(Error::query("misclassification analysis needs label and prediction columns")),
    };
    if target >= dataset.num_instances() {
        return Err(Error::query(format!("instance {target} out of range")));
    }
    if labels[target] == predictions[target] {
        return Err(Error::query(format!(
            "instance {:?} is correctly classified",
            meta.instance_ids[target]
        )));
    }
    let region = build_rdr(store, target, k, t, NegativePolicy::SameTrueLabel(labels[target]))?;
    let class_ratio = ClassRatioReport::new(&region.members(), labels);

    let set = store.neuron_set();
    let conv_layer = region
        .principal()
        .entries()
        .iter()
        .map(|e| set.neuron(e.position).layer)
        .find(|&l| set.layer(l).is_some_and(|s| s.shape.is_conv()));
    let localization = conv_layer
        .map(|layer| localize(&region, dataset, layer, Aggregation::Mean))
        .transpose()?;
    Ok(MisclassificationReport {
        region,
        class_ratio,
        localization,
    })
}
