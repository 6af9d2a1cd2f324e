use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::region::RelaxedDecisionRegion;
use crate::store::{ActivationDataset, LayerId, LayerShape};

/// How selected channels are combined into one map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Unweighted mean over selected channels.
    #[default]
    Mean,
    /// Channels weighted by the summed selection scores of their principal neurons.
    ScoreWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChannelCount {
    pub channel: usize,
    pub neurons: usize,
}

/// Aggregated activation map of one instance, min-max normalized to `[0, 1]`
/// (all zeros when the map is constant). Row-major `height x width`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivationMap {
    pub instance: usize,
    pub instance_id: String,
    pub height: usize,
    pub width: usize,
    pub values: Vec<f64>,
}

impl ActivationMap {
    /// Binary portable graymap (P5, maxval 255).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.values.iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizationReport {
    pub layer: LayerId,
    pub aggregation: Aggregation,
    pub channels: Vec<ChannelCount>,
    pub maps: Vec<ActivationMap>,
}

impl LocalizationReport {
    /// Writes one `<instance_id>.pgm` per map into `dir`.
    pub fn write_pgms(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        for map in &self.maps {
            let name: String = map
                .instance_id
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
                .collect();
            fs::write(dir.join(format!("{name}.pgm")), map.to_pgm())?;
        }
        Ok(())
    }
}

pub(crate) fn min_max_normalize(values: &mut [f64]) {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi > lo {
        values.iter_mut().for_each(|v| *v = (*v - lo) / (hi - lo));
    } else {
        values.iter_mut().for_each(|v| *v = 0.0);
    }
}

/// Groups the region's principal neurons in conv layer `layer` by channel and builds the
/// aggregated activation map of every member.
pub fn localize(
    region: &RelaxedDecisionRegion,
    dataset: &ActivationDataset,
    layer: LayerId,
    aggregation: Aggregation,
) -> Result<LocalizationReport> {
    let spec = dataset.layer(layer)?;
    let (channels, height, width) = match spec.shape {
        LayerShape::Conv {
            channels,
            height,
            width,
        } => (channels, height, width),
        LayerShape::Flat(_) => return Err(Error::query(format!("layer {layer} is not a conv layer"))),
    };
    let mut weights: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    let set = region.store().neuron_set();
    for entry in region.principal().entries() {
        let neuron = set.neuron(entry.position);
        if neuron.layer != layer {
            continue;
        }
        let (c, _, _) = spec.shape.unflatten(neuron.index).expect("index within layer");
        let slot = weights.entry(c).or_default();
        slot.0 += 1;
        slot.1 += entry.score.value();
    }
    if weights.is_empty() {
        return Err(Error::degenerate(format!("no principal neurons in conv layer {layer}")));
    }
    debug_assert!(weights.keys().all(|&c| c < channels));

    let acts = dataset.activations(layer)?;
    let plane = height * width;
    let total_weight: f64 = match aggregation {
        Aggregation::Mean => weights.len() as f64,
        Aggregation::ScoreWeighted => weights.values().map(|w| w.1).sum(),
    };
    let maps = region
        .members()
        .into_iter()
        .map(|i| {
            let row = acts.row(i);
            let mut values = vec![0.0; plane];
            for (&c, &(_, score)) in &weights {
                let w = match aggregation {
                    Aggregation::Mean => 1.0,
                    Aggregation::ScoreWeighted => score,
                };
                for (p, v) in values.iter_mut().enumerate() {
                    *v += w * row[c * plane + p] as f64;
                }
            }
            if total_weight > 0.0 {
                values.iter_mut().for_each(|v| *v /= total_weight);
            }
            min_max_normalize(&mut values);
            ActivationMap {
                instance: i,
                instance_id: dataset.meta().instance_ids[i].clone(),
                height,
                width,
                values,
            }
        })
        .collect();
    Ok(LocalizationReport {
        layer,
        aggregation,
        channels: weights
            .into_iter()
            .map(|(channel, (neurons, _))| ChannelCount { channel, neurons })
            .collect(),
        maps,
    })
}
