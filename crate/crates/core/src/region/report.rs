use serde::Serialize;

use super::rdr::RelaxedDecisionRegion;
use crate::store::LayerId;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectedNeuron {
    pub layer: LayerId,
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<usize>,
    pub state: u8,
    pub score: f64,
}

/// JSON form of a region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub target: String,
    pub target_index: usize,
    pub layers: Vec<LayerId>,
    pub k: usize,
    pub t: usize,
    pub negative_policy: String,
    pub candidate_count: usize,
    pub objective: f64,
    pub selected: Vec<SelectedNeuron>,
    pub positive: Vec<String>,
    pub member_count: usize,
    pub members: Vec<String>,
}

impl RegionReport {
    pub fn new(region: &RelaxedDecisionRegion) -> Self {
        let store = region.store();
        let set = store.neuron_set();
        let selected = region
            .principal()
            .entries()
            .iter()
            .map(|e| {
                let neuron = set.neuron(e.position);
                let coords = set.layer(neuron.layer).and_then(|s| s.shape.unflatten(neuron.index));
                SelectedNeuron {
                    layer: neuron.layer,
                    index: neuron.index,
                    channel: coords.map(|c| c.0),
                    y: coords.map(|c| c.1),
                    x: coords.map(|c| c.2),
                    state: e.state as u8,
                    score: e.score.value(),
                }
            })
            .collect();
        let members = region.members();
        RegionReport {
            target: store.instance_id(region.target()).to_string(),
            target_index: region.target(),
            layers: set.layer_ids(),
            k: region.k(),
            t: region.t(),
            negative_policy: region.policy().to_string(),
            candidate_count: region.candidate_count(),
            objective: region.principal().objective().value(),
            selected,
            positive: region.sets().positive.iter().map(|&i| store.instance_id(i).to_string()).collect(),
            member_count: members.len(),
            members: members.iter().map(|&i| store.instance_id(i).to_string()).collect(),
        }
    }
}
