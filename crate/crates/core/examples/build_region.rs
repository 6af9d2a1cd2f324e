//! Build a relaxed decision region for one instance and print its principal neurons.

use std::sync::Arc;

use rdr::config::{binarize, NeuronSet};
use rdr::refnet::{activation_dataset, sample_inputs, teacher_labels, RefNet};
use rdr::region::{build_rdr, NegativePolicy, RegionReport};

fn main() -> rdr::Result<()> {
    let net = RefNet::default_seeded(1);
    let inputs = sample_inputs(2000, net.input_dim(), 1);
    let labels = teacher_labels(&inputs, net.output_dim(), 1);
    let dataset = activation_dataset(&net, &inputs, Some(labels))?;
    let set = NeuronSet::from_dataset(&dataset, &[2, 3, 4, 5])?;
    let store = Arc::new(binarize(&dataset, &set)?);

    let region = build_rdr(&store, 0, 8, 10, NegativePolicy::Rest)?;
    println!("{} unanimous candidates", region.candidate_count());
    for (neuron, state) in region.selected_neurons() {
        println!("  {neuron} = {}", state as u8);
    }
    let members = region.members();
    println!("{} members (positive set had {})", members.len(), region.sets().positive.len());

    // fewer principal neurons never shrink the region
    for t in [10, 6, 3, 1] {
        println!("t={t:>2}: {} members", region.truncated(t).members().len());
    }
    println!("{}", serde_json::to_string_pretty(&RegionReport::new(&region))?);
    Ok(())
}
