//! Region of a misclassified instance against its true class; the planted neuron that
//! drives the confusion shows up among the principal neurons.

use std::sync::Arc;

use rdr::analysis::misclassification_report;
use rdr::config::{binarize, NeuronSet};
use rdr::synth::{spurious_dataset, SpuriousSpec};

fn main() -> rdr::Result<()> {
    let data = spurious_dataset(&SpuriousSpec::default(), 4)?;
    let set = NeuronSet::all(&data.dataset)?;
    let store = Arc::new(binarize(&data.dataset, &set)?);
    let target = data.misclassified[0];
    let report = misclassification_report(&data.dataset, &store, target, 8, 5)?;

    println!("planted neuron {}", data.spurious);
    for (neuron, state) in report.region.selected_neurons() {
        let mark = if neuron == data.spurious { "  <- planted" } else { "" };
        println!("  {neuron} = {}{mark}", state as u8);
    }
    println!("members by true label: {:?}", report.class_ratio.counts);
    if let Some(loc) = &report.localization {
        for c in &loc.channels {
            println!("channel {} holds {} principal neurons", c.channel, c.neurons);
        }
        let dir = std::env::temp_dir().join("rdr-maps");
        loc.write_pgms(&dir)?;
        println!("{} maps in {}", loc.maps.len(), dir.display());
    }
    Ok(())
}
