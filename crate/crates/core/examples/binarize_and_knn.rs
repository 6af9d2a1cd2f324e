//! Export a reference-network dump, binarize it, and compare neighbor lists under the
//! configuration, euclidean and cosine metrics.

use rdr::config::{binarize, config_distances, knn, Metric, NeuronSet};
use rdr::refnet::{export_activations, sample_inputs, teacher_labels, RefNet};
use rdr::store::ingest;

fn main() -> rdr::Result<()> {
    let dir = std::env::temp_dir().join("rdr-example-knn");
    let net = RefNet::default_seeded(0);
    let inputs = sample_inputs(1000, net.input_dim(), 0);
    let labels = teacher_labels(&inputs, net.output_dim(), 0);
    export_activations(&net, &inputs, Some(labels), &dir)?;

    let dataset = ingest(&dir)?;
    let set = NeuronSet::from_dataset(&dataset, &[3, 4, 5])?;
    let store = binarize(&dataset, &set)?;
    println!("{} instances, {} bits per configuration", store.num_instances(), store.code_len());

    let target = 42;
    let config = config_distances(&store, target)?;
    for metric in [Metric::Configuration, Metric::Euclidean, Metric::Cosine] {
        let neighbors = knn(&store, Some(&dataset), target, 5, metric, Some(5))?;
        println!("{metric}:");
        for n in neighbors {
            // parenthesized: configuration distance, for comparison across metrics
            println!("  {:>5}  {:>10.4}  ({})", n.index, n.distance, config[n.index]);
        }
    }
    Ok(())
}
