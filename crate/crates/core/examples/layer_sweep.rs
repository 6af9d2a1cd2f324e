//! One region per hidden layer of the reference network for the same target.

use rdr::analysis::layer_sweep;
use rdr::refnet::{activation_dataset, sample_inputs, teacher_labels, RefNet};
use rdr::region::NegativePolicy;

fn main() -> rdr::Result<()> {
    let net = RefNet::default_seeded(2);
    let inputs = sample_inputs(2000, net.input_dim(), 2);
    let labels = teacher_labels(&inputs, net.output_dim(), 2);
    let dataset = activation_dataset(&net, &inputs, Some(labels))?;
    let sweep = layer_sweep(&dataset, 10, &[1, 2, 3, 4, 5], 8, 5, NegativePolicy::Rest)?;
    println!("layer  members  objective");
    for (layer, region) in &sweep {
        println!("{layer:>5}  {:>7}  {:>9.4}", region.members().len(), region.principal().objective().value());
    }
    Ok(())
}
