//! Trace neuron boundaries across a 2-D slice through three instances' layer features.

use rdr::refnet::{plane_slice, sample_inputs, RefNet};

fn main() -> rdr::Result<()> {
    let net = RefNet::default_seeded(0);
    let inputs = sample_inputs(3, net.input_dim(), 9);
    let rows: Vec<Vec<f64>> = inputs.outer_iter().map(|r| r.to_vec()).collect();
    let slice = plane_slice(&net, [&rows[0], &rows[1], &rows[2]], 1, 80, 12, 0)?;
    println!("{} segments over {} traced neurons", slice.segments.len(), slice.neurons.len());
    let path = std::env::temp_dir().join("rdr-plane.csv");
    std::fs::write(&path, slice.to_csv())?;
    println!("wrote {}", path.display());
    Ok(())
}
