//! Inputs sharing every activation state above a layer share the same affine map to the
//! logits; the map difference grows with configuration distance.

use rdr::analysis::spearman;
use rdr::refnet::{affine_map_at, mapping_difference, sample_inputs, RefNet};

fn main() -> rdr::Result<()> {
    let net = RefNet::default_seeded(0);
    let l = 2;
    let inputs = sample_inputs(400, net.input_dim(), 5);
    let rows: Vec<Vec<f64>> = inputs.outer_iter().map(|r| r.to_vec()).collect();

    let x = &rows[0];
    let map = affine_map_at(&net, x, l)?;
    let features = net.features(x, l)?;
    let err = (&map.apply(features.as_slice().unwrap()) - &net.logits(x)?)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    println!("reconstruction error {err:.2e}");

    let nudged: Vec<f64> = x.iter().map(|v| v + 1e-9).collect();
    let same = net.configuration_above(l, features.as_slice().unwrap())?
        == net.configuration_above(l, net.features(&nudged, l)?.as_slice().unwrap())?;
    println!("nudged input keeps configuration: {same}, mapping difference {:.2e}", mapping_difference(&net, x, &nudged, l)?);

    let mut config = Vec::new();
    let mut diff = Vec::new();
    for pair in rows.chunks_exact(2) {
        let ca = net.configuration_above(l, net.features(&pair[0], l)?.as_slice().unwrap())?;
        let cb = net.configuration_above(l, net.features(&pair[1], l)?.as_slice().unwrap())?;
        config.push(ca.distance(&cb)? as f64);
        diff.push(mapping_difference(&net, &pair[0], &pair[1], l)?);
    }
    println!("spearman(configuration distance, mapping difference) = {:.3}", spearman(&config, &diff));
    Ok(())
}
