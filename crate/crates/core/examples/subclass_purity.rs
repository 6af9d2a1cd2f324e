//! Regions on a synthetic dataset with four planted subclasses versus k-NN and random groups.

use std::sync::Arc;

use rdr::analysis::{group_benchmark, BenchmarkParams};
use rdr::config::{binarize, NeuronSet};
use rdr::synth::{subclass_dataset, SubclassSpec};

fn main() -> rdr::Result<()> {
    let data = subclass_dataset(&SubclassSpec::default(), 0)?;
    let set = NeuronSet::all(&data.dataset)?;
    let store = Arc::new(binarize(&data.dataset, &set)?);
    let params = BenchmarkParams {
        t: 3,
        ..BenchmarkParams::default()
    };
    let bench = group_benchmark(&store, &params)?;
    println!("method   purity  entropy");
    for (name, m) in [("rdr", bench.rdr), ("knn", bench.knn), ("random", bench.random)] {
        println!("{name:<8} {:.4}  {:.4}", m.mean_purity, m.mean_entropy);
    }
    Ok(())
}
