//! One line per acceptance criterion; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdr::analysis::{greedy_oracle_suite, group_benchmark, misclassification_report, spearman, BenchmarkParams};
use rdr::config::{binarize, Configuration, ConfigurationStore, NeuronSet};
use rdr::refnet::{
    affine_map_at, export_activations, mapping_difference, sample_inputs, teacher_labels, RefNet,
};
use rdr::region::{build_rdr, NegativePolicy};
use rdr::store::{ingest, ActivationDataset};
use rdr::synth::{spurious_dataset, subclass_dataset, SpuriousSpec, SubclassSpec};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let note = format!("{:.2}s, limit {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64());
    match out {
        Ok(d) if elapsed <= limit => Ok(format!("{d}; {note}")),
        Ok(d) => Err(format!("{d}; too slow: {note}")),
        Err(d) => Err(format!("{d}; {note}")),
    }
}

fn greedy_optimality() -> Outcome {
    timed(Duration::from_secs(10), || {
        let suite = greedy_oracle_suite(200, 20_240).map_err(|e| e.to_string())?;
        let sizes_ok = suite.cases.iter().all(|c| (5..=20).contains(&c.candidates) && (1..=5).contains(&c.t));
        check(
            suite.mismatches == 0 && sizes_ok,
            format!("{} mismatches over {} profiles", suite.mismatches, suite.trials),
        )
    })
}

fn hamming_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=4096);
        let a: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let b: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let naive = a.iter().zip(&b).filter(|(x, y)| x != y).count() as u32;
        let packed = Configuration::from_bits(a.iter().copied())
            .distance(&Configuration::from_bits(b.iter().copied()))
            .map_err(|e| e.to_string())?;
        mismatches += (naive != packed) as usize;
    }
    check(mismatches == 0, format!("{mismatches} mismatches over 1000 pairs"))
}

fn metric_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=256);
        // correlated triples make the triangle inequality tight more often
        let a: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let b: Vec<bool> = a.iter().map(|&x| x ^ rng.gen_bool(0.2)).collect();
        let c: Vec<bool> = b.iter().map(|&x| x ^ rng.gen_bool(0.2)).collect();
        let [a, b, c] = [a, b, c].map(Configuration::from_bits);
        let d = |x: &Configuration, y: &Configuration| x.distance(y).unwrap();
        let ok = d(&a, &a) == 0
            && d(&b, &b) == 0
            && d(&a, &b) == d(&b, &a)
            && d(&b, &c) == d(&c, &b)
            && d(&a, &c) <= d(&a, &b) + d(&b, &c)
            && d(&a, &b) <= d(&a, &c) + d(&c, &b);
        violations += !ok as usize;
    }
    check(violations == 0, format!("{violations} violations over 10000 triples"))
}

fn refnet_dump() -> Result<(tempfile::TempDir, ActivationDataset), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let net = RefNet::default_seeded(0);
    let inputs = sample_inputs(2000, net.input_dim(), 0);
    let labels = teacher_labels(&inputs, net.output_dim(), 0);
    export_activations(&net, &inputs, Some(labels), dir.path()).map_err(|e| e.to_string())?;
    let ds = ingest(dir.path()).map_err(|e| e.to_string())?;
    Ok((dir, ds))
}

fn full_store(ds: &ActivationDataset) -> Arc<ConfigurationStore> {
    Arc::new(binarize(ds, &NeuronSet::all(ds).unwrap()).unwrap())
}

fn coverage_and_nestedness(ds: &ActivationDataset) -> Outcome {
    let store = full_store(ds);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let targets = sample(&mut rng, ds.num_instances(), 100).into_vec();
    let (mut uncovered, mut not_nested) = (0, 0);
    for &target in &targets {
        let wide = build_rdr(&store, target, 8, 9, NegativePolicy::Rest).map_err(|e| e.to_string())?;
        let narrow = build_rdr(&store, target, 8, 15, NegativePolicy::Rest).map_err(|e| e.to_string())?;
        let wide_members: BTreeSet<usize> = wide.members().into_iter().collect();
        let narrow_members: BTreeSet<usize> = narrow.members().into_iter().collect();
        if !narrow.sets().positive.iter().all(|p| narrow_members.contains(p))
            || !wide.sets().positive.iter().all(|p| wide_members.contains(p))
        {
            uncovered += 1;
        }
        if !narrow_members.is_subset(&wide_members) {
            not_nested += 1;
        }
    }
    check(
        uncovered == 0 && not_nested == 0,
        format!("{uncovered} coverage failures, {not_nested} nesting failures over 100 targets (layers 1-5, 2000 instances)"),
    )
}

fn same_configuration_same_map() -> Outcome {
    let net = RefNet::default_seeded(0);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let inputs = sample_inputs(400, net.input_dim(), 4);
    let (mut pairs, mut worst_diff, mut worst_recon) = (0, 0.0f64, 0.0f64);
    for row in inputs.outer_iter() {
        if pairs == 50 {
            break;
        }
        let a = row.to_vec();
        let l = rng.gen_range(0..net.depth());
        let fa = net.features(&a, l).map_err(|e| e.to_string())?;
        let ca = net.configuration_above(l, fa.as_slice().unwrap()).map_err(|e| e.to_string())?;
        // shrink a random perturbation until the configuration above l is unchanged
        let dir: Vec<f64> = (0..a.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut scale = 0.1;
        let b = loop {
            let b: Vec<f64> = a.iter().zip(&dir).map(|(x, d)| x + scale * d).collect();
            let fb = net.features(&b, l).map_err(|e| e.to_string())?;
            if net.configuration_above(l, fb.as_slice().unwrap()).map_err(|e| e.to_string())? == ca {
                break Some(b);
            }
            scale /= 2.0;
            if scale < 1e-12 {
                break None;
            }
        };
        let Some(b) = b else { continue };
        pairs += 1;
        worst_diff = worst_diff.max(mapping_difference(&net, &a, &b, l).map_err(|e| e.to_string())?);
        for x in [&a, &b] {
            let map = affine_map_at(&net, x, l).map_err(|e| e.to_string())?;
            let f = net.features(x, l).map_err(|e| e.to_string())?;
            let logits = net.logits(x).map_err(|e| e.to_string())?;
            let err = (&map.apply(f.as_slice().unwrap()) - &logits).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            worst_recon = worst_recon.max(err);
        }
    }
    check(
        pairs == 50 && worst_diff < 1e-6 && worst_recon < 1e-5,
        format!("{pairs} pairs, max mapping difference {worst_diff:.2e}, max reconstruction error {worst_recon:.2e}"),
    )
}

fn distance_tracks_mapping() -> Outcome {
    let net = RefNet::default_seeded(0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let l = 1;
    let (mut config, mut diff) = (Vec::new(), Vec::new());
    for _ in 0..200 {
        let a: Vec<f64> = (0..net.input_dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let scale = 10f64.powf(rng.gen_range(-3.0..0.5));
        let b: Vec<f64> = a.iter().map(|x| x + scale * rng.gen_range(-1.0..1.0)).collect();
        let ca = net.configuration_above(l, net.features(&a, l).unwrap().as_slice().unwrap()).unwrap();
        let cb = net.configuration_above(l, net.features(&b, l).unwrap().as_slice().unwrap()).unwrap();
        config.push(ca.distance(&cb).unwrap() as f64);
        diff.push(mapping_difference(&net, &a, &b, l).map_err(|e| e.to_string())?);
    }
    let rho = spearman(&config, &diff);
    check(rho > 0.0, format!("spearman {rho:.3} over 200 pairs"))
}

fn subclass_recovery() -> Outcome {
    timed(Duration::from_secs(30), || {
        let data = subclass_dataset(&SubclassSpec::default(), 0).map_err(|e| e.to_string())?;
        let store = full_store(&data.dataset);
        let params = BenchmarkParams {
            targets: 50,
            group_size: 30,
            k: 8,
            t: 3,
            seed: 0,
        };
        let b = group_benchmark(&store, &params).map_err(|e| e.to_string())?;
        let ln4 = 4f64.ln();
        check(
            b.rdr.mean_purity >= 0.9
                && b.rdr.mean_entropy <= 0.3
                && (b.random.mean_purity - 0.25).abs() <= 0.05
                && (b.random.mean_entropy - ln4).abs() <= 0.1,
            format!(
                "rdr purity {:.4} entropy {:.4}; random purity {:.4} entropy {:.4}",
                b.rdr.mean_purity, b.rdr.mean_entropy, b.random.mean_purity, b.random.mean_entropy
            ),
        )
    })
}

fn scale_invariance(ds: &ActivationDataset) -> Outcome {
    let a = full_store(ds);
    let b = full_store(&ds.scaled(7.3).map_err(|e| e.to_string())?);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut changed = 0;
    for target in sample(&mut rng, ds.num_instances(), 20) {
        let ra = build_rdr(&a, target, 8, 10, NegativePolicy::Rest).map_err(|e| e.to_string())?;
        let rb = build_rdr(&b, target, 8, 10, NegativePolicy::Rest).map_err(|e| e.to_string())?;
        changed += (ra.members() != rb.members()) as usize;
    }
    check(changed == 0, format!("{changed} of 20 membership sets changed under x7.3"))
}

fn misclassification_construction() -> Outcome {
    let mut found = 0;
    for seed in 0..20 {
        let data = spurious_dataset(&SpuriousSpec::default(), seed).map_err(|e| e.to_string())?;
        let store = full_store(&data.dataset);
        let target = data.misclassified[seed as usize % data.misclassified.len()];
        let report = misclassification_report(&data.dataset, &store, target, 8, 10).map_err(|e| e.to_string())?;
        found += report.region.selected_neurons().iter().any(|(n, _)| *n == data.spurious) as usize;
    }
    check(found == 20, format!("planted neuron selected in {found}/20 trials"))
}

fn determinism(dir: &std::path::Path) -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_rdr"))
            .args(["rdr", "--data", dir.to_str().unwrap(), "--target", "17", "--seed", "0"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    check(
        a.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout,
        format!("{} bytes, identical: {}", a.stdout.len(), a.stdout == b.stdout),
    )
}

fn main() {
    let (dir, ds) = refnet_dump().expect("refnet export");
    let criteria: Vec<Criterion> = vec![
        ("greedy optimality", Box::new(greedy_optimality)),
        ("hamming correctness", Box::new(hamming_correctness)),
        ("metric axioms", Box::new(metric_axioms)),
        ("coverage and nestedness", Box::new(|| coverage_and_nestedness(&ds))),
        ("same configuration, same map", Box::new(same_configuration_same_map)),
        ("configuration distance vs mapping difference", Box::new(distance_tracks_mapping)),
        ("synthetic subclass recovery", Box::new(subclass_recovery)),
        ("scale invariance", Box::new(|| scale_invariance(&ds))),
        ("misclassification construction", Box::new(misclassification_construction)),
        ("determinism", Box::new(|| determinism(dir.path()))),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
