//! Greedy principal-neuron selection against exhaustive search on random count profiles.

use rdr::analysis::{greedy_oracle_suite, random_profile};
use rdr::region::{brute_force_select, greedy_select};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> rdr::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let profile = random_profile(&mut rng, 12);
    let candidates: Vec<usize> = (0..12).collect();
    for i in &candidates {
        println!(
            "neuron {i:>2}: pos {:.3} neg {:.3} score {:.3}",
            profile.positive_freq(*i),
            profile.negative_freq(*i),
            profile.score(*i).value()
        );
    }
    let greedy = greedy_select(&profile, &candidates, 4)?;
    let exact = brute_force_select(&profile, &candidates, 4)?;
    println!("greedy      {:?} objective {:.4}", greedy.positions(), greedy.objective().value());
    println!("brute force {:?} objective {:.4}", exact.positions(), exact.objective().value());

    let suite = greedy_oracle_suite(200, 0)?;
    println!("{} mismatches over {} random profiles", suite.mismatches, suite.trials);
    Ok(())
}
