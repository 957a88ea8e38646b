//! Desk-scale search: 32 replicas of 1,000 trees on the default dataset.
//!
//! `cargo run --release -p ptgp --example desk_run -- <seed> [generations]`

use std::time::Instant;

use ptgp::tempering::{run_with_observer, RunConfig};
use ptgp::{BoxSpec, Dataset, LadderSpec};

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let generations: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(300);
    let dataset = Dataset::build(BoxSpec::default(), 10, seed).expect("dataset");
    let config = RunConfig {
        ladder: LadderSpec { n_replicas: 32, ..LadderSpec::default() },
        population_size: 1_000,
        max_generations: generations,
        seed,
        ..RunConfig::default()
    };
    let start = Instant::now();
    let result = run_with_observer(&config, &dataset, |row| {
        if row.generation % 10 == 0 {
            eprintln!(
                "gen {:4}  mse {:.3e}  t={:.1}s  {}",
                row.generation,
                row.best_mse_so_far,
                start.elapsed().as_secs_f64(),
                row.best_tree_infix
            );
        }
    })
    .expect("run");
    println!(
        "seed {seed}: best mse {:.3e} at generation {} ({} generations, {:.1}s): {}",
        result.best_mse(),
        result.generation_found,
        result.generations_run,
        start.elapsed().as_secs_f64(),
        result.best_infix()
    );
}
