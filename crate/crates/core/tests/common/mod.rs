#![allow(dead_code)]

use std::collections::HashMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::Rng;

use ptgp::dataset::{pair_distances, place_atoms, AtomBox};
use ptgp::engine::metropolis_accept;
use ptgp::expr::{crossover, mutate, random_tree};
use ptgp::fitness::{compile, eval_program, EvalWorkspace};
use ptgp::rng::stream;
use ptgp::tempering::{run, swap_stage, Replica, RunConfig, SwapPolicy};
use ptgp::{BoxSpec, Dataset, DepthLimits, ExprTree, Fitness, LadderScheme, LadderSpec, Population, Temperature};

pub const CASES: u32 = 10_000;

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

pub fn limits() -> impl Strategy<Value = DepthLimits> {
    (1usize..=5, 0usize..=2).prop_map(|(lo, extra)| DepthLimits::new(lo, lo + extra).unwrap())
}

pub fn seeded_tree(limits: DepthLimits, p_max: i64, seed: u64) -> ExprTree {
    random_tree(limits, p_max, &mut stream(seed, 7))
}

fn same_value(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

pub fn depth_closure(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(limits(), 0i64..=20, any::<u64>()), |(limits, p, seed)| {
            let mut rng = stream(seed, 0);
            let a = random_tree(limits, p, &mut rng);
            let b = random_tree(limits, p, &mut rng);
            prop_assert!(limits.contains(a.depth()), "random {} depth {}", a, a.depth());
            let child = crossover(&a, &b, limits, &mut rng);
            prop_assert!(limits.contains(child.depth()), "crossover {} depth {}", child, child.depth());
            let mutant = mutate(&child, limits, p, &mut rng);
            prop_assert!(limits.contains(mutant.depth()), "mutant {} depth {}", mutant, mutant.depth());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn compiler_matches_interpreter(cases: u32) -> Result<(), String> {
    let r = prop_oneof![0.5f64..2.5, -4.0f64..4.0, Just(0.0), Just(1.0)];
    runner(cases)
        .run(&(any::<u64>(), r), |(seed, r)| {
            let tree = seeded_tree(DepthLimits::new(1, 6).unwrap(), 20, seed);
            let program = compile(&tree);
            let expected = tree.eval(r);
            let scalar = eval_program(&program, r);
            prop_assert!(same_value(expected, scalar), "{tree} at {r}: {expected} vs {scalar}");
            let lanes = [r, 0.5 * r, r + 1.0];
            let mut ws = EvalWorkspace::new();
            let batch = ws.eval_batch(&program, &lanes).to_vec();
            for (x, y) in lanes.iter().zip(batch) {
                prop_assert!(same_value(tree.eval(*x), y), "{tree} lane at {x}");
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Every image within the window, found with offsets in `-2..=2` on each
/// axis.
pub fn wide_shell_distances(atoms: &AtomBox, spec: &BoxSpec) -> Vec<f64> {
    let c = &atoms.coordinates;
    let l = spec.box_length;
    let mut out = Vec::new();
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            for n in 0..125 {
                let offset = [n / 25 - 2, (n / 5) % 5 - 2, n % 5 - 2].map(|k| k as f64 * l);
                let r2: f64 = (0..3).map(|a| (c[i][a] - c[j][a] + offset[a]).powi(2)).sum();
                let r = r2.sqrt();
                if spec.r_lo < r && r < spec.r_hi {
                    out.push(r);
                }
            }
        }
    }
    out
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn close_multisets(a: Vec<f64>, b: Vec<f64>, tol: f64) -> bool {
    let (a, b) = (sorted(a), sorted(b));
    a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
}

pub fn shell_completeness(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(2usize..=12, 2.05f64..4.0, any::<u64>()), |(n_atoms, box_length, seed)| {
            let spec = BoxSpec { n_atoms, box_length, ..BoxSpec::default() };
            let atoms = place_atoms(&spec, &mut stream(seed, 0)).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let narrow = pair_distances(&atoms, &spec).unwrap();
            let wide = wide_shell_distances(&atoms, &spec);
            prop_assert!(close_multisets(narrow, wide, 1e-12), "seed {seed}");
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn translation_invariance(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(any::<u64>(), [-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0]), |(seed, shift)| {
            let spec = BoxSpec::default();
            let atoms = place_atoms(&spec, &mut stream(seed, 0)).unwrap();
            let moved = AtomBox {
                coordinates: atoms
                    .coordinates
                    .iter()
                    .map(|p| [0, 1, 2].map(|a| (p[a] + shift[a]).rem_euclid(spec.box_length)))
                    .collect(),
            };
            let a = pair_distances(&atoms, &spec).unwrap();
            let b = pair_distances(&moved, &spec).unwrap();
            prop_assert!(close_multisets(a, b, 1e-12), "seed {seed} shift {shift:?}");
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn tree_census(replicas: &[Replica]) -> HashMap<(String, u64), usize> {
    let mut census = HashMap::new();
    for r in replicas {
        for (t, f) in r.population.trees().iter().zip(r.population.fitness()) {
            *census.entry((t.to_infix(), f.value().to_bits())).or_insert(0) += 1;
        }
    }
    census
}

fn random_replicas(seed: u64, n_replicas: usize, members: usize) -> Vec<Replica> {
    let mut rng = stream(seed, 3);
    let mut t = 0.05;
    (0..n_replicas)
        .map(|i| {
            t *= rng.random_range(1.1..5.0);
            let trees: Vec<ExprTree> =
                (0..members).map(|_| random_tree(DepthLimits::new(1, 3).unwrap(), 3, &mut rng)).collect();
            let fitness = (0..members)
                .map(|_| match rng.random_range(0..8) {
                    0 => Fitness::WORST,
                    1 => Fitness::new(-1.0),
                    _ => Fitness::new(-rng.random_range(0.0..5.0)),
                })
                .collect();
            Replica {
                population: Population::new(trees, fitness),
                temperature: Temperature::new(t),
                rng: stream(seed, 100 + i as u64),
                swaps_up_attempted: 0,
                swaps_up_accepted: 0,
            }
        })
        .collect()
}

pub fn swap_conservation(cases: u32) -> Result<(), String> {
    let policy = prop_oneof![Just(SwapPolicy::Random), Just(SwapPolicy::Best)];
    runner(cases)
        .run(&(any::<u64>(), 1usize..=5, 1usize..=6, 0usize..=4, policy), |(seed, n, m, attempts, policy)| {
            let mut replicas = random_replicas(seed, n, m);
            let before = tree_census(&replicas);
            let stats = swap_stage(&mut replicas, attempts, policy, &mut stream(seed, 0));
            prop_assert_eq!(tree_census(&replicas), before);
            prop_assert_eq!(stats.attempted as usize, attempts * (n - 1));
            prop_assert!(stats.accepted <= stats.attempted);
            for r in &replicas {
                prop_assert_eq!(r.population.len(), m);
                prop_assert!(r.population.is_sorted());
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn small_config(seed: u64, replicas: usize, population: usize, generations: usize) -> RunConfig {
    RunConfig {
        ladder: LadderSpec { t_min: 0.1, t_max: 10.0, n_replicas: replicas, scheme: LadderScheme::Logarithmic },
        population_size: population,
        seed,
        max_generations: generations,
        ..RunConfig::default()
    }
}

pub fn best_so_far_monotone(cases: u32) -> Result<(), String> {
    let dataset = Dataset::build(BoxSpec::default(), 4, 5).unwrap();
    runner(cases)
        .run(&(any::<u64>(), 1usize..=4, 2usize..=24, any::<bool>()), |(seed, n, m, adaptive)| {
            let mut config = small_config(seed, n, m, 8);
            config.adaptive.enabled = adaptive;
            config.adaptive.interval = 2;
            let result = run(&config, &dataset).unwrap();
            prop_assert_eq!(result.history.len(), result.generations_run + 1);
            let mse: Vec<f64> = result.history.iter().map(|h| h.best_mse_so_far).collect();
            prop_assert!(mse.windows(2).all(|w| w[1] <= w[0]), "{:?}", mse);
            prop_assert_eq!(*mse.last().unwrap(), result.best_mse());
            for h in &result.history {
                prop_assert!(h.best_fitness_overall.mse() >= result.best_mse());
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Empirical Metropolis acceptance frequency for a fitness drop `delta`
/// (negative) at temperature `t`.
pub fn metropolis_frequency(delta: f64, t: f64, trials: usize, seed: u64) -> f64 {
    let mut rng = stream(seed, 0);
    let old = Fitness::new(-1.0);
    let new = Fitness::new(-1.0 + delta);
    let hits = (0..trials).filter(|_| metropolis_accept(new, old, Temperature::new(t), &mut rng)).count();
    hits as f64 / trials as f64
}

/// Empirical frequency of the swap stage exchanging a tree of fitness
/// `f_cold` in a replica at `t_cold` with one of fitness `f_hot` at `t_hot`.
pub fn swap_frequency(t_cold: f64, t_hot: f64, f_cold: f64, f_hot: f64, trials: usize, seed: u64) -> f64 {
    let mut controller = stream(seed, 0);
    let make = |t: f64, f: f64| Replica {
        population: Population::new(vec![ExprTree::r()], vec![Fitness::new(f)]),
        temperature: Temperature::new(t),
        rng: stream(seed, 1),
        swaps_up_attempted: 0,
        swaps_up_accepted: 0,
    };
    let mut accepted = 0u64;
    for _ in 0..trials {
        let mut pair = vec![make(t_cold, f_cold), make(t_hot, f_hot)];
        accepted += swap_stage(&mut pair, 1, SwapPolicy::Random, &mut controller).accepted;
    }
    accepted as f64 / trials as f64
}

/// `|observed - p| <= 3 sigma` for a binomial proportion over `n` trials.
pub fn within_three_sigma(observed: f64, p: f64, n: usize) -> bool {
    (observed - p).abs() <= 3.0 * (p * (1.0 - p) / n as f64).sqrt()
}
