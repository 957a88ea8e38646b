//! Replica ladder and the top-level search loop.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::engine::{step, GenerationStats, Population, Temperature, TreeSpace};
use crate::expr::{DepthLimits, ExprTree};
use crate::fitness::{tree_fitness, Fitness};
use crate::float17;
use crate::rng::{controller_stream, replica_stream, StreamRng};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("dataset is invalid: {0}")]
    Dataset(#[from] crate::dataset::DatasetError),
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LadderScheme {
    Linear,
    Logarithmic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwapPolicy {
    /// Uniformly chosen member of each replica.
    Random,
    /// The fittest member of each replica.
    Best,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n_replicas: usize,
    pub scheme: LadderScheme,
}

impl Default for LadderSpec {
    fn default() -> Self {
        LadderSpec { t_min: 0.1, t_max: 10.0, n_replicas: 200, scheme: LadderScheme::Logarithmic }
    }
}

impl LadderSpec {
    pub fn validate(&self) -> Result<(), RunError> {
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max.is_finite()) {
            return Err(RunError::Config(format!(
                "ladder bounds must satisfy 0 < t_min < t_max (got {}, {})",
                self.t_min, self.t_max
            )));
        }
        if self.n_replicas < 1 {
            return Err(RunError::Config("n_replicas must be at least 1".into()));
        }
        Ok(())
    }
}

/// Initial temperatures, ascending, with endpoints exactly `t_min` and
/// `t_max`. A single replica sits at `t_min`.
pub fn ladder(spec: &LadderSpec) -> Vec<Temperature> {
    let n = spec.n_replicas;
    if n == 1 {
        return vec![Temperature::new(spec.t_min)];
    }
    let steps = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let t = if i == 0 {
                spec.t_min
            } else if i == n - 1 {
                spec.t_max
            } else {
                match spec.scheme {
                    LadderScheme::Linear => {
                        spec.t_min + (spec.t_max - spec.t_min) * i as f64 / steps
                    }
                    LadderScheme::Logarithmic => {
                        spec.t_min * (spec.t_max / spec.t_min).powf(i as f64 / steps)
                    }
                }
            };
            Temperature::new(t)
        })
        .collect()
}

/// Adaptive temperature control. Every `interval` generations each interior
/// replica's mean swap acceptance with its two neighbours is compared to
/// `[band_lo, band_hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveSpec {
    pub enabled: bool,
    pub band_lo: f64,
    pub band_hi: f64,
    pub interval: usize,
}

impl Default for AdaptiveSpec {
    fn default() -> Self {
        AdaptiveSpec { enabled: false, band_lo: 0.2, band_hi: 0.6, interval: 10 }
    }
}

/// Fraction of the gap to the neighbours' log-temperature midpoint moved
/// per adaptation.
pub const ADAPT_STEP: f64 = 0.1;

#[derive(Clone, Debug)]
pub struct Replica {
    pub population: Population,
    pub temperature: Temperature,
    pub rng: StreamRng,
    /// Swap attempts and acceptances with the next hotter replica since the
    /// last adaptation.
    pub swaps_up_attempted: u64,
    pub swaps_up_accepted: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SwapStats {
    pub attempted: u64,
    pub accepted: u64,
}

impl SwapStats {
    pub fn rate(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempted as f64
        }
    }
}

/// Acceptance probability of exchanging members with fitness `f_cold` (in
/// the replica at `beta_cold`) and `f_hot`:
/// `min{1, exp[(beta_cold - beta_hot)(f_cold - f_hot)]}`.
/// Equal fitness or equal temperatures always swap.
pub fn swap_probability(beta_cold: f64, beta_hot: f64, f_cold: Fitness, f_hot: Fitness) -> f64 {
    if f_cold == f_hot || beta_cold == beta_hot {
        return 1.0;
    }
    let exponent = (beta_cold - beta_hot) * (f_cold.value() - f_hot.value());
    if exponent.is_nan() {
        return 0.0;
    }
    exponent.min(0.0).exp()
}

/// Neighbour exchange over the ladder, coldest pair first.
pub fn swap_stage(
    replicas: &mut [Replica],
    attempts: usize,
    policy: SwapPolicy,
    rng: &mut StreamRng,
) -> SwapStats {
    let mut stats = SwapStats::default();
    for i in 0..replicas.len().saturating_sub(1) {
        let (lower, upper) = replicas.split_at_mut(i + 1);
        let cold = &mut lower[i];
        let hot = &mut upper[0];
        for _ in 0..attempts {
            let (a, b) = match policy {
                SwapPolicy::Random => (
                    rng.random_range(0..cold.population.len()),
                    rng.random_range(0..hot.population.len()),
                ),
                SwapPolicy::Best => (0, 0),
            };
            let p = swap_probability(
                cold.temperature.beta(),
                hot.temperature.beta(),
                cold.population.fitness()[a],
                hot.population.fitness()[b],
            );
            let accepted = p >= 1.0 || rng.random::<f64>() < p;
            cold.swaps_up_attempted += 1;
            stats.attempted += 1;
            if accepted {
                cold.population.exchange(a, &mut hot.population, b);
                cold.swaps_up_accepted += 1;
                stats.accepted += 1;
            }
        }
    }
    stats
}

/// Nudges interior temperatures in log space: 10% of the way toward the
/// neighbours' log midpoint when acceptance is below the band, 10% away when
/// above. Endpoints stay put, the ladder stays strictly increasing, and the
/// swap counters are reset.
pub fn adapt_temperatures(replicas: &mut [Replica], spec: &AdaptiveSpec) {
    if !spec.enabled {
        return;
    }
    let n = replicas.len();
    let rates: Vec<Option<f64>> = replicas[..n.saturating_sub(1)]
        .iter()
        .map(|r| {
            (r.swaps_up_attempted > 0)
                .then(|| r.swaps_up_accepted as f64 / r.swaps_up_attempted as f64)
        })
        .collect();
    let old: Vec<f64> = replicas.iter().map(|r| r.temperature.value().ln()).collect();
    let mut new = old.clone();
    let mut moved = vec![false; n];
    for i in 1..n.saturating_sub(1) {
        let (Some(below), Some(above)) = (rates[i - 1], rates[i]) else {
            continue;
        };
        let rate = 0.5 * (below + above);
        let mid = 0.5 * (old[i - 1] + old[i + 1]);
        let target = if rate < spec.band_lo {
            old[i] + ADAPT_STEP * (mid - old[i])
        } else if rate > spec.band_hi {
            old[i] - ADAPT_STEP * (mid - old[i])
        } else {
            continue;
        };
        // Keep strictly between the (already updated) colder neighbour and
        // the hotter one.
        let lo = new[i - 1];
        let hi = old[i + 1];
        let margin = 0.01 * (hi - lo);
        new[i] = target.clamp(lo + margin, hi - margin);
        moved[i] = true;
    }
    for (i, r) in replicas.iter_mut().enumerate() {
        if moved[i] {
            r.temperature = Temperature::new(new[i].exp());
        }
        r.swaps_up_attempted = 0;
        r.swaps_up_accepted = 0;
    }
}

/// A tree injected into one replica's initial population, replacing its
/// worst member.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedTree {
    pub tree: ExprTree,
    pub replica: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub ladder: LadderSpec,
    pub adaptive: AdaptiveSpec,
    pub population_size: usize,
    pub limits: DepthLimits,
    pub p_max: i64,
    pub seed: u64,
    pub max_generations: usize,
    /// Stop once the best mean squared error is at or below this value.
    pub convergence_mse: f64,
    pub swap_attempts: usize,
    pub swap_policy: SwapPolicy,
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
    pub planted: Option<PlantedTree>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ladder: LadderSpec::default(),
            adaptive: AdaptiveSpec::default(),
            population_size: 10_000,
            limits: DepthLimits::default(),
            p_max: crate::expr::DEFAULT_P_MAX,
            seed: 1,
            max_generations: 400,
            convergence_mse: 1e-9,
            swap_attempts: 1,
            swap_policy: SwapPolicy::Random,
            threads: 0,
            planted: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), RunError> {
        self.ladder.validate()?;
        let fail = |m: String| Err(RunError::Config(m));
        if self.population_size < 1 {
            return fail("population_size must be at least 1".into());
        }
        if self.max_generations < 1 {
            return fail("max_generations must be at least 1".into());
        }
        if self.swap_attempts < 1 {
            return fail("swap_attempts must be at least 1".into());
        }
        if self.p_max < 0 {
            return fail("p_max must be non-negative".into());
        }
        if !(self.convergence_mse >= 0.0) {
            return fail("convergence_mse must be non-negative".into());
        }
        let a = &self.adaptive;
        if a.enabled && (!(0.0 <= a.band_lo && a.band_lo <= a.band_hi && a.band_hi <= 1.0) || a.interval < 1) {
            return fail("adaptive band must satisfy 0 <= lo <= hi <= 1 with interval >= 1".into());
        }
        if let Some(p) = &self.planted {
            if p.replica >= self.ladder.n_replicas {
                return fail(format!("planted replica {} out of range", p.replica));
            }
            if !self.limits.contains(p.tree.depth()) {
                return fail(format!("planted tree depth {} outside limits", p.tree.depth()));
            }
        }
        Ok(())
    }

    pub fn tree_space(&self) -> TreeSpace {
        TreeSpace { limits: self.limits, p_max: self.p_max }
    }
}

/// One line of convergence history.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryRow {
    pub generation: usize,
    /// Best fitness held by any replica this generation.
    pub best_fitness_overall: Fitness,
    pub best_mse_so_far: f64,
    pub replica_index_of_best: usize,
    pub temperature_of_best: f64,
    pub swap_acceptance_rate: f64,
    pub pass_through_count: usize,
    pub crossover_count: usize,
    pub mutation_count: usize,
    /// Best tree found so far.
    pub best_tree_infix: String,
}

impl HistoryRow {
    pub const CSV_HEADER: &'static str = "generation,best_fitness_overall,best_mse_so_far,replica_index_of_best,temperature_of_best,swap_acceptance_rate,pass_through_count,crossover_count,mutation_count,best_tree_infix";

    /// CSV record with floats in 17 significant digits.
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.generation,
            float17::format(self.best_fitness_overall.value()),
            float17::format(self.best_mse_so_far),
            self.replica_index_of_best,
            float17::format(self.temperature_of_best),
            float17::format(self.swap_acceptance_rate),
            self.pass_through_count,
            self.crossover_count,
            self.mutation_count,
            self.best_tree_infix,
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub best_tree: ExprTree,
    pub best_fitness: Fitness,
    pub generation_found: usize,
    pub generations_run: usize,
    pub converged: bool,
    pub history: Vec<HistoryRow>,
    pub swaps: SwapStats,
}

impl RunResult {
    pub fn best_infix(&self) -> String {
        self.best_tree.to_infix()
    }

    pub fn best_mse(&self) -> f64 {
        self.best_fitness.mse()
    }
}

/// Live search state, exposed so callers can drive generations themselves.
pub struct Tempering<'a> {
    config: RunConfig,
    dataset: &'a Dataset,
    pub replicas: Vec<Replica>,
    controller: StreamRng,
    generation: usize,
    best_tree: ExprTree,
    best_fitness: Fitness,
    generation_found: usize,
    swaps: SwapStats,
}

impl<'a> Tempering<'a> {
    /// Builds every replica's random initial population.
    pub fn new(config: RunConfig, dataset: &'a Dataset) -> Result<Self, RunError> {
        config.validate()?;
        dataset.validate()?;
        let temperatures = ladder(&config.ladder);
        let space = config.tree_space();
        let mut replicas: Vec<Replica> = temperatures
            .into_par_iter()
            .enumerate()
            .map(|(i, temperature)| {
                let mut rng = replica_stream(config.seed, i);
                let population =
                    Population::random(config.population_size, space.limits, space.p_max, dataset, &mut rng);
                Replica {
                    population,
                    temperature,
                    rng,
                    swaps_up_attempted: 0,
                    swaps_up_accepted: 0,
                }
            })
            .collect();
        if let Some(planted) = &config.planted {
            let pop = &mut replicas[planted.replica].population;
            let worst = pop.len() - 1;
            pop.replace(worst, planted.tree.clone(), tree_fitness(&planted.tree, dataset));
        }
        let (best_tree, best_fitness) = {
            let (_, (t, f)) = best_of(&replicas);
            (t.clone(), f)
        };
        Ok(Tempering {
            controller: controller_stream(config.seed),
            config,
            dataset,
            replicas,
            generation: 0,
            best_tree,
            best_fitness,
            generation_found: 0,
            swaps: SwapStats::default(),
        })
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn best(&self) -> (&ExprTree, Fitness) {
        (&self.best_tree, self.best_fitness)
    }

    pub fn converged(&self) -> bool {
        self.best_fitness.mse() <= self.config.convergence_mse
    }

    fn row(&self, stats: &GenerationStats, swaps: SwapStats) -> HistoryRow {
        let (index, (_, fitness)) = best_of(&self.replicas);
        HistoryRow {
            generation: self.generation,
            best_fitness_overall: fitness,
            best_mse_so_far: self.best_fitness.mse(),
            replica_index_of_best: index,
            temperature_of_best: self.replicas[index].temperature.value(),
            swap_acceptance_rate: swaps.rate(),
            pass_through_count: stats.pass_throughs,
            crossover_count: stats.crossovers,
            mutation_count: stats.mutations,
            best_tree_infix: self.best_tree.to_infix(),
        }
    }

    /// History row describing the initial populations.
    pub fn initial_row(&self) -> HistoryRow {
        self.row(&GenerationStats::default(), SwapStats::default())
    }

    /// Steps every replica, runs the swap stage and optional adaptation.
    pub fn advance(&mut self) -> HistoryRow {
        let space = self.config.tree_space();
        let dataset = self.dataset;
        let stats: Vec<GenerationStats> = self
            .replicas
            .par_iter_mut()
            .map(|r| {
                let (next, stats) = step(&r.population, r.temperature, space, dataset, &mut r.rng);
                r.population = next;
                stats
            })
            .collect();
        let mut total = GenerationStats::default();
        for s in &stats {
            total.merge(s);
        }
        let swaps = swap_stage(
            &mut self.replicas,
            self.config.swap_attempts,
            self.config.swap_policy,
            &mut self.controller,
        );
        self.swaps.attempted += swaps.attempted;
        self.swaps.accepted += swaps.accepted;
        self.generation += 1;
        if self.config.adaptive.enabled && self.generation % self.config.adaptive.interval == 0 {
            adapt_temperatures(&mut self.replicas, &self.config.adaptive);
        }
        let (_, (tree, fitness)) = best_of(&self.replicas);
        if fitness.cmp_total(&self.best_fitness).is_gt() {
            self.best_tree = tree.clone();
            self.best_fitness = fitness;
            self.generation_found = self.generation;
        }
        self.row(&total, swaps)
    }

    pub fn into_result(self, history: Vec<HistoryRow>) -> RunResult {
        RunResult {
            converged: self.converged(),
            best_tree: self.best_tree,
            best_fitness: self.best_fitness,
            generation_found: self.generation_found,
            generations_run: self.generation,
            history,
            swaps: self.swaps,
        }
    }
}

fn best_of(replicas: &[Replica]) -> (usize, (&ExprTree, Fitness)) {
    let mut best = 0;
    for (i, r) in replicas.iter().enumerate().skip(1) {
        if r.population.best().1.cmp_total(&replicas[best].population.best().1).is_gt() {
            best = i;
        }
    }
    (best, replicas[best].population.best())
}

/// Runs the search to convergence or the generation cap.
pub fn run(config: &RunConfig, dataset: &Dataset) -> Result<RunResult, RunError> {
    run_with_observer(config, dataset, |_| {})
}

/// [`run`], handing each history row to `observer` as soon as it exists.
pub fn run_with_observer<F>(
    config: &RunConfig,
    dataset: &Dataset,
    mut observer: F,
) -> Result<RunResult, RunError>
where
    F: FnMut(&HistoryRow) + Send,
{
    config.validate()?;
    let body = |observer: &mut F| -> Result<RunResult, RunError> {
        let mut state = Tempering::new(config.clone(), dataset)?;
        let mut history = Vec::new();
        let first = state.initial_row();
        observer(&first);
        history.push(first);
        while !state.converged() && state.generation() < config.max_generations {
            let row = state.advance();
            observer(&row);
            history.push(row);
        }
        Ok(state.into_result(history))
    };
    if config.threads == 0 {
        body(&mut observer)
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(config.threads).build()?;
        pool.install(|| body(&mut observer))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_infix;
    use crate::rng::stream;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn ladders() {
        let t = |s: LadderScheme, lo, hi, n| -> Vec<f64> {
            ladder(&LadderSpec { t_min: lo, t_max: hi, n_replicas: n, scheme: s })
                .into_iter()
                .map(Temperature::value)
                .collect()
        };
        let log = t(LadderScheme::Logarithmic, 0.1, 10.0, 3);
        assert_eq!(log[0], 0.1);
        assert_close(log[1], 1.0);
        assert_eq!(log[2], 10.0);
        let lin = t(LadderScheme::Linear, 1.0, 3.0, 3);
        assert_eq!(lin, vec![1.0, 2.0, 3.0]);
        assert_eq!(t(LadderScheme::Linear, 1.0, 3.0, 1), vec![1.0]);
    }

    #[test]
    fn swap_probability_cases() {
        let f = Fitness::new;
        assert_eq!(swap_probability(10.0, 0.1, f(-1.0), f(-1.0)), 1.0);
        assert_eq!(swap_probability(1.0, 1.0, f(-1.0), f(-3.0)), 1.0);
        assert_eq!(swap_probability(10.0, 0.1, f(-1.0), f(-0.5)), (-4.95f64).exp());
        assert_eq!(swap_probability(10.0, 0.1, f(-0.5), f(-1.0)), 1.0);
        assert_eq!(swap_probability(10.0, 0.1, Fitness::WORST, f(-1.0)), 0.0);
        assert_eq!(swap_probability(10.0, 0.1, f(-1.0), Fitness::WORST), 1.0);
        assert_eq!(swap_probability(10.0, 0.1, Fitness::WORST, Fitness::WORST), 1.0);
    }

    fn replica(t: f64, fitness: &[f64]) -> Replica {
        let trees = fitness.iter().map(|&f| ExprTree::constant(f as i64)).collect();
        Replica {
            population: Population::new(trees, fitness.iter().map(|&f| Fitness::new(f)).collect()),
            temperature: Temperature::new(t),
            rng: stream(0, 0),
            swaps_up_attempted: 0,
            swaps_up_accepted: 0,
        }
    }

    #[test]
    fn single_replica_swap_is_noop() {
        let mut reps = vec![replica(1.0, &[-1.0, -2.0])];
        let before = reps[0].population.clone();
        let stats = swap_stage(&mut reps, 3, SwapPolicy::Random, &mut stream(1, 0));
        assert_eq!(stats, SwapStats::default());
        assert_eq!(reps[0].population, before);
    }

    #[test]
    fn best_policy_exchanges_leaders() {
        // (beta_cold - beta_hot)(f_cold - f_hot) = 9.9 * 4 > 0: certain swap.
        let mut reps = vec![replica(0.1, &[-1.0, -6.0]), replica(10.0, &[-5.0, -9.0])];
        let stats = swap_stage(&mut reps, 1, SwapPolicy::Best, &mut stream(1, 0));
        assert_eq!(stats, SwapStats { attempted: 1, accepted: 1 });
        assert_eq!(reps[0].population.best().1, Fitness::new(-5.0));
        assert_eq!(reps[1].population.best().1, Fitness::new(-1.0));
        assert!(reps.iter().all(|r| r.population.is_sorted()));
    }

    #[test]
    fn adaptation_rules() {
        let spec = AdaptiveSpec { enabled: true, ..AdaptiveSpec::default() };
        let mut reps = vec![replica(0.1, &[-1.0]), replica(0.5, &[-1.0]), replica(10.0, &[-1.0])];
        reps[0].swaps_up_attempted = 10;
        reps[1].swaps_up_attempted = 10;
        adapt_temperatures(&mut reps, &spec);
        let mid = 0.5 * (0.1f64.ln() + 10f64.ln());
        let expected = 0.5f64.ln() + 0.1 * (mid - 0.5f64.ln());
        assert_close(reps[1].temperature.value().ln(), expected);
        assert_eq!(reps[0].temperature.value(), 0.1);
        assert_eq!(reps[2].temperature.value(), 10.0);

        // Inside the band: unchanged.
        let mut reps = vec![replica(0.1, &[-1.0]), replica(0.5, &[-1.0]), replica(10.0, &[-1.0])];
        for r in &mut reps[..2] {
            r.swaps_up_attempted = 10;
            r.swaps_up_accepted = 4;
        }
        adapt_temperatures(&mut reps, &spec);
        assert_close(reps[1].temperature.value(), 0.5);

        // Disabled: no-op.
        let mut reps = vec![replica(0.1, &[-1.0]), replica(0.5, &[-1.0]), replica(10.0, &[-1.0])];
        reps[0].swaps_up_attempted = 10;
        reps[1].swaps_up_attempted = 10;
        adapt_temperatures(&mut reps, &AdaptiveSpec::default());
        assert_eq!(reps[1].temperature.value(), 0.5);
    }

    #[test]
    fn adaptation_keeps_ladder_strict() {
        let spec = AdaptiveSpec { enabled: true, ..AdaptiveSpec::default() };
        let temps = [0.1, 0.1001, 0.1002, 0.2, 10.0];
        let mut reps: Vec<Replica> = temps.iter().map(|&t| replica(t, &[-1.0])).collect();
        for r in &mut reps[..4] {
            r.swaps_up_attempted = 4;
            r.swaps_up_accepted = 4;
        }
        for _ in 0..50 {
            for r in &mut reps[..4] {
                r.swaps_up_attempted = 4;
                r.swaps_up_accepted = 4;
            }
            adapt_temperatures(&mut reps, &spec);
            assert!(reps.windows(2).all(|w| w[0].temperature.value() < w[1].temperature.value()));
        }
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_ok());
        c.ladder.t_min = 20.0;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.planted = Some(PlantedTree { tree: parse_infix("R").unwrap(), replica: 0 });
        assert!(c.validate().is_err());
        c.planted = Some(PlantedTree { tree: parse_infix("(R^(-12) - R^(-6))*4").unwrap(), replica: 500 });
        assert!(c.validate().is_err());
    }

    #[test]
    fn csv_row_format() {
        let row = HistoryRow {
            generation: 3,
            best_fitness_overall: Fitness::new(-0.25),
            best_mse_so_far: 0.25,
            replica_index_of_best: 1,
            temperature_of_best: 0.1,
            swap_acceptance_rate: 0.5,
            pass_through_count: 4,
            crossover_count: 6,
            mutation_count: 5,
            best_tree_infix: "R + 1".into(),
        };
        assert_eq!(
            row.to_csv(),
            "3,-2.5000000000000000e-1,2.5000000000000000e-1,1,1.0000000000000001e-1,5.0000000000000000e-1,4,6,5,R + 1"
        );
        assert_eq!(HistoryRow::CSV_HEADER.split(',').count(), row.to_csv().split(',').count());
    }
}
