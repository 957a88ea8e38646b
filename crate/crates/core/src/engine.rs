//! One generation of a single population: generation, mutation and testing
//! stages.

use std::cmp::Ordering;

use rand::Rng;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::expr::{crossover, mutate, random_tree, DepthLimits, ExprTree};
use crate::fitness::{population_fitness, Fitness};
use crate::rng::{slot_streams, StreamRng};

/// Number of uniform draws in one tournament.
pub const TOURNAMENT_SIZE: usize = 4;

/// Trees with cached fitness, kept sorted best first.
#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    trees: Vec<ExprTree>,
    fitness: Vec<Fitness>,
}

impl Population {
    /// Sorts the members best first: higher fitness, then fewer nodes, then
    /// original order.
    ///
    /// # Panics
    ///
    /// If the lists are empty or differ in length.
    pub fn new(trees: Vec<ExprTree>, fitness: Vec<Fitness>) -> Self {
        assert!(!trees.is_empty(), "population must not be empty");
        assert_eq!(trees.len(), fitness.len());
        let mut pop = Population { trees, fitness };
        pop.sort();
        pop
    }

    /// Evaluates and sorts the given trees.
    pub fn evaluate(trees: Vec<ExprTree>, dataset: &Dataset) -> Self {
        let fitness = population_fitness(&trees, dataset);
        Self::new(trees, fitness)
    }

    /// `n` random trees drawn from `rng`.
    pub fn random(
        n: usize,
        limits: DepthLimits,
        p_max: i64,
        dataset: &Dataset,
        rng: &mut StreamRng,
    ) -> Self {
        let trees = (0..n).map(|_| random_tree(limits, p_max, rng)).collect();
        Self::evaluate(trees, dataset)
    }

    fn sort(&mut self) {
        let mut order: Vec<usize> = (0..self.trees.len()).collect();
        order.sort_by(|&a, &b| self.rank(a, b));
        self.trees = order.iter().map(|&i| self.trees[i].clone()).collect();
        self.fitness = order.iter().map(|&i| self.fitness[i]).collect();
    }

    fn rank(&self, a: usize, b: usize) -> Ordering {
        self.fitness[b]
            .cmp_total(&self.fitness[a])
            .then_with(|| self.trees[a].node_count().cmp(&self.trees[b].node_count()))
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn trees(&self) -> &[ExprTree] {
        &self.trees
    }

    pub fn fitness(&self) -> &[Fitness] {
        &self.fitness
    }

    pub fn best(&self) -> (&ExprTree, Fitness) {
        (&self.trees[0], self.fitness[0])
    }

    /// Replaces member `index` and restores the ordering.
    pub fn replace(&mut self, index: usize, tree: ExprTree, fitness: Fitness) {
        self.trees[index] = tree;
        self.fitness[index] = fitness;
        self.sort();
    }

    /// Swaps member `i` of `self` with member `j` of `other`, then re-sorts
    /// both.
    pub fn exchange(&mut self, i: usize, other: &mut Population, j: usize) {
        std::mem::swap(&mut self.trees[i], &mut other.trees[j]);
        std::mem::swap(&mut self.fitness[i], &mut other.fitness[j]);
        self.sort();
        other.sort();
    }

    pub fn is_sorted(&self) -> bool {
        (1..self.len()).all(|i| self.rank(i - 1, i) != Ordering::Greater)
    }
}

/// Strictly positive temperature in fitness units.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Temperature(f64);

impl Temperature {
    /// # Panics
    ///
    /// If `t` is not a positive finite number.
    pub fn new(t: f64) -> Self {
        assert!(t > 0.0 && t.is_finite(), "temperature must be positive, got {t}");
        Temperature(t)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn beta(self) -> f64 {
        1.0 / self.0
    }
}

/// How a candidate tree came to be.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    PassThrough,
    Crossover,
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub tree: ExprTree,
    pub origin: Origin,
    pub mutated: bool,
    /// Known fitness, for pass-through copies that were not mutated.
    pub cached: Option<Fitness>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GenerationStats {
    pub pass_throughs: usize,
    pub crossovers: usize,
    pub mutations: usize,
    pub acceptances: usize,
    pub crossover_only: usize,
    pub crossover_and_mutation: usize,
    pub mutation_only: usize,
    pub unchanged: usize,
    pub best_before: Option<Fitness>,
    pub best_after: Option<Fitness>,
}

impl GenerationStats {
    pub fn from_candidates(candidates: &[Candidate]) -> Self {
        let mut s = GenerationStats::default();
        for c in candidates {
            match (c.origin, c.mutated) {
                (Origin::Crossover, false) => s.crossover_only += 1,
                (Origin::Crossover, true) => s.crossover_and_mutation += 1,
                (Origin::PassThrough, true) => s.mutation_only += 1,
                (Origin::PassThrough, false) => s.unchanged += 1,
            }
        }
        s.crossovers = s.crossover_only + s.crossover_and_mutation;
        s.pass_throughs = s.mutation_only + s.unchanged;
        s.mutations = s.crossover_and_mutation + s.mutation_only;
        s
    }

    pub fn merge(&mut self, other: &GenerationStats) {
        self.pass_throughs += other.pass_throughs;
        self.crossovers += other.crossovers;
        self.mutations += other.mutations;
        self.acceptances += other.acceptances;
        self.crossover_only += other.crossover_only;
        self.crossover_and_mutation += other.crossover_and_mutation;
        self.mutation_only += other.mutation_only;
        self.unchanged += other.unchanged;
    }
}

/// Tree-shape parameters shared by every stage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeSpace {
    pub limits: DepthLimits,
    pub p_max: i64,
}

impl Default for TreeSpace {
    fn default() -> Self {
        TreeSpace { limits: DepthLimits::default(), p_max: crate::expr::DEFAULT_P_MAX }
    }
}

/// Index of the fittest of four uniform draws with replacement. Equal
/// fitness keeps the earlier draw.
pub fn tournament_select<G: Rng + ?Sized>(pop: &Population, rng: &mut G) -> usize {
    let mut best = rng.random_range(0..pop.len());
    for _ in 1..TOURNAMENT_SIZE {
        let challenger = rng.random_range(0..pop.len());
        if pop.fitness[challenger].cmp_total(&pop.fitness[best]) == Ordering::Greater {
            best = challenger;
        }
    }
    best
}

/// Builds one candidate per slot. Each slot flips a fair coin between a
/// pass-through copy (next fittest old tree not yet copied) and a crossover
/// of two tournament winners. Once every old tree has been passed through,
/// further pass-through flips become crossovers.
pub fn generation_stage(
    pop: &Population,
    limits: DepthLimits,
    slots: &mut [StreamRng],
) -> Vec<Candidate> {
    let mut cursor = 0usize;
    let plan: Vec<Option<usize>> = slots
        .iter_mut()
        .map(|rng| {
            if rng.random_bool(0.5) && cursor < pop.len() {
                cursor += 1;
                Some(cursor - 1)
            } else {
                None
            }
        })
        .collect();
    slots
        .par_iter_mut()
        .zip(plan.into_par_iter())
        .map(|(rng, plan)| match plan {
            Some(i) => Candidate {
                tree: pop.trees[i].clone(),
                origin: Origin::PassThrough,
                mutated: false,
                cached: Some(pop.fitness[i]),
            },
            None => {
                let a = tournament_select(pop, rng);
                let b = tournament_select(pop, rng);
                Candidate {
                    tree: crossover(&pop.trees[a], &pop.trees[b], limits, rng),
                    origin: Origin::Crossover,
                    mutated: false,
                    cached: None,
                }
            }
        })
        .collect()
}

/// Mutates each candidate independently with `probability`.
pub fn mutation_stage(
    candidates: &mut [Candidate],
    space: TreeSpace,
    probability: f64,
    slots: &mut [StreamRng],
) {
    candidates.par_iter_mut().zip(slots.par_iter_mut()).for_each(|(c, rng)| {
        if rng.random_bool(probability) {
            c.tree = mutate(&c.tree, space.limits, space.p_max, rng);
            c.mutated = true;
            c.cached = None;
        }
    });
}

/// Metropolis test `min{1, exp[beta (f_new - f_old)]}`. A `-inf` newcomer is
/// always rejected, including against a `-inf` incumbent.
pub fn metropolis_accept<G: Rng + ?Sized>(
    f_new: Fitness,
    f_old: Fitness,
    temperature: Temperature,
    rng: &mut G,
) -> bool {
    if !f_new.is_finite() {
        return false;
    }
    if f_new.value() >= f_old.value() {
        return true;
    }
    let p = (temperature.beta() * (f_new.value() - f_old.value())).exp();
    rng.random::<f64>() < p
}

/// Probability of mutating a candidate in the default pipeline.
pub const MUTATION_PROBABILITY: f64 = 0.5;

/// Advances a population by one generation.
pub fn step(
    pop: &Population,
    temperature: Temperature,
    space: TreeSpace,
    dataset: &Dataset,
    rng: &mut StreamRng,
) -> (Population, GenerationStats) {
    step_with(pop, temperature, space, MUTATION_PROBABILITY, dataset, rng)
}

/// [`step`] with an explicit mutation probability.
pub fn step_with(
    pop: &Population,
    temperature: Temperature,
    space: TreeSpace,
    mutation_probability: f64,
    dataset: &Dataset,
    rng: &mut StreamRng,
) -> (Population, GenerationStats) {
    debug_assert!(pop.is_sorted());
    let mut slots = slot_streams(rng, pop.len());
    let mut candidates = generation_stage(pop, space.limits, &mut slots);
    mutation_stage(&mut candidates, space, mutation_probability, &mut slots);

    let fresh: Vec<usize> = (0..candidates.len()).filter(|&i| candidates[i].cached.is_none()).collect();
    let fresh_trees: Vec<ExprTree> = fresh.iter().map(|&i| candidates[i].tree.clone()).collect();
    for (i, f) in fresh.into_iter().zip(population_fitness(&fresh_trees, dataset)) {
        candidates[i].cached = Some(f);
    }

    let mut stats = GenerationStats::from_candidates(&candidates);
    stats.best_before = Some(pop.fitness[0]);
    let mut trees = Vec::with_capacity(pop.len());
    let mut fitness = Vec::with_capacity(pop.len());
    for (i, (candidate, slot)) in candidates.into_iter().zip(slots.iter_mut()).enumerate() {
        let f_new = candidate.cached.expect("evaluated above");
        if metropolis_accept(f_new, pop.fitness[i], temperature, slot) {
            stats.acceptances += 1;
            trees.push(candidate.tree);
            fitness.push(f_new);
        } else {
            trees.push(pop.trees[i].clone());
            fitness.push(pop.fitness[i]);
        }
    }
    let next = Population::new(trees, fitness);
    stats.best_after = Some(next.fitness[0]);
    (next, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{BoxSpec, Dataset};
    use crate::expr::parse_infix;
    use crate::rng::stream;

    fn pop_of(fitness: &[f64]) -> Population {
        let trees = fitness.iter().map(|_| ExprTree::r()).collect();
        Population::new(trees, fitness.iter().map(|&f| Fitness::new(f)).collect())
    }

    #[test]
    fn sorting_prefers_fitness_then_size() {
        let trees = vec![
            parse_infix("R + 1").unwrap(),
            parse_infix("R").unwrap(),
            parse_infix("R * 2").unwrap(),
            parse_infix("3").unwrap(),
        ];
        let fitness = [-1.0, -1.0, f64::NAN, -0.5].map(Fitness::new).to_vec();
        let pop = Population::new(trees, fitness);
        let order: Vec<String> = pop.trees().iter().map(|t| t.to_infix()).collect();
        assert_eq!(order, ["3", "R", "R + 1", "R*2"]);
        assert!(pop.is_sorted());
    }

    #[test]
    fn single_member_tournament() {
        let pop = pop_of(&[-3.0]);
        let mut rng = stream(1, 0);
        assert!((0..100).all(|_| tournament_select(&pop, &mut rng) == 0));
    }

    #[test]
    fn metropolis_edges() {
        let mut rng = stream(2, 0);
        let t = Temperature::new(1.0);
        let f = Fitness::new;
        assert!(metropolis_accept(f(-1.0), f(-2.0), t, &mut rng));
        assert!(metropolis_accept(f(-1.0), f(-1.0), t, &mut rng));
        assert!(metropolis_accept(f(-1.0), Fitness::WORST, t, &mut rng));
        assert!(!metropolis_accept(Fitness::WORST, f(-1.0), t, &mut rng));
        assert!(!metropolis_accept(Fitness::WORST, Fitness::WORST, t, &mut rng));
        let cold = Temperature::new(1e-12);
        assert!((0..1000).all(|_| !metropolis_accept(f(-1.0 - 1e-9), f(-1.0), cold, &mut rng)));
    }

    #[test]
    fn lone_member_pass_through_copies_best() {
        let pop = pop_of(&[-2.0]);
        // Find a seed whose first coin is heads (pass-through).
        for seed in 0..64 {
            let mut slots = vec![stream(seed, 0)];
            let mut probe = slots[0].clone();
            if !probe.random_bool(0.5) {
                continue;
            }
            let out = generation_stage(&pop, DepthLimits::new(1, 4).unwrap(), &mut slots);
            assert_eq!(out.len(), 1);
            assert_eq!(out[0].origin, Origin::PassThrough);
            assert_eq!(out[0].tree, pop.trees()[0]);
            return;
        }
        panic!("no pass-through seed found");
    }

    #[test]
    fn pass_through_follows_fitness_order() {
        let trees: Vec<ExprTree> = (0..50).map(ExprTree::constant).collect();
        let fitness = (0..50).map(|i| Fitness::new(-(i as f64))).collect();
        let pop = Population::new(trees, fitness);
        let mut parent = stream(8, 0);
        let mut slots = slot_streams(&mut parent, 50);
        let out = generation_stage(&pop, DepthLimits::new(1, 4).unwrap(), &mut slots);
        let copied: Vec<&ExprTree> =
            out.iter().filter(|c| c.origin == Origin::PassThrough).map(|c| &c.tree).collect();
        let expected: Vec<&ExprTree> = pop.trees()[..copied.len()].iter().collect();
        assert_eq!(copied, expected);
    }

    #[test]
    fn mutation_probability_overrides() {
        let space = TreeSpace::default();
        let tree = parse_infix("(R + 1) * (R - 2)").unwrap();
        let make = || {
            (0..20)
                .map(|_| Candidate {
                    tree: tree.clone(),
                    origin: Origin::PassThrough,
                    mutated: false,
                    cached: None,
                })
                .collect::<Vec<_>>()
        };
        let mut parent = stream(3, 0);
        let mut none = make();
        mutation_stage(&mut none, space, 0.0, &mut slot_streams(&mut parent, 20));
        assert!(none.iter().all(|c| !c.mutated && c.tree == tree));
        let mut all = make();
        mutation_stage(&mut all, space, 1.0, &mut slot_streams(&mut parent, 20));
        assert!(all.iter().all(|c| c.mutated && space.limits.contains(c.tree.depth())));
    }

    #[test]
    fn identical_members_keep_fitness() {
        let d = Dataset::build(BoxSpec::default(), 2, 1).unwrap();
        let t = parse_infix("(R - 1) * 2").unwrap();
        let pop = Population::evaluate(vec![t.clone(), t], &d);
        let mut rng = stream(4, 0);
        let (next, stats) = step(&pop, Temperature::new(1e-12), TreeSpace::default(), &d, &mut rng);
        assert_eq!(next.len(), 2);
        assert!(next.fitness()[0].value() >= pop.fitness()[0].value());
        assert_eq!(stats.pass_throughs + stats.crossovers, 2);
    }
}
