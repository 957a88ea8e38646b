//! Flat key/value configuration files (TOML syntax). Every key is optional
//! and defaults to the reference experiment; unknown keys are rejected.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use serde::{Deserialize, Serialize};

use ptgp::expr::{parse_infix, DepthLimits};
use ptgp::tempering::{AdaptiveSpec, LadderScheme, LadderSpec, PlantedTree, RunConfig, SwapPolicy};
use ptgp::BoxSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub n_atoms: usize,
    pub box_length: f64,
    pub d_min: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    pub epsilon: f64,
    pub sigma: f64,
    pub k_box: usize,
    pub seed: u64,
}

impl Default for DataConfig {
    fn default() -> Self {
        let spec = BoxSpec::default();
        DataConfig {
            n_atoms: spec.n_atoms,
            box_length: spec.box_length,
            d_min: spec.d_min,
            r_lo: spec.r_lo,
            r_hi: spec.r_hi,
            epsilon: spec.epsilon,
            sigma: spec.sigma,
            k_box: 10,
            seed: 1,
        }
    }
}

impl DataConfig {
    pub fn box_spec(&self) -> BoxSpec {
        BoxSpec {
            n_atoms: self.n_atoms,
            box_length: self.box_length,
            d_min: self.d_min,
            r_lo: self.r_lo,
            r_hi: self.r_hi,
            epsilon: self.epsilon,
            sigma: self.sigma,
        }
    }
}

/// Mirrors [`RunConfig`] field for field, flattened.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunFile {
    pub t_min: f64,
    pub t_max: f64,
    pub n_replicas: usize,
    pub ladder_scheme: LadderScheme,
    pub adaptive: bool,
    pub adapt_band_lo: f64,
    pub adapt_band_hi: f64,
    pub adapt_interval: usize,
    pub population_size: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub p_max: i64,
    pub dataset_path: Option<PathBuf>,
    pub seed: u64,
    pub max_generations: usize,
    pub convergence_mse: f64,
    pub swap_attempts: usize,
    pub swap_policy: SwapPolicy,
    pub threads: usize,
    /// Test hook: infix tree injected into one initial population.
    pub plant_tree: Option<String>,
    pub plant_replica: usize,
}

impl Default for RunFile {
    fn default() -> Self {
        let c = RunConfig::default();
        RunFile {
            t_min: c.ladder.t_min,
            t_max: c.ladder.t_max,
            n_replicas: c.ladder.n_replicas,
            ladder_scheme: c.ladder.scheme,
            adaptive: c.adaptive.enabled,
            adapt_band_lo: c.adaptive.band_lo,
            adapt_band_hi: c.adaptive.band_hi,
            adapt_interval: c.adaptive.interval,
            population_size: c.population_size,
            k_min: c.limits.k_min(),
            k_max: c.limits.k_max(),
            p_max: c.p_max,
            dataset_path: None,
            seed: c.seed,
            max_generations: c.max_generations,
            convergence_mse: c.convergence_mse,
            swap_attempts: c.swap_attempts,
            swap_policy: c.swap_policy,
            threads: c.threads,
            plant_tree: None,
            plant_replica: 0,
        }
    }
}

impl RunFile {
    pub fn to_run_config(&self) -> Result<RunConfig> {
        let limits = DepthLimits::new(self.k_min, self.k_max)?;
        let planted = match &self.plant_tree {
            Some(text) => Some(PlantedTree {
                tree: parse_infix(text).map_err(|e| anyhow!("plant_tree: {e}"))?,
                replica: self.plant_replica,
            }),
            None => None,
        };
        let config = RunConfig {
            ladder: LadderSpec {
                t_min: self.t_min,
                t_max: self.t_max,
                n_replicas: self.n_replicas,
                scheme: self.ladder_scheme,
            },
            adaptive: AdaptiveSpec {
                enabled: self.adaptive,
                band_lo: self.adapt_band_lo,
                band_hi: self.adapt_band_hi,
                interval: self.adapt_interval,
            },
            population_size: self.population_size,
            limits,
            p_max: self.p_max,
            seed: self.seed,
            max_generations: self.max_generations,
            convergence_mse: self.convergence_mse,
            swap_attempts: self.swap_attempts,
            swap_policy: self.swap_policy,
            threads: self.threads,
            planted,
        };
        config.validate()?;
        Ok(config)
    }
}

pub fn load<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}
