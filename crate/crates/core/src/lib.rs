//! Symbolic search for pair-potential functional forms.
//!
//! Populations of algebraic expression trees in the pair distance `R` are
//! evolved by a genetic program whose selection step is a Metropolis test,
//! and a ladder of such populations at different temperatures exchanges
//! trees by replica exchange. Fitness is the negative mean squared error of
//! predicted box energies against a manufactured Lennard-Jones training set.
//!
//! ```
//! use ptgp::dataset::{BoxSpec, Dataset};
//! use ptgp::expr::parse_infix;
//! use ptgp::fitness::tree_fitness;
//!
//! let data = Dataset::build(BoxSpec::default(), 10, 42).unwrap();
//! let lj = parse_infix("4*(1/R^12) - 4*(1/R^6)").unwrap();
//! assert!(tree_fitness(&lj, &data).mse() < 1e-18);
//! ```

pub mod dataset;
pub mod engine;
pub mod expr;
pub mod fitness;
pub mod float17;
pub mod rng;
pub mod tempering;

pub use dataset::{BoxSpec, Dataset};
pub use engine::{Population, Temperature, TreeSpace};
pub use expr::{parse_infix, DepthLimits, ExprTree, Leaf, Operator};
pub use fitness::{compile, tree_fitness, CompiledProgram, Fitness};
pub use tempering::{run, LadderScheme, LadderSpec, RunConfig, RunResult, SwapPolicy};
