//! Grey Wolf Optimizer, differential evolution (DE/rand/1/bin, DE/best/1/bin,
//! jDE) and the GWO-DE hybrid that switches between them when the search
//! stagnates, plus the classical benchmark suite and a reproducible
//! experiment harness.
//!
//! ```
//! use gwo_de::{run_trial, FunctionRef, Problem, RunConfig, Catalog};
//!
//! let config = RunConfig { np: 20, max_iterations: 50, trials: 1, dimension: 5, ..RunConfig::default() };
//! let problem = Problem::resolve(&Catalog::classical(), "sphere", 5, config.base_seed).unwrap();
//! let trace = run_trial("gwo_de", &problem, &config, 0).unwrap();
//! assert_eq!(trace.evaluations_used, config.budget());
//! # let _ = FunctionRef::new("sphere", 5);
//! ```

pub mod benchmarks;
pub mod cli;
pub mod de;
pub mod error;
pub mod gwo;
pub mod harness;
pub mod hybrid;
pub mod objective;
pub mod population;
pub mod rng;
pub mod stats;

pub use benchmarks::{Catalog, FunctionDef, ObjectiveFunction, Optimum, Transform};
pub use de::{DeControl, DeStrategy, JdeConfig};
pub use error::{Error, Result};
pub use harness::{
    compute_error, run_experiment, run_trial, trial_seed, Algorithm, CellResult, Experiment, ExperimentResult,
    FunctionRef, Optimizer, Problem, Registry, RunConfig, TrialTrace,
};
pub use hybrid::{run_gwo_de, HybridMode, HybridState, ModeSwitch, SwitchThresholds};
pub use objective::{Evaluator, FnObjective, Objective};
pub use population::{Candidate, Population, SearchSpace};
pub use rng::RngStream;
pub use stats::{friedman_ranks, RankingEntry, RankingTable};
