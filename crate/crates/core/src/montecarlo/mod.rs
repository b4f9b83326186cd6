//! Deterministic Monte Carlo experiments.
//!
//! Every cell of an experiment owns a seed derived from the master seed and
//! its position in the grid; trial `t` of that cell uses the seed derived
//! from the cell seed and `t`. Trials run on a rayon pool and are reduced in
//! trial order, so results do not depend on the number of workers.

mod config;
mod runner;
mod summary;

pub use config::{AffinityTarget, CellSpec, ExperimentConfig, ExperimentKind, SetModeName, DEFAULT_SEED};
pub use runner::{
    run_affinity_sweep, run_ambient_sweep, run_experiment, run_lemma_checks, run_pair_concentration,
    run_rip, RunOptions,
};
pub use summary::{
    CellInfo, EpsilonRow, ExperimentReport, ExperimentSummary, Histogram, MomentCheck, TrialRecord,
    ASSERT_MIN_N, BINOMIAL_SLACK, MAX_BINS,
};
