//! Built-in experiment grids.

use clap::ValueEnum;
use subspace_rip::montecarlo::{ExperimentConfig, ExperimentKind};
use subspace_rip::ProjectionMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Projected affinity histograms at aff² = 1, 2, 3, 4.
    Fig4,
    /// Affinity sweeps over several (d1, d2).
    Fig5,
    /// Spread of the projected affinity over an (N, n) grid.
    Fig6,
}

impl Figure {
    pub fn default_trials(self, full_scale: bool) -> u64 {
        match (self, full_scale) {
            (Figure::Fig4, false) => 10_000,
            (Figure::Fig4, true) => 100_000,
            (Figure::Fig5, _) => 500,
            (Figure::Fig6, false) => 2_000,
            (Figure::Fig6, true) => 10_000,
        }
    }
}

pub const FIG5_DIMS: [(usize, usize); 4] = [(1, 10), (3, 3), (5, 10), (10, 20)];
pub const FIG5_STEPS: usize = 10;

pub fn fig4(trials: u64, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::PairConcentration, trials, seed);
    c.ambient_dim = Some(500);
    c.n = Some(200);
    c.d1 = Some(5);
    c.d2 = Some(10);
    c.affinity_sq_grid = Some(vec![1.0, 2.0, 3.0, 4.0]);
    c.epsilons = vec![1.0, 1.5];
    c
}

/// One sweep per `(d1, d2)`, from orthogonal to fully overlapping.
pub fn fig5(trials: u64, seed: u64) -> Vec<(String, ExperimentConfig)> {
    FIG5_DIMS
        .iter()
        .map(|&(d1, d2)| {
            let mut c = ExperimentConfig::new(ExperimentKind::AffinitySweep, trials, seed);
            c.ambient_dim = Some(500);
            c.n = Some(200);
            c.d1 = Some(d1);
            c.d2 = Some(d2);
            c.affinity_sq_grid = Some(
                (0..=FIG5_STEPS)
                    .map(|k| d1 as f64 * k as f64 / FIG5_STEPS as f64)
                    .collect(),
            );
            (format!("d1_{d1}_d2_{d2}"), c)
        })
        .collect()
}

/// Projects with the full `n × N` matrix so that `N` really enters each trial.
pub fn fig6(trials: u64, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::AmbientSweep, trials, seed);
    c.ambient_list = Some(vec![500, 1000, 2000]);
    c.n_list = Some(vec![100, 200, 300, 400]);
    c.d1 = Some(5);
    c.d2 = Some(10);
    c.affinity_sq = Some(2.0);
    c.projection = Some(ProjectionMode::Full);
    c
}

/// The four probability lemmas at `n = 200`, each with two non-vacuous `ε`.
pub fn lemma_suite(trials: u64, seed: u64) -> Vec<(String, ExperimentConfig)> {
    let base = |kind| {
        let mut c = ExperimentConfig::new(kind, trials, seed);
        c.n = Some(200);
        c
    };
    let mut f = base(ExperimentKind::LemmaFRatio);
    f.epsilons = vec![0.3, 0.5];
    let mut angle = base(ExperimentKind::LemmaAngle);
    angle.epsilons = vec![0.1, 0.15];
    let mut support = base(ExperimentKind::LemmaSupportNorm);
    support.d1 = Some(5);
    support.epsilons = vec![0.02, 0.05];
    let mut corr = base(ExperimentKind::LemmaCorrRatio);
    corr.omega = Some(0.5);
    corr.epsilons = vec![0.3, 0.5];
    vec![
        ("f_ratio".to_string(), f),
        ("angle".to_string(), angle),
        ("support_norm".to_string(), support),
        ("corr_ratio".to_string(), corr),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        fig4(10, 1).validate().unwrap();
        fig6(10, 1).validate().unwrap();
        for (_, c) in fig5(10, 1).iter().chain(lemma_suite(10, 1).iter()) {
            c.validate().unwrap();
        }
        assert_eq!(fig4(10, 1).subspace_cells().unwrap().len(), 4);
        assert_eq!(fig5(10, 1)[2].1.subspace_cells().unwrap().len(), FIG5_STEPS + 1);
        assert_eq!(fig6(10, 1).subspace_cells().unwrap().len(), 12);
    }
}
