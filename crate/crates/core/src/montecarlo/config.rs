use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projection::ProjectionMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    PairConcentration,
    AffinitySweep,
    AmbientSweep,
    RipPair,
    RipSet,
    LemmaFRatio,
    LemmaAngle,
    LemmaSupportNorm,
    LemmaCorrRatio,
}

impl ExperimentKind {
    pub fn is_lemma(self) -> bool {
        matches!(
            self,
            ExperimentKind::LemmaFRatio
                | ExperimentKind::LemmaAngle
                | ExperimentKind::LemmaSupportNorm
                | ExperimentKind::LemmaCorrRatio
        )
    }

    pub fn is_rip(self) -> bool {
        matches!(self, ExperimentKind::RipPair | ExperimentKind::RipSet)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetModeName {
    #[default]
    Independent,
    Prescribed,
}

/// One experiment, as read from a JSON config.
///
/// Subspace experiments run one cell per point of the grid
/// `N_list × n_list × affinity grid`; scalar fields are one-point lists.
/// Affinities may be given plain (`affinity`, `affinity_grid`), squared
/// (`affinity_sq`, `affinity_sq_grid`), or as explicit cosines (`spectrum`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub ambient_dim: Option<usize>,
    #[serde(rename = "N_list", default, skip_serializing_if = "Option::is_none")]
    pub ambient_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<usize>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub set_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affinity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affinity_sq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affinity_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affinity_sq_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_mode: Option<SetModeName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default)]
    pub epsilons: Vec<f64>,
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<ProjectionMode>,
    /// Fixed histogram bin count; Freedman-Diaconis when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 42;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Affinity target of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub enum AffinityTarget {
    Squared(f64),
    Spectrum(Vec<f64>),
}

impl AffinityTarget {
    pub fn affinity_sq(&self) -> f64 {
        match self {
            AffinityTarget::Squared(a) => *a,
            AffinityTarget::Spectrum(c) => c.iter().map(|x| x * x).sum(),
        }
    }
}

/// A fully resolved grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSpec {
    pub ambient_dim: usize,
    pub n: usize,
    pub d1: usize,
    pub d2: usize,
    pub target: AffinityTarget,
    /// Position of `target` in the affinity grid; cells sharing it share their geometry.
    pub target_index: usize,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    /// Bare config with no geometry; fill in the fields the kind needs.
    pub fn new(kind: ExperimentKind, trials: u64, master_seed: u64) -> Self {
        ExperimentConfig {
            kind,
            ambient_dim: None,
            ambient_list: None,
            n: None,
            n_list: None,
            d1: None,
            d2: None,
            set_size: None,
            affinity: None,
            affinity_sq: None,
            affinity_grid: None,
            affinity_sq_grid: None,
            spectrum: None,
            set_mode: None,
            omega: None,
            epsilons: Vec::new(),
            trials,
            master_seed,
            projection: None,
            bins: None,
        }
    }

    pub fn projection_mode(&self) -> ProjectionMode {
        self.projection.unwrap_or_default()
    }

    pub fn n_values(&self) -> Result<Vec<usize>> {
        match (&self.n, &self.n_list) {
            (Some(_), Some(_)) => Err(config_err("give either n or n_list, not both")),
            (Some(n), None) => Ok(vec![*n]),
            (None, Some(list)) if !list.is_empty() => Ok(list.clone()),
            _ => Err(config_err("missing n / n_list")),
        }
    }

    fn ambient_values(&self) -> Result<Vec<usize>> {
        match (&self.ambient_dim, &self.ambient_list) {
            (Some(_), Some(_)) => Err(config_err("give either N or N_list, not both")),
            (Some(n), None) => Ok(vec![*n]),
            (None, Some(list)) if !list.is_empty() => Ok(list.clone()),
            _ => Err(config_err("missing N / N_list")),
        }
    }

    fn targets(&self, d1: usize) -> Result<Vec<AffinityTarget>> {
        let mut sources = Vec::new();
        if let Some(a) = self.affinity {
            sources.push(vec![AffinityTarget::Squared(a * a)]);
        }
        if let Some(a) = self.affinity_sq {
            sources.push(vec![AffinityTarget::Squared(a)]);
        }
        if let Some(g) = &self.affinity_grid {
            sources.push(g.iter().map(|a| AffinityTarget::Squared(a * a)).collect());
        }
        if let Some(g) = &self.affinity_sq_grid {
            sources.push(g.iter().map(|&a| AffinityTarget::Squared(a)).collect());
        }
        if let Some(s) = &self.spectrum {
            if s.len() != d1 {
                return Err(config_err(format!("spectrum has {} cosines, d1 = {d1}", s.len())));
            }
            sources.push(vec![AffinityTarget::Spectrum(s.clone())]);
        }
        match sources.len() {
            0 if self.kind == ExperimentKind::RipSet
                && self.set_mode.unwrap_or_default() == SetModeName::Independent =>
            {
                Ok(vec![AffinityTarget::Squared(0.0)])
            }
            0 => Err(config_err("missing affinity, affinity_sq, grid, or spectrum")),
            1 => {
                let targets = sources.pop().unwrap();
                if targets.is_empty() {
                    return Err(config_err("affinity grid is empty"));
                }
                for t in &targets {
                    let a = t.affinity_sq();
                    if !(a >= 0.0 && a <= d1 as f64 + 1e-12) {
                        return Err(config_err(format!("affinity² {a} outside [0, {d1}]")));
                    }
                }
                Ok(targets)
            }
            _ => Err(config_err("give exactly one affinity source")),
        }
    }

    /// Expands the grid of a subspace experiment, checking every cell.
    pub fn subspace_cells(&self) -> Result<Vec<CellSpec>> {
        let d1 = self.d1.ok_or_else(|| config_err("missing d1"))?;
        let d2 = match self.kind {
            ExperimentKind::RipSet => self.d2.unwrap_or(d1),
            _ => self.d2.ok_or_else(|| config_err("missing d2"))?,
        };
        if d1 == 0 || d1 > d2 {
            return Err(config_err(format!("need 1 ≤ d1 ≤ d2, got {d1}, {d2}")));
        }
        if self.kind == ExperimentKind::RipSet && d1 != d2 {
            return Err(config_err("rip_set uses a single dimension; set d2 = d1 or omit it"));
        }
        let ambients = self.ambient_values()?;
        let ns = self.n_values()?;
        let targets = self.targets(d1)?;
        let mut cells = Vec::new();
        for &ambient_dim in &ambients {
            for &n in &ns {
                if n <= d2 || n >= ambient_dim {
                    if ambients.len() > 1 || ns.len() > 1 {
                        continue;
                    }
                    return Err(config_err(format!(
                        "need d2 < n < N, got d2={d2}, n={n}, N={ambient_dim}"
                    )));
                }
                for (target_index, t) in targets.iter().enumerate() {
                    cells.push(CellSpec {
                        ambient_dim,
                        n,
                        d1,
                        d2,
                        target: t.clone(),
                        target_index,
                    });
                }
            }
        }
        if cells.is_empty() {
            return Err(config_err("grid has no feasible (N, n) cell with d2 < n < N"));
        }
        Ok(cells)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(config_err("trials must be at least 1"));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(config_err(format!("epsilon {e} is not positive")));
        }
        if self.bins == Some(0) {
            return Err(config_err("bins must be positive"));
        }
        if self.kind.is_lemma() {
            for n in self.n_values()? {
                if n < 5 {
                    return Err(config_err("lemma checks need n ≥ 5"));
                }
            }
            if self.kind == ExperimentKind::LemmaSupportNorm {
                let d = self.d1.ok_or_else(|| config_err("support-norm check needs d1"))?;
                if d == 0 || self.n_values()?.iter().any(|&n| d > n) {
                    return Err(config_err("support size d1 must lie in 1..=n"));
                }
            }
            if self.kind == ExperimentKind::LemmaCorrRatio {
                let w = self.omega.unwrap_or(0.0);
                if !(0.0..=1.0).contains(&w) {
                    return Err(config_err("omega must lie in [0, 1]"));
                }
            }
            return Ok(());
        }
        if self.kind == ExperimentKind::RipSet {
            match self.set_size {
                Some(l) if l >= 2 => {}
                _ => return Err(config_err("rip_set needs L ≥ 2")),
            }
        }
        self.subspace_cells().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig4() -> ExperimentConfig {
        let mut c = ExperimentConfig::new(ExperimentKind::PairConcentration, 10, 1);
        c.ambient_dim = Some(500);
        c.n = Some(200);
        c.d1 = Some(5);
        c.d2 = Some(10);
        c.affinity_sq = Some(2.0);
        c.epsilons = vec![0.5];
        c
    }

    #[test]
    fn parses_documented_schema() {
        let json = r#"{"kind":"pair_concentration","N":500,"n":200,"d1":5,"d2":10,
            "affinity":2.0,"epsilons":[0.5,1.0],"trials":100,"master_seed":7}"#;
        let c: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.kind, ExperimentKind::PairConcentration);
        c.validate().unwrap();
        let cells = c.subspace_cells().unwrap();
        assert_eq!(cells.len(), 1);
        assert!((cells[0].target.affinity_sq() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_values() {
        let json = r#"{"kind":"pair_concentration","bogus":1,"trials":1}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(json).is_err());
        let mut c = fig4();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = fig4();
        c.epsilons = vec![0.0];
        assert!(c.validate().is_err());
        let mut c = fig4();
        c.affinity = Some(1.0);
        assert!(c.validate().is_err());
        let mut c = fig4();
        c.n = Some(600);
        assert!(c.validate().is_err());
        let mut c = fig4();
        c.affinity_sq = Some(6.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn grid_skips_infeasible_cells() {
        let mut c = fig4();
        c.ambient_dim = None;
        c.ambient_list = Some(vec![300, 500]);
        c.n = None;
        c.n_list = Some(vec![100, 400]);
        let cells = c.subspace_cells().unwrap();
        let pairs: Vec<_> = cells.iter().map(|c| (c.ambient_dim, c.n)).collect();
        assert_eq!(pairs, vec![(300, 100), (500, 100), (500, 400)]);
    }
}
