use std::time::Instant;

use rayon::prelude::*;

use super::config::{AffinityTarget, CellSpec, ExperimentConfig, ExperimentKind, SetModeName};
use super::summary::{
    mean_std, CellInfo, EpsilonRow, ExperimentReport, ExperimentSummary, Histogram, MomentCheck,
    TrialRecord,
};
use crate::error::{Error, Result};
use crate::estimators::{
    bound_p1, bound_p2, bound_p3, deviation_event, est_affinity_sq, est_distance_sq, rip_pair_bound,
    rip_set_bound, BoundKind, PairParams,
};
use crate::generator::{make_pair, make_set, PairSpec, SetMode, SubspacePair};
use crate::projection::{ProjectionMode, SubspaceFamily};
use crate::rng::{self, derive_seed};
use crate::subspace::{affinity_sq, Subspace};

/// Stream index under the master seed reserved for fixed geometry.
const GEOMETRY_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
    /// Keep per-trial records in the summaries.
    pub keep_records: bool,
}

impl RunOptions {
    pub fn with_threads(threads: usize) -> Self {
        RunOptions {
            threads: Some(threads),
            keep_records: false,
        }
    }
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    opts: &'a RunOptions,
    pool: rayon::ThreadPool,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a ExperimentConfig, opts: &'a RunOptions) -> Result<Self> {
        cfg.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads.unwrap_or(0))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(Ctx { cfg, opts, pool })
    }

    fn cell_master(&self, cell_index: usize) -> u64 {
        derive_seed(self.cfg.master_seed, cell_index as u64)
    }

    /// Seed of the fixed subspaces. It depends on the affinity target only, so
    /// cells that differ in `N` or `n` compare the same principal angles.
    fn geometry_seed(&self, cell: &CellSpec) -> u64 {
        derive_seed(derive_seed(self.cfg.master_seed, GEOMETRY_STREAM), cell.target_index as u64)
    }

    /// Runs `trial` for every trial index in parallel and returns the
    /// statistic in trial order.
    fn trials<F>(&self, cell_master: u64, trial: F) -> Result<Vec<f64>>
    where
        F: Fn(u64) -> Result<f64> + Sync,
    {
        self.pool.install(|| {
            (0..self.cfg.trials)
                .into_par_iter()
                .map(|t| {
                    trial(derive_seed(cell_master, t)).map_err(|e| Error::Trial {
                        index: t,
                        source: Box::new(e),
                    })
                })
                .collect()
        })
    }

    fn records(&self, cell_master: u64, measured: &[f64], estimate: f64) -> Option<Vec<TrialRecord>> {
        self.opts.keep_records.then(|| {
            measured
                .iter()
                .enumerate()
                .map(|(t, &m)| TrialRecord::new(t as u64, derive_seed(cell_master, t as u64), m, estimate))
                .collect()
        })
    }
}

/// One row before its violations are counted.
struct RowSpec {
    epsilon: f64,
    kind: BoundKind,
    threshold: f64,
    bound: f64,
    /// Centre the deviation is measured from.
    center: f64,
    /// Measured values are turned into the event's statistic by `offset − measured`
    /// when set (distance rows), and used directly otherwise.
    reflect: Option<f64>,
}

impl RowSpec {
    fn new(epsilon: f64, kind: BoundKind, threshold: f64, bound: f64, center: f64) -> Self {
        RowSpec {
            epsilon,
            kind,
            threshold,
            bound,
            center,
            reflect: None,
        }
    }

    fn evaluate(&self, measured: &[f64], n: usize) -> EpsilonRow {
        let violations = measured
            .iter()
            .filter(|&&m| {
                let stat = self.reflect.map_or(m, |offset| offset - m);
                (stat - self.center).abs() > self.threshold
            })
            .count() as u64;
        EpsilonRow::evaluate(
            self.epsilon,
            self.kind,
            self.threshold,
            violations,
            measured.len() as u64,
            self.bound,
            n,
        )
    }
}

fn z_score(mean: f64, std: f64, trials: u64, expected: f64) -> f64 {
    let diff = mean - expected;
    if std > 0.0 {
        diff / (std / (trials as f64).sqrt())
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

struct CellOutcome {
    cell: CellInfo,
    statistic: &'static str,
    measured: Vec<f64>,
    estimate: f64,
    rows: Vec<RowSpec>,
    moments: Option<(f64, f64)>,
    cell_master: u64,
}

fn finish(ctx: &Ctx, kind: ExperimentKind, out: CellOutcome, started: Instant) -> ExperimentSummary {
    let trials = out.measured.len() as u64;
    let (mean, std) = mean_std(&out.measured);
    let per_epsilon = out.rows.iter().map(|r| r.evaluate(&out.measured, out.cell.n)).collect();
    let moments = out.moments.map(|(expected_mean, expected_variance)| MomentCheck {
        expected_mean,
        expected_variance,
        sample_mean: mean,
        sample_variance: std * std,
        mean_z: z_score(mean, std, trials, expected_mean),
    });
    ExperimentSummary {
        kind,
        trials,
        statistic: out.statistic.to_string(),
        mean,
        std,
        estimate: out.estimate,
        centering_z: z_score(mean, std, trials, out.estimate),
        histogram: Histogram::build(&out.measured, ctx.cfg.bins),
        per_epsilon,
        moments,
        records: ctx.records(out.cell_master, &out.measured, out.estimate),
        cell: out.cell,
        wall_time_secs: started.elapsed().as_secs_f64(),
    }
}

/// The fixed pair of a concentration or RIP cell.
fn cell_pair(cell: &CellSpec, seed: u64) -> Result<SubspacePair> {
    let spec = match &cell.target {
        AffinityTarget::Spectrum(c) => PairSpec::explicit(cell.ambient_dim, cell.d2, c.clone(), seed),
        // A contained pair has every cosine equal to one; a uniform draw cannot reach it.
        AffinityTarget::Squared(a) if *a >= cell.d1 as f64 - 1e-12 => {
            PairSpec::explicit(cell.ambient_dim, cell.d2, vec![1.0; cell.d1], seed)
        }
        AffinityTarget::Squared(a) => {
            PairSpec::uniform(cell.ambient_dim, cell.d1, cell.d2, a.max(0.0).sqrt(), seed)
        }
    };
    make_pair(&spec)
}

fn concentration_cell(ctx: &Ctx, kind: ExperimentKind, index: usize, cell: &CellSpec) -> Result<ExperimentSummary> {
    let started = Instant::now();
    let cell_master = ctx.cell_master(index);
    let pair = cell_pair(cell, ctx.geometry_seed(cell))?;
    let cosines = pair.spectrum.cosines().to_vec();
    let params = PairParams::with_cosines(cell.d1, cell.d2, cell.n, cosines.clone())?;
    let estimate = est_affinity_sq(&params)?;
    let dist_sq = params.distance_sq();
    let dist_estimate = est_distance_sq(dist_sq, cell.d1, cell.d2, cell.n)?;
    let half_sum = (cell.d1 + cell.d2) as f64 / 2.0;

    let family = SubspaceFamily::new(vec![pair.x1, pair.x2])?;
    let mode = ctx.cfg.projection_mode();
    let measured = ctx.trials(cell_master, |seed| {
        let y = family.project(cell.n, seed, mode)?;
        affinity_sq(&y[0], &y[1])
    })?;

    let mut rows = Vec::new();
    for &eps in &ctx.cfg.epsilons {
        for bound_kind in [BoundKind::PairRelaxed, BoundKind::PairTight, BoundKind::Distance] {
            let report = deviation_event(&params, eps, bound_kind)?;
            let mut row = RowSpec::new(
                eps,
                bound_kind,
                report.deviation_threshold,
                report.probability_bound,
                estimate,
            );
            if bound_kind == BoundKind::Distance {
                row.center = dist_estimate;
                row.reflect = Some(half_sum);
            }
            rows.push(row);
        }
    }
    let info = CellInfo {
        ambient_dim: Some(cell.ambient_dim),
        n: cell.n,
        d1: Some(cell.d1),
        d2: Some(cell.d2),
        affinity_sq: Some(params.aff_sq),
        distance_sq: Some(dist_sq),
        cosines: Some(cosines),
        ..CellInfo::default()
    };
    Ok(finish(
        ctx,
        kind,
        CellOutcome {
            cell: info,
            statistic: "aff_y_sq",
            measured,
            estimate,
            rows,
            moments: None,
            cell_master,
        },
        started,
    ))
}

/// Largest `|D_Y²/D_X² − 1|` over all pairs of the family.
fn max_distortion(family: &SubspaceFamily, reference: &[(usize, usize, f64)], n: usize, seed: u64, mode: ProjectionMode) -> Result<f64> {
    let y = family.project(n, seed, mode)?;
    let mut worst = 0.0f64;
    for &(i, j, dx_sq) in reference {
        let half_sum = (y[i].dim() + y[j].dim()) as f64 / 2.0;
        let dy_sq = half_sum - affinity_sq(&y[i], &y[j])?;
        worst = worst.max((dy_sq / dx_sq - 1.0).abs());
    }
    Ok(worst)
}

fn pairwise_distances(members: &[Subspace]) -> Result<Vec<(usize, usize, f64)>> {
    let mut out = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let half_sum = (members[i].dim() + members[j].dim()) as f64 / 2.0;
            let d_sq = half_sum - affinity_sq(&members[i], &members[j])?;
            if !(d_sq > 1e-12) {
                return Err(Error::Infeasible(format!(
                    "members {i} and {j} coincide; the relative distortion is undefined"
                )));
            }
            out.push((i, j, d_sq));
        }
    }
    Ok(out)
}

fn rip_cell(ctx: &Ctx, index: usize, cell: &CellSpec) -> Result<ExperimentSummary> {
    let started = Instant::now();
    let kind = ctx.cfg.kind;
    let cell_master = ctx.cell_master(index);
    let geometry_seed = ctx.geometry_seed(cell);
    let set_size = match kind {
        ExperimentKind::RipSet => ctx.cfg.set_size.unwrap_or(2),
        _ => 2,
    };
    let (members, info_aff, cosines) = match kind {
        ExperimentKind::RipSet => {
            let mode = match ctx.cfg.set_mode.unwrap_or_default() {
                SetModeName::Independent => SetMode::Independent,
                SetModeName::Prescribed => SetMode::Prescribed(vec![cell.target.affinity_sq().max(0.0).sqrt()]),
            };
            let members = make_set(cell.ambient_dim, cell.d1, set_size, geometry_seed, &mode)?;
            (members, None, None)
        }
        _ => {
            let pair = cell_pair(cell, geometry_seed)?;
            let c = pair.spectrum.cosines().to_vec();
            (vec![pair.x1, pair.x2], Some(pair.spectrum.affinity_sq()), Some(c))
        }
    };
    let reference = pairwise_distances(&members)?;
    let family = SubspaceFamily::new(members)?;
    let mode = ctx.cfg.projection_mode();
    let measured = ctx.trials(cell_master, |seed| max_distortion(&family, &reference, cell.n, seed, mode))?;

    let mut rows = Vec::new();
    for &eps in &ctx.cfg.epsilons {
        let (bound_kind, bound) = match kind {
            ExperimentKind::RipSet => (BoundKind::RipSet, rip_set_bound(cell.d1, set_size, cell.n, eps)?),
            _ => (BoundKind::RipPair, rip_pair_bound(cell.d1, cell.d2, cell.n, eps)?),
        };
        rows.push(RowSpec::new(eps, bound_kind, eps, bound.failure_mass, 0.0));
    }
    let info = CellInfo {
        ambient_dim: Some(cell.ambient_dim),
        n: cell.n,
        d1: Some(cell.d1),
        d2: Some(cell.d2),
        set_size: (kind == ExperimentKind::RipSet).then_some(set_size),
        affinity_sq: info_aff,
        distance_sq: (reference.len() == 1).then(|| reference[0].2),
        cosines,
        ..CellInfo::default()
    };
    Ok(finish(
        ctx,
        kind,
        CellOutcome {
            cell: info,
            statistic: "max_relative_distortion",
            measured,
            estimate: 0.0,
            rows,
            moments: None,
            cell_master,
        },
        started,
    ))
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn lemma_cell(ctx: &Ctx, index: usize, n: usize) -> Result<ExperimentSummary> {
    let started = Instant::now();
    let kind = ctx.cfg.kind;
    let cell_master = ctx.cell_master(index);
    let nf = n as f64;
    let scale = 1.0 / nf.sqrt();
    let omega = ctx.cfg.omega.unwrap_or(0.0);
    let support = ctx.cfg.d1.unwrap_or(1);

    let (statistic, estimate, moments) = match kind {
        ExperimentKind::LemmaFRatio => (
            "f_ratio",
            1.0,
            Some((nf / (nf - 2.0), 4.0 * nf * (nf - 1.0) / ((nf - 2.0).powi(2) * (nf - 4.0)))),
        ),
        ExperimentKind::LemmaAngle => ("abs_cos_angle", 0.0, None),
        ExperimentKind::LemmaSupportNorm => {
            let d = support as f64;
            (
                "support_norm_sq",
                d / nf,
                Some((d / nf, 2.0 * d * (nf - d) / (nf * nf * (nf + 2.0)))),
            )
        }
        ExperimentKind::LemmaCorrRatio => ("corr_ratio", 1.0, None),
        other => return Err(Error::Config(format!("{other:?} is not a lemma check"))),
    };

    let measured = ctx.trials(cell_master, |seed| {
        let mut stream = rng::seeded(seed);
        Ok(match kind {
            ExperimentKind::LemmaFRatio => {
                let a1 = rng::gaussian_vec(&mut stream, n, scale);
                let a2 = rng::gaussian_vec(&mut stream, n, scale);
                sum_sq(&a1) / sum_sq(&a2)
            }
            ExperimentKind::LemmaAngle => {
                let a1 = rng::gaussian_vec(&mut stream, n, scale);
                let a2 = rng::gaussian_vec(&mut stream, n, scale);
                let dot: f64 = a1.iter().zip(&a2).map(|(x, y)| x * y).sum();
                dot.abs() / (sum_sq(&a1) * sum_sq(&a2)).sqrt()
            }
            ExperimentKind::LemmaSupportNorm => {
                let a = rng::gaussian_vec(&mut stream, n, scale);
                let inside = sum_sq(&a[..support]);
                inside / (inside + sum_sq(&a[support..]))
            }
            _ => {
                // Same draw order as the F-ratio, so ω = 0 reproduces it exactly.
                let w = rng::gaussian_vec(&mut stream, n, scale);
                let q = rng::gaussian_vec(&mut stream, n, scale);
                let mix = (1.0 - omega * omega).sqrt();
                let p: Vec<f64> = q.iter().zip(&w).map(|(qi, wi)| omega * qi + mix * wi).collect();
                sum_sq(&p) / sum_sq(&q)
            }
        })
    })?;

    let mut rows = Vec::new();
    for &eps in &ctx.cfg.epsilons {
        rows.push(match kind {
            ExperimentKind::LemmaFRatio => RowSpec::new(eps, BoundKind::P1, eps, bound_p1(eps, n)?, 1.0),
            ExperimentKind::LemmaAngle => RowSpec::new(eps, BoundKind::P3, eps, bound_p3(eps, n)?, 0.0),
            ExperimentKind::LemmaSupportNorm => {
                RowSpec::new(eps, BoundKind::P2, eps, bound_p2(eps, support, n)?, estimate)
            }
            _ => RowSpec::new(eps, BoundKind::P1, (1.0 - omega * omega) * eps, bound_p1(eps, n)?, 1.0),
        });
    }
    let info = CellInfo {
        n,
        d1: (kind == ExperimentKind::LemmaSupportNorm).then_some(support),
        omega: (kind == ExperimentKind::LemmaCorrRatio).then_some(omega),
        ..CellInfo::default()
    };
    Ok(finish(
        ctx,
        kind,
        CellOutcome {
            cell: info,
            statistic,
            measured,
            estimate,
            rows,
            moments,
            cell_master,
        },
        started,
    ))
}

fn concentration(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<ExperimentSummary>> {
    let ctx = Ctx::new(cfg, opts)?;
    cfg.subspace_cells()?
        .iter()
        .enumerate()
        .map(|(i, cell)| concentration_cell(&ctx, cfg.kind, i, cell))
        .collect()
}

/// Projected affinity of one fixed pair over many projectors, per grid cell.
pub fn run_pair_concentration(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<ExperimentSummary>> {
    concentration(cfg, opts)
}

/// Concentration over an affinity grid; each summary's `estimate` traces the estimate curve.
pub fn run_affinity_sweep(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<ExperimentSummary>> {
    concentration(cfg, opts)
}

/// Concentration over an `(N, n)` grid.
pub fn run_ambient_sweep(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<ExperimentSummary>> {
    concentration(cfg, opts)
}

/// Frequency of the `(1 ± ε)` distance sandwich for a pair or a set.
pub fn run_rip(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<ExperimentSummary>> {
    if !cfg.kind.is_rip() {
        return Err(Error::Config(format!("{:?} is not a RIP experiment", cfg.kind)));
    }
    let ctx = Ctx::new(cfg, opts)?;
    cfg.subspace_cells()?
        .iter()
        .enumerate()
        .map(|(i, cell)| rip_cell(&ctx, i, cell))
        .collect()
}

/// One cell per target dimension `n` for the lemma named by `cfg.kind`.
pub fn run_lemma_checks(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<ExperimentSummary>> {
    if !cfg.kind.is_lemma() {
        return Err(Error::Config(format!("{:?} is not a lemma check", cfg.kind)));
    }
    let ctx = Ctx::new(cfg, opts)?;
    cfg.n_values()?
        .into_iter()
        .enumerate()
        .map(|(i, n)| lemma_cell(&ctx, i, n))
        .collect()
}

/// Dispatches on `cfg.kind`.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentReport> {
    let started = Instant::now();
    let cells = match cfg.kind {
        ExperimentKind::PairConcentration => run_pair_concentration(cfg, opts)?,
        ExperimentKind::AffinitySweep => run_affinity_sweep(cfg, opts)?,
        ExperimentKind::AmbientSweep => run_ambient_sweep(cfg, opts)?,
        ExperimentKind::RipPair | ExperimentKind::RipSet => run_rip(cfg, opts)?,
        _ => run_lemma_checks(cfg, opts)?,
    };
    Ok(ExperimentReport {
        config: cfg.clone(),
        all_passed: cells.iter().all(ExperimentSummary::all_passed),
        cells,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}
