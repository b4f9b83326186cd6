//! Command-line front end for `subspace-rip`.

pub mod error;
pub mod io;
pub mod manifest;
pub mod presets;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::Utc;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use subspace_rip::montecarlo::{run_experiment, ExperimentConfig, ExperimentReport, RunOptions, DEFAULT_SEED};
use subspace_rip::{distance, make_pair, principal_angles, PairSpec, Subspace};

use crate::error::{exit, CliError, CliResult};
use crate::manifest::RunManifest;
use crate::presets::Figure;

#[derive(Debug, Parser)]
#[command(name = "subspace-rip", version, about = "Subspace affinity under Gaussian random projection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Principal angles, affinity and distance of two bases.
    Geometry {
        /// CSV basis file; holds both bases (blank-line separated) when no second file is given.
        first: PathBuf,
        second: Option<PathBuf>,
    },
    /// Generate a pair with a prescribed affinity and write both bases as CSV.
    Generate(GenerateArgs),
    /// Run an experiment from a JSON config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: RunArgs,
    },
    /// Run a built-in figure grid.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
        #[command(flatten)]
        common: RunArgs,
        /// Use the large trial counts (10⁵ for fig4, 10⁴ for fig6).
        #[arg(long)]
        full_scale: bool,
    },
    /// Run a lemma config, or the built-in lemma suite when none is given.
    LemmaChecks {
        config: Option<PathBuf>,
        #[command(flatten)]
        common: RunArgs,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed (default: the config's, else 42).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = "SUBSPACE_RIP_THREADS")]
    pub threads: Option<usize>,
    /// Include per-trial records in summary.json.
    #[arg(long)]
    pub records: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long = "ambient", short = 'N')]
    pub ambient_dim: usize,
    #[arg(long)]
    pub d1: usize,
    #[arg(long)]
    pub d2: usize,
    /// Target affinity (not squared).
    #[arg(long, conflicts_with = "cosines")]
    pub affinity: Option<f64>,
    /// Explicit principal-angle cosines, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub cosines: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct GeometryReport {
    pub cosines: Vec<f64>,
    pub affinity: f64,
    pub affinity_sq: f64,
    pub distance: f64,
    pub distance_sq: f64,
}

pub fn geometry(a: &Subspace, b: &Subspace) -> CliResult<GeometryReport> {
    let spectrum = principal_angles(a, b)?;
    let affinity_sq = spectrum.affinity_sq();
    let distance = distance(a, b)?;
    Ok(GeometryReport {
        cosines: spectrum.cosines().to_vec(),
        affinity: affinity_sq.sqrt(),
        affinity_sq,
        distance,
        distance_sq: distance * distance,
    })
}

fn cmd_geometry(first: &Path, second: Option<&Path>) -> CliResult<i32> {
    let mut bases = io::read_bases(first)?;
    if let Some(p) = second {
        bases.extend(io::read_bases(p)?);
    }
    if bases.len() != 2 {
        return Err(CliError::Usage(format!("expected two bases, found {}", bases.len())));
    }
    let a = Subspace::from_columns(&bases[0])?;
    let b = Subspace::from_columns(&bases[1])?;
    print!("{}", io::to_json(&geometry(&a, &b)?));
    Ok(exit::SUCCESS)
}

fn cmd_generate(args: &GenerateArgs) -> CliResult<i32> {
    let spec = match (&args.cosines, args.affinity) {
        (Some(c), _) => {
            if c.len() != args.d1 {
                return Err(CliError::Usage(format!("--cosines needs {} values", args.d1)));
            }
            PairSpec::explicit(args.ambient_dim, args.d2, c.clone(), args.seed)
        }
        (None, Some(a)) => PairSpec::uniform(args.ambient_dim, args.d1, args.d2, a, args.seed),
        (None, None) => return Err(CliError::Usage("give --affinity or --cosines".into())),
    };
    let pair = make_pair(&spec)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let x1 = args.out.join("x1.csv");
    let x2 = args.out.join("x2.csv");
    io::write_file(&x1, &io::basis_csv(pair.x1.basis()))?;
    io::write_file(&x2, &io::basis_csv(pair.x2.basis()))?;
    let report = serde_json::json!({
        "cosines": pair.spectrum.cosines(),
        "affinity": pair.spectrum.affinity(),
        "affinity_sq": pair.spectrum.affinity_sq(),
        "files": [x1, x2],
    });
    print!("{}", io::to_json(&report));
    Ok(exit::SUCCESS)
}

pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
}

fn apply_overrides(cfg: &mut ExperimentConfig, common: &RunArgs) {
    if let Some(t) = common.trials {
        cfg.trials = t;
    }
    if let Some(s) = common.seed {
        cfg.master_seed = s;
    }
}

fn options(common: &RunArgs) -> RunOptions {
    RunOptions {
        threads: common.threads,
        keep_records: common.records,
    }
}

/// Lines describing every failed assertion.
pub fn failure_lines(report: &ExperimentReport) -> Vec<String> {
    let mut lines = Vec::new();
    for (i, s) in report.cells.iter().enumerate() {
        for r in s.failed_rows() {
            let mut line = String::new();
            let _ = write!(
                line,
                "cell {i} (n={}): {} at epsilon={} violated {} of {} trials ({:.4}) against bound {:.4}",
                s.cell.n,
                r.threshold_kind.as_str(),
                r.epsilon,
                r.violations,
                s.trials,
                r.empirical_violation,
                r.theoretical_bound
            );
            lines.push(line);
        }
    }
    lines
}

/// Runs one config and writes its artifacts plus manifest into `out`.
pub fn execute(cfg: &ExperimentConfig, opts: &RunOptions, out: &Path) -> CliResult<(ExperimentReport, Vec<PathBuf>)> {
    let started = Utc::now();
    let report = run_experiment(cfg, opts)?;
    let mut outputs = io::write_report(out, &report)?;
    let manifest_path = out.join("manifest.json");
    outputs.push(manifest_path.clone());
    let manifest = RunManifest::new(cfg, started, outputs.clone());
    io::write_file(&manifest_path, &io::to_json(&manifest))?;
    Ok((report, outputs))
}

fn verdict(reports: &[&ExperimentReport]) -> i32 {
    let failures: Vec<String> = reports.iter().flat_map(|r| failure_lines(r)).collect();
    if failures.is_empty() {
        exit::SUCCESS
    } else {
        for f in &failures {
            eprintln!("assertion failed: {f}");
        }
        exit::ASSERTION
    }
}

fn cmd_run(config: &Path, common: &RunArgs) -> CliResult<i32> {
    let mut cfg = load_config(config)?;
    apply_overrides(&mut cfg, common);
    let (report, _) = execute(&cfg, &options(common), &common.out)?;
    eprintln!("wrote {} cell(s) to {}", report.cells.len(), common.out.display());
    Ok(verdict(&[&report]))
}

fn cmd_lemma_checks(config: Option<&Path>, common: &RunArgs) -> CliResult<i32> {
    let seed = common.seed.unwrap_or(DEFAULT_SEED);
    let configs = match config {
        Some(path) => {
            let cfg = load_config(path)?;
            if !cfg.kind.is_lemma() {
                return Err(CliError::Usage(format!("{path:?} is not a lemma config")));
            }
            vec![(String::new(), cfg)]
        }
        None => presets::lemma_suite(common.trials.unwrap_or(100_000), seed),
    };
    let mut reports = Vec::new();
    for (label, mut cfg) in configs {
        apply_overrides(&mut cfg, common);
        let (report, _) = execute(&cfg, &options(common), &common.out.join(label))?;
        reports.push(report);
    }
    Ok(verdict(&reports.iter().collect::<Vec<_>>()))
}

fn cell_label(s: &subspace_rip::montecarlo::ExperimentSummary) -> String {
    let c = &s.cell;
    let mut label = format!("N{}_n{}", c.ambient_dim.unwrap_or(0), c.n);
    if let Some(a) = c.affinity_sq {
        let _ = write!(label, "_aff_sq_{a:.3}");
    }
    label
}

/// Overlay table of a sweep: measured moments next to the estimate.
fn sweep_csv(sweeps: &[(String, ExperimentReport)]) -> String {
    let mut out = String::from("d1,d2,affinity_sq,estimate,mean,std,trials\n");
    for (_, report) in sweeps {
        for s in &report.cells {
            let c = &s.cell;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.d1.unwrap_or(0),
                c.d2.unwrap_or(0),
                io::fmt_f64(c.affinity_sq.unwrap_or(f64::NAN)),
                io::fmt_f64(s.estimate),
                io::fmt_f64(s.mean),
                io::fmt_f64(s.std),
                s.trials
            );
        }
    }
    out
}

fn cmd_reproduce(figure: Figure, common: &RunArgs, full_scale: bool) -> CliResult<i32> {
    let trials = common.trials.unwrap_or(figure.default_trials(full_scale));
    let seed = common.seed.unwrap_or(DEFAULT_SEED);
    let opts = options(common);
    let out = &common.out;
    match figure {
        Figure::Fig4 | Figure::Fig6 => {
            let cfg = if figure == Figure::Fig4 {
                presets::fig4(trials, seed)
            } else {
                presets::fig6(trials, seed)
            };
            let (report, _) = execute(&cfg, &opts, out)?;
            for s in &report.cells {
                let path = out.join(format!("histogram_{}.csv", cell_label(s)));
                io::write_file(&path, &io::single_histogram_csv(s))?;
            }
            eprintln!("wrote {} cell(s) to {}", report.cells.len(), out.display());
            Ok(verdict(&[&report]))
        }
        Figure::Fig5 => {
            let mut sweeps = Vec::new();
            for (label, cfg) in presets::fig5(trials, seed) {
                let (report, _) = execute(&cfg, &opts, &out.join(&label))?;
                sweeps.push((label, report));
            }
            io::write_file(&out.join("sweep.csv"), &sweep_csv(&sweeps))?;
            eprintln!("wrote {} sweep(s) to {}", sweeps.len(), out.display());
            Ok(verdict(&sweeps.iter().map(|(_, r)| r).collect::<Vec<_>>()))
        }
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Geometry { first, second } => cmd_geometry(first, second.as_deref()),
        Command::Generate(args) => cmd_generate(args),
        Command::Run { config, common } => cmd_run(config, common),
        Command::Reproduce {
            figure,
            common,
            full_scale,
        } => cmd_reproduce(*figure, common, *full_scale),
        Command::LemmaChecks { config, common } => cmd_lemma_checks(config.as_deref(), common),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.check_name());
            e.exit_code()
        }
    }
}
