//! Basis matrices on disk and experiment artifacts.
//!
//! A basis file is headerless CSV with one row per ambient coordinate and one
//! column per basis vector. A single file may hold two bases separated by a
//! blank line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use subspace_rip::montecarlo::{ExperimentReport, ExperimentSummary};
use subspace_rip::DMatrix;

use crate::error::{CliError, CliResult};

/// Fixed-width scientific notation with 17 significant digits, exact for doubles.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn parse_block(path: &Path, block: &str) -> CliResult<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(block.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::parse(path, e))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| CliError::parse(path, format!("not a number: {field:?}")))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(CliError::parse(path, "empty basis"));
    }
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(DMatrix::from_row_slice(data.len() / cols, cols, &data))
}

/// Reads every basis in `path` (one, or two separated by a blank line).
pub fn read_bases(path: &Path) -> CliResult<Vec<DMatrix<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut blocks = Vec::new();
    let mut current = String::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
        } else {
            current.push_str(line);
            current.push('\n');
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    if blocks.is_empty() {
        return Err(CliError::parse(path, "no basis found"));
    }
    blocks.iter().map(|b| parse_block(path, b)).collect()
}

pub fn basis_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| fmt_f64(m[(r, c)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn histogram_csv(cells: &[ExperimentSummary]) -> String {
    let mut out = String::from("cell,bin_left,bin_right,count\n");
    for (i, s) in cells.iter().enumerate() {
        let h = &s.histogram;
        for (k, count) in h.counts.iter().enumerate() {
            let _ = writeln!(out, "{i},{},{},{count}", fmt_f64(h.edges[k]), fmt_f64(h.edges[k + 1]));
        }
    }
    out
}

pub fn single_histogram_csv(s: &ExperimentSummary) -> String {
    let mut out = String::from("bin_left,bin_right,count\n");
    let h = &s.histogram;
    for (k, count) in h.counts.iter().enumerate() {
        let _ = writeln!(out, "{},{},{count}", fmt_f64(h.edges[k]), fmt_f64(h.edges[k + 1]));
    }
    out
}

pub fn per_epsilon_csv(cells: &[ExperimentSummary]) -> String {
    let mut out = String::from(
        "cell,epsilon,threshold_kind,deviation_threshold,violations,empirical_violation,theoretical_bound,vacuous,asserted,passed\n",
    );
    for (i, s) in cells.iter().enumerate() {
        for r in &s.per_epsilon {
            let passed = match r.passed {
                Some(true) => "true",
                Some(false) => "false",
                None => "",
            };
            let _ = writeln!(
                out,
                "{i},{},{},{},{},{},{},{},{},{passed}",
                fmt_f64(r.epsilon),
                r.threshold_kind.as_str(),
                fmt_f64(r.deviation_threshold),
                r.violations,
                fmt_f64(r.empirical_violation),
                fmt_f64(r.theoretical_bound),
                r.vacuous,
                r.asserted,
            );
        }
    }
    out
}

fn opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// One line per cell: parameters, sample moments and the estimate overlay.
pub fn cells_csv(cells: &[ExperimentSummary]) -> String {
    let mut out =
        String::from("cell,kind,N,n,d1,d2,L,affinity_sq,distance_sq,statistic,trials,mean,std,estimate,centering_z\n");
    for (i, s) in cells.iter().enumerate() {
        let c = &s.cell;
        let kind = serde_json::to_value(s.kind).expect("serializable");
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            kind.as_str().unwrap_or_default(),
            opt_usize(c.ambient_dim),
            c.n,
            opt_usize(c.d1),
            opt_usize(c.d2),
            opt_usize(c.set_size),
            opt_f64(c.affinity_sq),
            opt_f64(c.distance_sq),
            s.statistic,
            s.trials,
            fmt_f64(s.mean),
            fmt_f64(s.std),
            fmt_f64(s.estimate),
            fmt_f64(s.centering_z),
        );
    }
    out
}

/// Writes the standard artifact set and returns the paths written.
pub fn write_report(dir: &Path, report: &ExperimentReport) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let files = [
        ("summary.json", to_json(report)),
        ("histogram.csv", histogram_csv(&report.cells)),
        ("per_epsilon.csv", per_epsilon_csv(&report.cells)),
        ("cells.csv", cells_csv(&report.cells)),
    ];
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = dir.join(name);
        write_file(&path, &contents)?;
        written.push(path);
    }
    Ok(written)
}
