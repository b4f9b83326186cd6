//! Dense helpers shared by the geometry and projection modules.

use nalgebra::DMatrix;

/// Thin QR by modified Gram-Schmidt with one full re-orthogonalization pass.
///
/// Columns are processed in natural order. A column whose residual vanishes
/// exactly is left as zero in `Q` so callers can inspect `R` without NaNs.
pub(crate) fn mgs_qr(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let (rows, cols) = a.shape();
    let mut q = a.clone();
    let mut r = DMatrix::<f64>::zeros(cols, cols);
    for j in 0..cols {
        for _pass in 0..2 {
            for i in 0..j {
                let c = q.column(i).dot(&q.column(j));
                r[(i, j)] += c;
                let (qi, mut qj) = q.columns_range_pair_mut(i, j);
                qj.axpy(-c, &qi, 1.0);
            }
        }
        let norm = q.column(j).norm();
        r[(j, j)] = norm;
        if norm > 0.0 {
            q.column_mut(j).unscale_mut(norm);
        } else {
            q.column_mut(j).fill(0.0);
        }
    }
    debug_assert_eq!(q.nrows(), rows);
    (q, r)
}

/// Singular values, largest first.
pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Returns `(smallest, largest)` singular values when the relative gap is
/// below `rel_tol` or any value is non-finite.
pub(crate) fn rank_failure(m: &DMatrix<f64>, rel_tol: f64) -> Option<(f64, f64)> {
    let s = singular_values(m);
    let largest = s.first().copied().unwrap_or(0.0);
    let smallest = s.last().copied().unwrap_or(0.0);
    let bad = !largest.is_finite() || !smallest.is_finite() || largest == 0.0 || smallest <= rel_tol * largest;
    bad.then_some((smallest, largest))
}

/// Largest absolute entry of `a - b`.
pub(crate) fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest absolute entry of `qᵀq - I`.
pub fn orthonormality_error(q: &DMatrix<f64>) -> f64 {
    let g = q.transpose() * q;
    let k = g.nrows();
    max_abs_diff(&g, &DMatrix::identity(k, k))
}

pub(crate) fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, data)
}
