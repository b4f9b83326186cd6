//! Gaussian random projection of subspaces and the column-normalized
//! ("quasi-orthonormal") approximation to the projected basis.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng;
use crate::subspace::{Subspace, RANK_TOLERANCE};

/// Relative singular-value floor for a projected basis.
pub const COLLAPSE_TOLERANCE: f64 = 1e-10;

/// Tolerance on unit column norms accepted by [`quasi_ortho_report`].
pub const UNIT_NORM_TOLERANCE: f64 = 1e-10;

/// An `n × N` matrix of i.i.d. `N(0, 1/n)` entries.
///
/// Entries are drawn row-major from [`rng::fill_gaussian`] on a stream seeded
/// with `seed`, so `(n, N, seed)` reproduces the matrix bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianProjector {
    n: usize,
    ambient_dim: usize,
    seed: u64,
    /// `Φᵀ`, whose column-major storage is exactly the row-major draw order.
    transposed: DMatrix<f64>,
}

impl GaussianProjector {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        self.transposed.transpose()
    }

    /// `Φ·x` for a raw vector or matrix.
    pub fn apply(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.nrows() != self.ambient_dim {
            return Err(Error::AmbientMismatch {
                left: self.ambient_dim,
                right: x.nrows(),
            });
        }
        Ok(self.transposed.tr_mul(x))
    }
}

pub fn make_projector(n: usize, ambient_dim: usize, seed: u64) -> Result<GaussianProjector> {
    if n == 0 || n >= ambient_dim {
        return Err(Error::DimensionOrder { n, ambient: ambient_dim });
    }
    let mut stream = rng::seeded(seed);
    let data = rng::gaussian_vec(&mut stream, n * ambient_dim, 1.0 / (n as f64).sqrt());
    Ok(GaussianProjector {
        n,
        ambient_dim,
        seed,
        transposed: DMatrix::from_vec(ambient_dim, n, data),
    })
}

fn projected_columns(p: &GaussianProjector, x: &Subspace) -> Result<DMatrix<f64>> {
    if x.ambient_dim() != p.ambient_dim {
        return Err(Error::AmbientMismatch {
            left: p.ambient_dim,
            right: x.ambient_dim(),
        });
    }
    if x.dim() >= p.n {
        return Err(Error::domain(format!(
            "subspace dimension {} must be below target dimension {}",
            x.dim(),
            p.n
        )));
    }
    Ok(p.transposed.tr_mul(x.basis()))
}

/// Orthonormalizes an image basis, reporting rank collapse.
pub(crate) fn orthonormalize_image(a: &DMatrix<f64>) -> Result<Subspace> {
    let (q, r) = linalg::mgs_qr(a);
    if let Some((smallest, largest)) = linalg::rank_failure(&r, COLLAPSE_TOLERANCE) {
        return Err(Error::RankCollapse { smallest, largest });
    }
    Ok(Subspace::from_trusted(q))
}

/// Image `{Φx : x ∈ X}` with an orthonormal basis.
pub fn project(p: &GaussianProjector, x: &Subspace) -> Result<Subspace> {
    orthonormalize_image(&projected_columns(p, x)?)
}

/// `Φ·U` with every column scaled to unit norm; not orthogonalized.
pub fn normalized_columns(p: &GaussianProjector, x: &Subspace) -> Result<DMatrix<f64>> {
    let mut a = projected_columns(p, x)?;
    let (_, r) = linalg::mgs_qr(&a);
    if let Some((smallest, largest)) = linalg::rank_failure(&r, COLLAPSE_TOLERANCE) {
        return Err(Error::RankCollapse { smallest, largest });
    }
    for mut col in a.column_iter_mut() {
        let norm = col.norm();
        col.unscale_mut(norm);
    }
    Ok(a)
}

/// Error structure of Gram-Schmidt applied to a column-normalized matrix `Ā`.
///
/// `V` is the Gram-Schmidt orthogonalization of `Ā` in column order, and
/// `V − Ā = Ā·Ū` with `Ū` upper triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiOrthoReport {
    /// `ĀᵀĀ − I`, symmetric with zero diagonal.
    pub r_bar: DMatrix<f64>,
    pub u_bar: DMatrix<f64>,
    /// The orthonormal basis `V`.
    pub v: DMatrix<f64>,
    pub r_norm: f64,
    /// `max_i |ū_ii|`.
    pub max_diag: f64,
    /// `max_{j<i} |ū_ji + r̄_ji|`.
    pub max_offdiag_residual: f64,
    /// `‖Ā(I + Ū) − V‖_F`.
    pub reconstruction_error: f64,
}

pub fn quasi_ortho_report(a_bar: &DMatrix<f64>) -> Result<QuasiOrthoReport> {
    let d = a_bar.ncols();
    if d == 0 || d > a_bar.nrows() {
        return Err(Error::domain("column-normalized matrix must have 1..=rows columns"));
    }
    for (i, col) in a_bar.column_iter().enumerate() {
        let norm = col.norm();
        if !((norm - 1.0).abs() <= UNIT_NORM_TOLERANCE) {
            return Err(Error::domain(format!("column {i} has norm {norm}, expected 1")));
        }
    }
    let (v, r) = linalg::mgs_qr(a_bar);
    if let Some((smallest, largest)) = linalg::rank_failure(&r, RANK_TOLERANCE) {
        return Err(Error::RankDeficient { smallest, largest });
    }

    let mut r_bar = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in (i + 1)..d {
            let dot = a_bar.column(i).dot(&a_bar.column(j));
            r_bar[(i, j)] = dot;
            r_bar[(j, i)] = dot;
        }
    }

    // Ū = (ĀᵀĀ)⁻¹ Āᵀ (V − Ā)
    let gram = a_bar.transpose() * a_bar;
    let rhs = a_bar.transpose() * (&v - a_bar);
    let chol = gram.cholesky().ok_or(Error::RankDeficient {
        smallest: 0.0,
        largest: 1.0,
    })?;
    let mut u_bar = chol.solve(&rhs);
    for i in 0..d {
        for j in 0..i {
            u_bar[(i, j)] = 0.0;
        }
    }

    let mut max_diag = 0.0f64;
    let mut max_offdiag_residual = 0.0f64;
    for i in 0..d {
        max_diag = max_diag.max(u_bar[(i, i)].abs());
        for j in 0..i {
            max_offdiag_residual = max_offdiag_residual.max((u_bar[(j, i)] + r_bar[(j, i)]).abs());
        }
    }
    let reconstruction = a_bar * (DMatrix::identity(d, d) + &u_bar) - &v;

    Ok(QuasiOrthoReport {
        r_norm: r_bar.norm(),
        r_bar,
        u_bar,
        v,
        max_diag,
        max_offdiag_residual,
        reconstruction_error: reconstruction.norm(),
    })
}

/// Projected affinity computed with the column-normalized basis of the
/// smaller subspace in place of its orthonormal basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiAffinity {
    /// `‖Ā₁ᵀ V₂‖_F`.
    pub estimate: f64,
    /// `‖V₁ᵀ V₂‖_F`.
    pub exact: f64,
    /// Largest off-diagonal magnitude of `Ā₁ᵀĀ₁`.
    pub eps_emp: f64,
    /// `|estimate² − exact²| ≤ d1 · estimate² · eps_emp`.
    pub within_bound: bool,
}

pub fn affinity_via_quasi_basis(
    p: &GaussianProjector,
    x1: &Subspace,
    x2: &Subspace,
) -> Result<QuasiAffinity> {
    if x1.dim() > x2.dim() {
        return Err(Error::domain("first subspace must have the smaller dimension"));
    }
    let a1 = normalized_columns(p, x1)?;
    let v1 = project(p, x1)?;
    let v2 = project(p, x2)?;
    let estimate = (a1.transpose() * v2.basis()).norm();
    let exact = (v1.basis().transpose() * v2.basis()).norm();
    let gram = a1.transpose() * &a1;
    let d1 = x1.dim();
    let mut eps_emp = 0.0f64;
    for i in 0..d1 {
        for j in 0..d1 {
            if i != j {
                eps_emp = eps_emp.max(gram[(i, j)].abs());
            }
        }
    }
    let est_sq = estimate * estimate;
    let within_bound = (est_sq - exact * exact).abs() <= d1 as f64 * est_sq * eps_emp + 1e-12;
    Ok(QuasiAffinity {
        estimate,
        exact,
        eps_emp,
        within_bound,
    })
}

/// How a Monte Carlo trial realizes its Gaussian projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionMode {
    /// Draw the full `n × N` matrix `Φ` and apply it to each basis.
    Full,
    /// Draw `Φ·W` directly for an orthonormal frame `W` spanning every member.
    ///
    /// Because the rows of `Φ` are isotropic Gaussians, `Φ·W` is an `n × K`
    /// matrix of i.i.d. `N(0, 1/n)` entries, so this has exactly the law of
    /// the full projection at `O(nK)` cost instead of `O(nN)`.
    #[default]
    Frame,
}

/// A fixed collection of subspaces that is projected jointly, trial after trial.
#[derive(Debug, Clone)]
pub struct SubspaceFamily {
    members: Vec<Subspace>,
    frame: DMatrix<f64>,
    coords: Vec<DMatrix<f64>>,
}

impl SubspaceFamily {
    pub fn new(members: Vec<Subspace>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::domain("empty subspace family"))?;
        let ambient = first.ambient_dim();
        for m in &members {
            if m.ambient_dim() != ambient {
                return Err(Error::AmbientMismatch {
                    left: ambient,
                    right: m.ambient_dim(),
                });
            }
        }
        let frame = span_frame(&members);
        let coords = members.iter().map(|m| frame.transpose() * m.basis()).collect();
        Ok(SubspaceFamily {
            members,
            frame,
            coords,
        })
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    /// Dimension of the span of all members.
    pub fn frame_dim(&self) -> usize {
        self.frame.ncols()
    }

    /// Projects every member with the projector keyed by `seed`.
    pub fn project(&self, n: usize, seed: u64, mode: ProjectionMode) -> Result<Vec<Subspace>> {
        let ambient = self.ambient_dim();
        if n == 0 || n >= ambient {
            return Err(Error::DimensionOrder { n, ambient });
        }
        match mode {
            ProjectionMode::Full => {
                let p = make_projector(n, ambient, seed)?;
                self.members.iter().map(|m| project(&p, m)).collect()
            }
            ProjectionMode::Frame => {
                for m in &self.members {
                    if m.dim() >= n {
                        return Err(Error::domain(format!(
                            "subspace dimension {} must be below target dimension {n}",
                            m.dim()
                        )));
                    }
                }
                let k = self.frame.ncols();
                let mut stream = rng::seeded(seed);
                let data = rng::gaussian_vec(&mut stream, n * k, 1.0 / (n as f64).sqrt());
                let sketch = linalg::from_row_major(n, k, &data);
                self.coords
                    .iter()
                    .map(|c| orthonormalize_image(&(&sketch * c)))
                    .collect()
            }
        }
    }
}

/// Orthonormal basis of the joint span, dropping dependent directions.
fn span_frame(members: &[Subspace]) -> DMatrix<f64> {
    let ambient = members[0].ambient_dim();
    let mut kept: Vec<nalgebra::DVector<f64>> = Vec::new();
    for m in members {
        for col in m.basis().column_iter() {
            let mut v = col.into_owned();
            for _pass in 0..2 {
                for q in &kept {
                    let c = q.dot(&v);
                    v.axpy(-c, q, 1.0);
                }
            }
            let norm = v.norm();
            if norm > 1e-9 {
                kept.push(v / norm);
            }
        }
    }
    DMatrix::from_fn(ambient, kept.len(), |i, j| kept[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::random_orthonormal;
    use crate::subspace::affinity;

    #[test]
    fn projector_is_deterministic() {
        let a = make_projector(2, 5, 7).unwrap();
        let b = make_projector(2, 5, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.matrix(), make_projector(2, 5, 8).unwrap().matrix());
    }

    #[test]
    fn projector_entry_statistics() {
        let p = make_projector(100, 500, 1).unwrap();
        let m = p.matrix();
        assert_eq!(m.shape(), (100, 500));
        let count = m.len() as f64;
        let mean = m.iter().sum::<f64>() / count;
        let var = m.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0);
        let sigma = (1.0f64 / 100.0).sqrt();
        assert!(mean.abs() < 4.0 * sigma / count.sqrt());
        assert!((0.009..=0.011).contains(&var), "variance {var}");
    }

    #[test]
    fn dimension_order_enforced() {
        assert_eq!(
            make_projector(500, 200, 3).unwrap_err(),
            Error::DimensionOrder { n: 500, ambient: 200 }
        );
        assert!(make_projector(200, 200, 3).is_err());
        assert!(make_projector(0, 200, 3).is_err());
    }

    #[test]
    fn projecting_a_line_keeps_dimension() {
        let p = make_projector(200, 500, 11).unwrap();
        let line = Subspace::from_orthonormal(random_orthonormal(500, 1, 2).unwrap()).unwrap();
        let y = project(&p, &line).unwrap();
        assert_eq!((y.ambient_dim(), y.dim()), (200, 1));
        let a = normalized_columns(&p, &line).unwrap();
        assert!(linalg::max_abs_diff(&a, y.basis()) < 1e-14);
    }

    #[test]
    fn identical_inputs_identical_images() {
        let p = make_projector(50, 120, 5).unwrap();
        let x = Subspace::coordinate(120, &[0, 1, 2, 3, 4]).unwrap();
        let y1 = project(&p, &x).unwrap();
        let y2 = project(&p, &x).unwrap();
        assert!((affinity(&y1, &y2).unwrap() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn project_errors() {
        let p = make_projector(3, 10, 5).unwrap();
        let wrong = Subspace::coordinate(9, &[0]).unwrap();
        assert!(matches!(project(&p, &wrong), Err(Error::AmbientMismatch { .. })));
        let big = Subspace::coordinate(10, &[0, 1, 2]).unwrap();
        assert!(project(&p, &big).is_err());
    }

    #[test]
    fn normalized_columns_have_unit_norm() {
        let p = make_projector(40, 90, 2).unwrap();
        let x = Subspace::from_orthonormal(random_orthonormal(90, 4, 6).unwrap()).unwrap();
        let a = normalized_columns(&p, &x).unwrap();
        for col in a.column_iter() {
            assert!((col.norm() - 1.0).abs() < 1e-12);
        }
        let span_a = Subspace::from_columns(&a).unwrap();
        let y = project(&p, &x).unwrap();
        assert!((affinity(&span_a, &y).unwrap().powi(2) - 4.0).abs() < 1e-10);
    }

    #[test]
    fn quasi_report_on_orthonormal_input() {
        let q = random_orthonormal(10, 4, 1).unwrap();
        let rep = quasi_ortho_report(&q).unwrap();
        assert!(rep.r_norm < 1e-14);
        assert!(rep.u_bar.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn quasi_report_two_columns_closed_form() {
        // Columns at cosine r: v2 = (a2 − r a1)/sqrt(1 − r²).
        let r: f64 = 0.1;
        let s = (1.0 - r * r).sqrt();
        let a = DMatrix::from_row_slice(3, 2, &[1.0, r, 0.0, s, 0.0, 0.0]);
        let rep = quasi_ortho_report(&a).unwrap();
        let u12 = -r / s;
        let u22 = 1.0 / s - 1.0;
        assert!((rep.u_bar[(0, 1)] - u12).abs() < 1e-12);
        assert!((rep.u_bar[(1, 1)] - u22).abs() < 1e-12);
        assert!((u12 - -0.100504).abs() < 1e-6);
        assert!((u22 - 0.005038).abs() < 1e-6);
        assert_eq!(rep.u_bar[(1, 0)], 0.0);
        assert!(rep.reconstruction_error < 1e-12);
        assert!((rep.r_norm - (2.0f64).sqrt() * r).abs() < 1e-15);
    }

    #[test]
    fn quasi_report_rejects_unnormalized() {
        let a = DMatrix::from_row_slice(2, 1, &[2.0, 0.0]);
        assert!(quasi_ortho_report(&a).is_err());
        let dup = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(quasi_ortho_report(&dup), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn quasi_affinity_line_is_exact() {
        let p = make_projector(60, 150, 8).unwrap();
        let x1 = Subspace::from_orthonormal(random_orthonormal(150, 1, 1).unwrap()).unwrap();
        let x2 = Subspace::from_orthonormal(random_orthonormal(150, 6, 2).unwrap()).unwrap();
        let q = affinity_via_quasi_basis(&p, &x1, &x2).unwrap();
        assert!((q.estimate - q.exact).abs() < 1e-10);
        assert_eq!(q.eps_emp, 0.0);
        assert!(affinity_via_quasi_basis(&p, &x2, &x1).is_err());
    }

    #[test]
    fn family_frame_spans_members() {
        let a = Subspace::coordinate(6, &[0, 1]).unwrap();
        let b = Subspace::coordinate(6, &[1, 2]).unwrap();
        let fam = SubspaceFamily::new(vec![a, b]).unwrap();
        assert_eq!(fam.frame_dim(), 3);
        let ys = fam.project(4, 1, ProjectionMode::Frame).unwrap();
        assert_eq!(ys.len(), 2);
        assert_eq!(ys[0].ambient_dim(), 4);
        let full = fam.project(4, 1, ProjectionMode::Full).unwrap();
        assert_eq!(full[1].dim(), 2);
    }
}
