//! Exact subspace geometry: orthonormal bases, principal angles, affinity
//! and the generalized projection F-norm distance.
//!
//! For subspaces `X1`, `X2` of `R^N` with orthonormal bases `U1`, `U2` and
//! dimensions `d1 <= d2`:
//!
//! ```text
//! cos θ_i  = σ_i(U1ᵀ U2)                  i = 1..d1, sorted non-increasing
//! aff      = ‖U1ᵀ U2‖_F = sqrt(Σ cos² θ_i)
//! D        = ‖U1 U1ᵀ − U2 U2ᵀ‖_F / √2
//! D²       = (d1 + d2) / 2 − aff²
//! ```

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;

/// Relative singular-value floor below which input columns count as dependent.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Entrywise tolerance on `basisᵀ·basis = I`.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-10;

/// Slack used when deciding two bases span the same subspace.
pub const SAME_SPAN_TOLERANCE: f64 = 1e-9;

/// A linear subspace of `R^ambient_dim` held through an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Wraps a basis that is already orthonormal, verifying the invariant.
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Result<Self> {
        check_shape(basis.nrows(), basis.ncols())?;
        let err = linalg::orthonormality_error(&basis);
        if !(err <= ORTHONORMAL_TOLERANCE) {
            return Err(Error::domain(format!(
                "basis is not orthonormal (max |UᵀU − I| = {err:e})"
            )));
        }
        Ok(Subspace { basis })
    }

    /// Orthonormalizes arbitrary full-rank columns.
    pub fn from_columns(columns: &DMatrix<f64>) -> Result<Self> {
        orthonormalize(columns)
    }

    /// Span of the listed canonical axes `e_i` (zero-based).
    pub fn coordinate(ambient_dim: usize, axes: &[usize]) -> Result<Self> {
        check_shape(ambient_dim, axes.len())?;
        let mut basis = DMatrix::zeros(ambient_dim, axes.len());
        for (col, &axis) in axes.iter().enumerate() {
            if axis >= ambient_dim {
                return Err(Error::domain(format!("axis {axis} outside R^{ambient_dim}")));
            }
            basis[(axis, col)] = 1.0;
        }
        Self::from_orthonormal(basis)
    }

    pub(crate) fn from_trusted(basis: DMatrix<f64>) -> Self {
        Subspace { basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn into_basis(self) -> DMatrix<f64> {
        self.basis
    }

    /// Orthogonal projector `U Uᵀ`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }
}

fn check_shape(ambient: usize, dim: usize) -> Result<()> {
    if dim == 0 || ambient == 0 {
        return Err(Error::domain("subspace must have positive dimension"));
    }
    if dim > ambient {
        return Err(Error::domain(format!(
            "dimension {dim} exceeds ambient dimension {ambient}"
        )));
    }
    Ok(())
}

/// Cosines of the principal angles, sorted non-increasing and clamped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PrincipalAngleSpectrum {
    cosines: Vec<f64>,
}

impl PrincipalAngleSpectrum {
    /// Builds a spectrum from arbitrary cosines; values are clamped and sorted.
    pub fn from_cosines(mut cosines: Vec<f64>) -> Result<Self> {
        if cosines.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("non-finite cosine"));
        }
        for c in cosines.iter_mut() {
            *c = c.clamp(0.0, 1.0);
        }
        cosines.sort_by(|a, b| b.total_cmp(a));
        Ok(PrincipalAngleSpectrum { cosines })
    }

    pub fn cosines(&self) -> &[f64] {
        &self.cosines
    }

    pub fn len(&self) -> usize {
        self.cosines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosines.is_empty()
    }

    /// Principal angles in radians, non-decreasing.
    pub fn angles(&self) -> Vec<f64> {
        self.cosines.iter().map(|c| c.acos()).collect()
    }

    pub fn affinity_sq(&self) -> f64 {
        self.cosines.iter().map(|c| c * c).sum()
    }

    pub fn affinity(&self) -> f64 {
        self.affinity_sq().sqrt()
    }
}

/// Orthonormal basis for the column space of `columns`.
pub fn orthonormalize(columns: &DMatrix<f64>) -> Result<Subspace> {
    check_shape(columns.nrows(), columns.ncols())?;
    if columns.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("non-finite entry in basis columns"));
    }
    let (q, r) = linalg::mgs_qr(columns);
    if let Some((smallest, largest)) = linalg::rank_failure(&r, RANK_TOLERANCE) {
        return Err(Error::RankDeficient { smallest, largest });
    }
    Ok(Subspace { basis: q })
}

fn check_ambient(a: &Subspace, b: &Subspace) -> Result<()> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::AmbientMismatch {
            left: a.ambient_dim(),
            right: b.ambient_dim(),
        });
    }
    Ok(())
}

pub fn principal_angles(a: &Subspace, b: &Subspace) -> Result<PrincipalAngleSpectrum> {
    check_ambient(a, b)?;
    let cross = a.basis.transpose() * &b.basis;
    let mut s = linalg::singular_values(&cross);
    s.truncate(a.dim().min(b.dim()));
    PrincipalAngleSpectrum::from_cosines(s)
}

/// `‖U1ᵀU2‖_F`.
pub fn affinity(a: &Subspace, b: &Subspace) -> Result<f64> {
    Ok(affinity_sq(a, b)?.sqrt())
}

pub fn affinity_sq(a: &Subspace, b: &Subspace) -> Result<f64> {
    check_ambient(a, b)?;
    Ok((a.basis.transpose() * &b.basis).norm_squared())
}

/// Generalized projection F-norm distance, evaluated from the projectors.
pub fn distance(a: &Subspace, b: &Subspace) -> Result<f64> {
    check_ambient(a, b)?;
    let diff = a.projector() - b.projector();
    Ok(diff.norm() / std::f64::consts::SQRT_2)
}

/// `D² = (d1 + d2)/2 − aff²`.
pub fn distance_sq_from_affinity(aff_sq: f64, d1: usize, d2: usize) -> Result<f64> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::domain("dimensions must be positive"));
    }
    let cap = d1.min(d2) as f64;
    if !(aff_sq >= 0.0 && aff_sq <= cap) {
        return Err(Error::domain(format!("aff² = {aff_sq} outside [0, {cap}]")));
    }
    Ok((d1 + d2) as f64 / 2.0 - aff_sq)
}

/// Whether two bases span the same subspace, judged through the affinity.
pub fn same_span(a: &Subspace, b: &Subspace) -> Result<bool> {
    if a.dim() != b.dim() {
        check_ambient(a, b)?;
        return Ok(false);
    }
    Ok(affinity_sq(a, b)? >= a.dim() as f64 - SAME_SPAN_TOLERANCE)
}
