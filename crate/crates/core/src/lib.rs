//! Subspace geometry under Gaussian random projection.
//!
//! * [`subspace`]: principal angles, affinity and projection F-norm distance.
//! * [`projection`]: Gaussian projectors and the column-normalized basis analysis.
//! * [`estimators`]: closed-form projected affinity/distance and probability bounds.
//! * [`generator`]: seeded frames, pairs with prescribed affinity, subspace sets.
//! * [`montecarlo`]: reproducible parallel experiments over all of the above.

// `!(x < bound)` is deliberate throughout: NaN lands on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod generator;
mod linalg;
pub mod montecarlo;
pub mod projection;
pub mod rng;
pub mod subspace;

pub use error::{Error, Result};
pub use estimators::{BoundKind, BoundReport, PairParams, RipBound};
pub use generator::{make_pair, make_set, random_orthonormal, PairSpec, SetMode, SpectrumMode, SubspacePair};
pub use linalg::orthonormality_error;
pub use projection::{
    make_projector, project, GaussianProjector, ProjectionMode, QuasiOrthoReport, SubspaceFamily,
};
pub use subspace::{
    affinity, affinity_sq, distance, distance_sq_from_affinity, orthonormalize, principal_angles,
    PrincipalAngleSpectrum, Subspace,
};

pub use nalgebra::DMatrix;
