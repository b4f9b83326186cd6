//! Seeded construction of random frames, subspace pairs with a prescribed
//! affinity, and finite sets of subspaces.
//!
//! Pairs follow a four-step recipe: draw an orthonormal frame
//! `W = [w_1, …, w_{d1+d2}]`, take `U2 = [w_1, …, w_{d2}]`, pick cosines
//! `λ_i`, and set the `i`-th column of `U1` to
//! `λ_i w_i + sqrt(1 − λ_i²) w_{d2+i}`. The cosines of `U1` against `U2` are
//! then exactly the `λ_i`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{self, SeededRng};
use crate::subspace::{PrincipalAngleSpectrum, Subspace};

/// Uniform spectrum draws attempted before giving up.
pub const MAX_SPECTRUM_DRAWS: usize = 1000;

/// Haar-distributed `N × k` frame: Gram-Schmidt of an i.i.d. Gaussian matrix.
///
/// Gram-Schmidt leaves the triangular factor with a positive diagonal, which
/// is the sign convention that makes the frame exactly Haar.
pub fn random_orthonormal(ambient_dim: usize, k: usize, seed: u64) -> Result<DMatrix<f64>> {
    if k == 0 || k > ambient_dim {
        return Err(Error::domain(format!(
            "need 1 ≤ k ≤ N, got k={k}, N={ambient_dim}"
        )));
    }
    let mut stream = rng::seeded(seed);
    let data = rng::gaussian_vec(&mut stream, ambient_dim * k, 1.0);
    let g = linalg::from_row_major(ambient_dim, k, &data);
    let (q, r) = linalg::mgs_qr(&g);
    if let Some((smallest, largest)) = linalg::rank_failure(&r, 1e-12) {
        return Err(Error::RankDeficient { smallest, largest });
    }
    Ok(q)
}

/// How the principal-angle cosines of a generated pair are chosen.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMode {
    /// Draw `λ̂_i ~ U[0, 1]` and rescale so that `Σ λ_i² = aff²`.
    #[default]
    UniformScaled,
    /// Use these cosines as given.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub ambient_dim: usize,
    pub d1: usize,
    pub d2: usize,
    pub target_affinity: f64,
    pub seed: u64,
    #[serde(default)]
    pub spectrum_mode: SpectrumMode,
}

impl PairSpec {
    pub fn uniform(ambient_dim: usize, d1: usize, d2: usize, target_affinity: f64, seed: u64) -> Self {
        PairSpec {
            ambient_dim,
            d1,
            d2,
            target_affinity,
            seed,
            spectrum_mode: SpectrumMode::UniformScaled,
        }
    }

    /// Explicit cosines; `d1` and the target affinity follow from them.
    pub fn explicit(ambient_dim: usize, d2: usize, cosines: Vec<f64>, seed: u64) -> Self {
        let target_affinity = cosines.iter().map(|c| c * c).sum::<f64>().sqrt();
        PairSpec {
            ambient_dim,
            d1: cosines.len(),
            d2,
            target_affinity,
            seed,
            spectrum_mode: SpectrumMode::Explicit(cosines),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let PairSpec { ambient_dim, d1, d2, target_affinity, .. } = *self;
        if d1 == 0 || d1 > d2 {
            return Err(Error::domain(format!("need 1 ≤ d1 ≤ d2, got d1={d1}, d2={d2}")));
        }
        if d1 + d2 > ambient_dim {
            return Err(Error::domain(format!(
                "d1 + d2 = {} exceeds N = {ambient_dim}",
                d1 + d2
            )));
        }
        if !(target_affinity >= 0.0 && target_affinity * target_affinity <= d1 as f64 + 1e-12) {
            return Err(Error::domain(format!(
                "target affinity {target_affinity} outside [0, sqrt({d1})]"
            )));
        }
        if let SpectrumMode::Explicit(c) = &self.spectrum_mode {
            if c.len() != d1 {
                return Err(Error::domain(format!("expected {d1} cosines, got {}", c.len())));
            }
            if c.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::domain("explicit cosines must lie in [0, 1]"));
            }
            let sum: f64 = c.iter().map(|x| x * x).sum();
            if (sum - target_affinity * target_affinity).abs() > 1e-9 {
                return Err(Error::domain("explicit cosines do not match the target affinity"));
            }
        }
        Ok(())
    }
}

/// A generated pair and the cosines it was built from.
#[derive(Debug, Clone)]
pub struct SubspacePair {
    pub x1: Subspace,
    pub x2: Subspace,
    pub spectrum: PrincipalAngleSpectrum,
}

fn draw_scaled_spectrum(target: f64, d: usize, stream: &mut SeededRng) -> Result<Vec<f64>> {
    for _ in 0..MAX_SPECTRUM_DRAWS {
        let raw: Vec<f64> = (0..d).map(|_| rng::uniform(stream)).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let scaled: Vec<f64> = raw.iter().map(|x| target * x / norm).collect();
        if scaled.iter().all(|&l| l <= 1.0) {
            return Ok(scaled);
        }
    }
    Err(Error::SpectrumInfeasible {
        retries: MAX_SPECTRUM_DRAWS,
    })
}

/// Columns `λ_i w_{hub_i} + sqrt(1 − λ_i²) w_{spare_i}`.
fn rotate_toward(frame: &DMatrix<f64>, hub: usize, spare: usize, cosines: &[f64]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(frame.nrows(), cosines.len());
    for (i, &l) in cosines.iter().enumerate() {
        let s = (1.0 - l * l).max(0.0).sqrt();
        let mut col = out.column_mut(i);
        col.axpy(l, &frame.column(hub + i), 0.0);
        col.axpy(s, &frame.column(spare + i), 1.0);
    }
    out
}

pub fn make_pair(spec: &PairSpec) -> Result<SubspacePair> {
    spec.validate()?;
    let frame = random_orthonormal(spec.ambient_dim, spec.d1 + spec.d2, rng::derive_seed(spec.seed, 0))?;
    let cosines = match &spec.spectrum_mode {
        SpectrumMode::UniformScaled => {
            let mut stream = rng::seeded(rng::derive_seed(spec.seed, 1));
            draw_scaled_spectrum(spec.target_affinity, spec.d1, &mut stream)?
        }
        SpectrumMode::Explicit(c) => c.clone(),
    };
    let x1 = Subspace::from_orthonormal(rotate_toward(&frame, 0, spec.d2, &cosines))?;
    let x2 = Subspace::from_orthonormal(frame.columns(0, spec.d2).into_owned())?;
    Ok(SubspacePair {
        x1,
        x2,
        spectrum: PrincipalAngleSpectrum::from_cosines(cosines)?,
    })
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetMode {
    /// Every member drawn as an independent Haar frame.
    #[default]
    Independent,
    /// Members `1..L` are rotated toward a shared hub (the last member) with
    /// the listed affinities, using disjoint frame columns. A single target
    /// applies to every member.
    Prescribed(Vec<f64>),
}

/// `L` subspaces of dimension `d` in `R^N`.
///
/// In prescribed mode the hub is the last element, so for `L = 2` the result
/// coincides with [`make_pair`] on a uniform spec with `d1 = d2 = d` and the
/// same seed.
pub fn make_set(ambient_dim: usize, d: usize, set_size: usize, seed: u64, mode: &SetMode) -> Result<Vec<Subspace>> {
    if d == 0 || d > ambient_dim {
        return Err(Error::domain(format!("need 1 ≤ d ≤ N, got d={d}, N={ambient_dim}")));
    }
    if set_size == 0 {
        return Err(Error::domain("set must contain at least one subspace"));
    }
    match mode {
        SetMode::Independent => (0..set_size as u64)
            .map(|k| Subspace::from_orthonormal(random_orthonormal(ambient_dim, d, rng::derive_seed(seed, k))?))
            .collect(),
        SetMode::Prescribed(targets) => {
            let spokes = set_size - 1;
            if spokes > 0 && targets.len() != 1 && targets.len() != spokes {
                return Err(Error::domain(format!(
                    "expected 1 or {spokes} target affinities, got {}",
                    targets.len()
                )));
            }
            if d * set_size > ambient_dim {
                return Err(Error::Infeasible(format!(
                    "{set_size} prescribed subspaces of dimension {d} need {} frame columns, N = {ambient_dim}",
                    d * set_size
                )));
            }
            for &t in targets {
                if !(t >= 0.0 && t * t <= d as f64 + 1e-12) {
                    return Err(Error::domain(format!("target affinity {t} outside [0, sqrt({d})]")));
                }
            }
            let frame = random_orthonormal(ambient_dim, d * set_size, rng::derive_seed(seed, 0))?;
            let mut stream = rng::seeded(rng::derive_seed(seed, 1));
            let mut out = Vec::with_capacity(set_size);
            for k in 1..=spokes {
                let target = if targets.len() == 1 { targets[0] } else { targets[k - 1] };
                let cosines = draw_scaled_spectrum(target, d, &mut stream)?;
                out.push(Subspace::from_orthonormal(rotate_toward(&frame, 0, d * k, &cosines))?);
            }
            out.push(Subspace::from_orthonormal(frame.columns(0, d).into_owned())?);
            Ok(out)
        }
    }
}
