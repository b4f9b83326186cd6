//! Closed-form estimates of projected affinity and distance, and the
//! probability bounds that accompany them.
//!
//! All bounds are returned as the literal right-hand sides. Values at or
//! above one carry no information and are flagged as vacuous, never clipped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack applied to domain checks on squared quantities computed in floating point.
const SLACK: f64 = 1e-12;

/// Geometry of a subspace pair as seen by the estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairParams {
    pub d1: usize,
    pub d2: usize,
    pub n: usize,
    pub aff_sq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cosines: Option<Vec<f64>>,
}

impl PairParams {
    pub fn new(d1: usize, d2: usize, n: usize, aff_sq: f64) -> Result<Self> {
        let p = PairParams {
            d1,
            d2,
            n,
            aff_sq,
            cosines: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Pair parameters with the affinity taken from the principal-angle cosines.
    pub fn with_cosines(d1: usize, d2: usize, n: usize, cosines: Vec<f64>) -> Result<Self> {
        let aff_sq = cosines.iter().map(|c| c * c).sum();
        let p = PairParams {
            d1,
            d2,
            n,
            aff_sq,
            cosines: Some(cosines),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d1 == 0 || self.d1 > self.d2 || self.d2 >= self.n {
            return Err(Error::domain(format!(
                "need 1 ≤ d1 ≤ d2 < n, got d1={}, d2={}, n={}",
                self.d1, self.d2, self.n
            )));
        }
        check_aff_sq(self.aff_sq, self.d1)?;
        if let Some(c) = &self.cosines {
            if c.len() != self.d1 {
                return Err(Error::domain(format!(
                    "expected {} cosines, got {}",
                    self.d1,
                    c.len()
                )));
            }
            if c.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::domain("cosines must lie in [0, 1]"));
            }
            let sum: f64 = c.iter().map(|x| x * x).sum();
            if (sum - self.aff_sq).abs() > 1e-10 {
                return Err(Error::domain("Σλ² does not match aff²"));
            }
        }
        Ok(())
    }

    /// Squared distance implied by the affinity.
    pub fn distance_sq(&self) -> f64 {
        (self.d1 + self.d2) as f64 / 2.0 - self.aff_sq
    }
}

fn check_aff_sq(aff_sq: f64, d1: usize) -> Result<()> {
    if !(aff_sq >= -SLACK && aff_sq <= d1 as f64 + SLACK) {
        return Err(Error::domain(format!("aff² = {aff_sq} outside [0, {d1}]")));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    Ok(())
}

/// Projected affinity² of a line against a `d`-dimensional subspace:
/// `λ² + (d/n)(1 − λ²)`.
pub fn est_affinity_sq_line(lambda_sq: f64, d: usize, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda_sq) {
        return Err(Error::domain(format!("λ² = {lambda_sq} outside [0, 1]")));
    }
    if d == 0 || d >= n {
        return Err(Error::domain(format!("need 1 ≤ d < n, got d={d}, n={n}")));
    }
    Ok(lambda_sq + d as f64 / n as f64 * (1.0 - lambda_sq))
}

/// Projected affinity²: `aff² + (d2/n)(d1 − aff²)`.
pub fn est_affinity_sq(p: &PairParams) -> Result<f64> {
    p.validate()?;
    Ok(p.aff_sq + p.d2 as f64 / p.n as f64 * (p.d1 as f64 - p.aff_sq))
}

/// Projected distance²: `D² − (d2/n)(D² − (d2 − d1)/2)`.
pub fn est_distance_sq(d_sq: f64, d1: usize, d2: usize, n: usize) -> Result<f64> {
    if d1 == 0 || d1 > d2 || d2 >= n {
        return Err(Error::domain(format!(
            "need 1 ≤ d1 ≤ d2 < n, got d1={d1}, d2={d2}, n={n}"
        )));
    }
    let floor = (d2 - d1) as f64 / 2.0;
    let ceil = (d1 + d2) as f64 / 2.0;
    if !(d_sq >= floor - SLACK && d_sq <= ceil + SLACK) {
        return Err(Error::domain(format!(
            "D² = {d_sq} outside [{floor}, {ceil}]"
        )));
    }
    Ok(d_sq - d2 as f64 / n as f64 * (d_sq - floor))
}

/// Line-versus-subspace form of [`est_distance_sq`].
pub fn est_distance_sq_line(d_sq: f64, d: usize, n: usize) -> Result<f64> {
    est_distance_sq(d_sq, 1, d, n)
}

/// `P₁(ε, n) = 4 / (ε² n)`.
pub fn bound_p1(epsilon: f64, n: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    check_n(n)?;
    Ok(4.0 / (epsilon * epsilon * n as f64))
}

/// `P₂(ε, n) = 2d / (ε² n²)`.
pub fn bound_p2(epsilon: f64, d: usize, n: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    check_n(n)?;
    if d == 0 {
        return Err(Error::domain("d must be positive"));
    }
    let n = n as f64;
    Ok(2.0 * d as f64 / (epsilon * epsilon * n * n))
}

/// `P₃(ε, n) = exp(−ε² n / 2)`.
pub fn bound_p3(epsilon: f64, n: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    check_n(n)?;
    Ok((-epsilon * epsilon * n as f64 / 2.0).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    P1,
    P2,
    P3,
    PairRelaxed,
    PairTight,
    Distance,
    RipPair,
    RipSet,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::P1 => "p1",
            BoundKind::P2 => "p2",
            BoundKind::P3 => "p3",
            BoundKind::PairRelaxed => "pair_relaxed",
            BoundKind::PairTight => "pair_tight",
            BoundKind::Distance => "distance",
            BoundKind::RipPair => "rip_pair",
            BoundKind::RipSet => "rip_set",
        }
    }
}

/// A deviation event `|measured − estimate| > deviation_threshold` and the
/// stated upper bound on its probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub epsilon: f64,
    pub deviation_threshold: f64,
    pub probability_bound: f64,
    pub bound_kind: BoundKind,
}

impl BoundReport {
    pub fn vacuous(&self) -> bool {
        !(self.probability_bound < 1.0)
    }
}

/// Deviation event for the projected affinity (or distance) of a pair.
///
/// * `PairRelaxed`: threshold `aff²·ε`.
/// * `PairTight`: threshold `Σ λ_i²(1 − λ_i²)·ε`; needs the cosines.
/// * `Distance`: threshold `D²·ε`.
///
/// All three share the bound `4 d1 / (ε² n)`.
pub fn deviation_event(p: &PairParams, epsilon: f64, kind: BoundKind) -> Result<BoundReport> {
    p.validate()?;
    check_epsilon(epsilon)?;
    let scale = match kind {
        BoundKind::PairRelaxed => p.aff_sq,
        BoundKind::PairTight => {
            let c = p.cosines.as_ref().ok_or(Error::MissingCosines)?;
            c.iter()
                .map(|l| {
                    let l2 = l * l;
                    l2 * (1.0 - l2)
                })
                .sum()
        }
        BoundKind::Distance => p.distance_sq(),
        other => {
            return Err(Error::domain(format!(
                "{} is not a pair deviation event",
                other.as_str()
            )))
        }
    };
    Ok(BoundReport {
        epsilon,
        deviation_threshold: scale * epsilon,
        probability_bound: 4.0 * p.d1 as f64 / (epsilon * epsilon * p.n as f64),
        bound_kind: kind,
    })
}

/// Lower bound on the probability of the `(1 ± ε)` distance sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RipBound {
    /// `1 − failure_mass`, or 0 when `ε ≤ d/n`.
    pub probability: f64,
    /// Upper bound on the failure probability (infinite when undefined).
    pub failure_mass: f64,
    /// True when the bound carries no information.
    pub vacuous: bool,
}

impl RipBound {
    fn from_failure(failure_mass: f64) -> Self {
        RipBound {
            probability: 1.0 - failure_mass,
            failure_mass,
            vacuous: !(failure_mass < 1.0),
        }
    }

    fn undefined() -> Self {
        RipBound {
            probability: 0.0,
            failure_mass: f64::INFINITY,
            vacuous: true,
        }
    }
}

fn rip_failure_pair(d1: usize, d2: usize, n: usize, epsilon: f64) -> Option<f64> {
    let margin = epsilon - d2 as f64 / n as f64;
    (margin > 0.0).then(|| 4.0 * d1 as f64 / (margin * margin * n as f64))
}

/// `1 − 4 d1 / ((ε − d2/n)² n)`.
pub fn rip_pair_bound(d1: usize, d2: usize, n: usize, epsilon: f64) -> Result<RipBound> {
    check_epsilon(epsilon)?;
    check_n(n)?;
    if d1 == 0 || d1 > d2 {
        return Err(Error::domain(format!(
            "need 1 ≤ d1 ≤ d2, got d1={d1}, d2={d2}"
        )));
    }
    Ok(match rip_failure_pair(d1, d2, n, epsilon) {
        Some(f) => RipBound::from_failure(f),
        None => RipBound::undefined(),
    })
}

/// `1 − 2 d L (L − 1) / ((ε − d/n)² n)`, the union bound over all pairs.
pub fn rip_set_bound(d: usize, set_size: usize, n: usize, epsilon: f64) -> Result<RipBound> {
    check_epsilon(epsilon)?;
    check_n(n)?;
    if d == 0 {
        return Err(Error::domain("d must be positive"));
    }
    if set_size < 2 {
        return Err(Error::domain("a set needs at least two subspaces"));
    }
    let pairs = (set_size * (set_size - 1) / 2) as f64;
    Ok(match rip_failure_pair(d, d, n, epsilon) {
        Some(f) => RipBound::from_failure(pairs * f),
        None => RipBound::undefined(),
    })
}
