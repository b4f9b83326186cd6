//! Seeded random streams.
//!
//! Every random object in the crate is drawn from a [`ChaCha8Rng`] seeded
//! through `rand_core`'s `seed_from_u64`. Streams for independent tasks
//! (Monte Carlo trials, sub-components of one construction) are keyed by
//! [`derive_seed`], so results never depend on scheduling.
//!
//! Gaussian variates use the basic Box-Muller transform on two 53-bit
//! uniforms taken from consecutive `next_u64` outputs:
//!
//! ```text
//! u1 = ((x1 >> 11) + 1) * 2^-53        in (0, 1]
//! u2 =  (x2 >> 11)      * 2^-53        in [0, 1)
//! r  = sqrt(-2 ln u1)
//! z0 = r cos(2 pi u2),  z1 = r sin(2 pi u2)
//! ```
//!
//! Both outputs of a pair are used, in order `z0, z1`. An odd request
//! discards the trailing `z1`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(GOLDEN_GAMMA))
}

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[inline]
fn unit_open_closed(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn unit_closed_open(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw on `[0, 1)`.
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    unit_closed_open(rng)
}

/// Fills `out` with standard normal variates scaled by `scale`.
pub fn fill_gaussian(rng: &mut impl RngCore, out: &mut [f64], scale: f64) {
    let mut chunks = out.chunks_exact_mut(2);
    for pair in &mut chunks {
        let (z0, z1) = box_muller(rng);
        pair[0] = z0 * scale;
        pair[1] = z1 * scale;
    }
    if let [last] = chunks.into_remainder() {
        *last = box_muller(rng).0 * scale;
    }
}

#[inline]
fn box_muller(rng: &mut impl RngCore) -> (f64, f64) {
    let u1 = unit_open_closed(rng);
    let u2 = unit_closed_open(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (r * c, r * s)
}

pub fn gaussian_vec(rng: &mut impl RngCore, len: usize, scale: f64) -> Vec<f64> {
    let mut v = vec![0.0; len];
    fill_gaussian(rng, &mut v, scale);
    v
}
