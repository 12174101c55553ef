//! Seeded random sampling used by the verification sweeps.
//!
//! All randomness in the crate flows through `ChaCha8` with explicit seeds so
//! every sweep is reproducible bit for bit.

use crate::Mat8;
use nalgebra::SVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One standard normal variate (Box-Muller; uses two uniforms per call pair).
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Uniform point on the unit sphere in `R^N` (normalized Gaussian).
pub fn unit_vector<const N: usize>(rng: &mut ChaCha8Rng) -> SVector<f64, N> {
    loop {
        let v = SVector::<f64, N>::from_fn(|_, _| standard_normal(rng));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Haar-ish random rotation from the QR factorization of a Gaussian matrix,
/// with the sign of the diagonal of `R` fixed.
pub fn random_rotation8(rng: &mut ChaCha8Rng) -> Mat8 {
    let g = Mat8::from_fn(|_, _| standard_normal(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..8 {
        if r[(j, j)] < 0.0 {
            for i in 0..8 {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}
