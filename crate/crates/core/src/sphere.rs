//! Points of the 7-sphere with the block split `z = (x, y)` in `R^4 x R^4`.

use crate::{Vec4, Vec8};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SphereError {
    #[error("input norm {0:.3e} below 1e-8; refusing to normalize")]
    NormTooSmall(f64),
}

/// A unit vector in `R^8`; construction renormalizes any input with norm at
/// least `1e-8` and rejects smaller ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    coords: Vec8,
}

impl SpherePoint {
    pub fn new(coords: Vec8) -> Result<Self, SphereError> {
        let n = coords.norm();
        if n < 1e-8 {
            return Err(SphereError::NormTooSmall(n));
        }
        Ok(SpherePoint { coords: coords / n })
    }

    pub fn from_array(a: [f64; 8]) -> Result<Self, SphereError> {
        Self::new(Vec8::from_row_slice(&a))
    }

    pub fn north_pole() -> Self {
        SpherePoint { coords: Vec8::from_fn(|i, _| f64::from(i == 0)) }
    }

    /// A point with `|x|^2 = t` on the first block axis, `(sqrt t, 0, 0, 0,
    /// sqrt(1-t), 0, 0, 0)`.
    pub fn with_x_norm_sq(t: f64) -> Self {
        let t = t.clamp(0.0, 1.0);
        let mut c = Vec8::zeros();
        c[0] = t.sqrt();
        c[4] = (1.0 - t).sqrt();
        SpherePoint { coords: c }
    }

    pub fn coords(&self) -> &Vec8 {
        &self.coords
    }

    pub fn x_block(&self) -> Vec4 {
        Vec4::new(self.coords[0], self.coords[1], self.coords[2], self.coords[3])
    }

    pub fn y_block(&self) -> Vec4 {
        Vec4::new(self.coords[4], self.coords[5], self.coords[6], self.coords[7])
    }

    pub fn x_norm_sq(&self) -> f64 {
        self.x_block().norm_squared()
    }

    pub fn y_norm_sq(&self) -> f64 {
        self.y_block().norm_squared()
    }

    /// `delta = |x|^2 - |y|^2`, the quantity every closed form here depends on.
    pub fn delta(&self) -> f64 {
        self.x_norm_sq() - self.y_norm_sq()
    }

    pub fn random(rng: &mut rand_chacha::ChaCha8Rng) -> Self {
        SpherePoint { coords: crate::sample::unit_vector::<8>(rng) }
    }

    /// Random point constrained to the singular set `|x| = |y|`.
    pub fn random_singular(rng: &mut rand_chacha::ChaCha8Rng) -> Self {
        let x = crate::sample::unit_vector::<4>(rng);
        let y = crate::sample::unit_vector::<4>(rng);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut c = Vec8::zeros();
        for i in 0..4 {
            c[i] = s * x[i];
            c[i + 4] = s * y[i];
        }
        SpherePoint { coords: c }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renormalizes() {
        let p = SpherePoint::from_array([3.0, 0.0, 0.0, 0.0, 4.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((p.coords().norm() - 1.0).abs() < 1e-15);
        assert!((p.x_norm_sq() - 0.36).abs() < 1e-15);
    }

    #[test]
    fn rejects_tiny_norm() {
        assert!(SpherePoint::from_array([1e-9, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn singular_samples_sit_on_the_singular_set() {
        let mut rng = crate::sample::seeded_rng(5);
        for _ in 0..20 {
            let p = SpherePoint::random_singular(&mut rng);
            assert!(p.delta().abs() < 1e-14);
        }
    }
}
