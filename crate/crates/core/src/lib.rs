//! Computational laboratory for the two rank-4 subriemannian structures on
//! the 7-sphere: the trivializable structure spanned by four anti-commuting
//! Clifford generators and the quaternionic Hopf structure.
//!
//! The crate constructs the defining matrix frames, computes Popp measures,
//! tangent-group data and type classification, evaluates subelliptic heat
//! kernels on the step-two tangent groups together with the first heat
//! invariants, and computes sublaplacian spectra on spaces of harmonic
//! polynomials in eight variables.
//!
//! Everything algebraic is done in exact integer or rational arithmetic;
//! floating point enters only where a continuous parameter does (random
//! points, quadrature, eigensolves).

pub mod clifford;
pub mod exact;
pub mod harmonic;
pub mod heat;
pub mod poly;
pub mod quad;
pub mod quaternion;
pub mod report;
pub mod sample;
pub mod special;
pub mod spectral;
pub mod sphere;
pub mod sr;
pub mod tangent;
pub mod verify;

/// Dense fixed-size float matrices used throughout the point-level geometry.
pub type Mat8 = nalgebra::SMatrix<f64, 8, 8>;
pub type Mat4 = nalgebra::SMatrix<f64, 4, 4>;
pub type Mat3 = nalgebra::SMatrix<f64, 3, 3>;
pub type Vec8 = nalgebra::SVector<f64, 8>;
pub type Vec4 = nalgebra::SVector<f64, 4>;
pub type Vec3 = nalgebra::SVector<f64, 3>;

/// Volume of the unit 7-sphere, `2 pi^4 / Gamma(4) = pi^4 / 3`.
pub const VOL_S7: f64 = 32.469697011334144; // pi^4 / 3

pub use clifford::{build_canonical_system, CliffordSystem, SkewMatrix8};
pub use report::CheckReport;
pub use sphere::SpherePoint;

#[cfg(test)]
mod tests {
    #[test]
    fn vol_s7_constant() {
        let pi4 = std::f64::consts::PI.powi(4);
        assert!((super::VOL_S7 - pi4 / 3.0).abs() < 1e-14);
    }
}
