//! Point-level geometry: field evaluation, structure constants, bracket
//! generation, Popp matrices and densities, horizontality, and pointwise
//! application of the sublaplacians to polynomials.

use crate::clifford::{quaternionic_pairing, CliffordSystem, SkewMatrix8};
use crate::poly::Polynomial8;
use crate::spectral::OperatorSpec;
use crate::sphere::SpherePoint;
use crate::{Mat3, Vec8};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SrError {
    #[error("vector is not tangent at the point: <z, v> = {0:.3e}")]
    NotTangent(f64),
}

/// Evaluate the linear vector field of `A` at `z`: the value is `A z`,
/// tangent to the sphere because `A` is skew.
pub fn field_at(a: &SkewMatrix8, z: &SpherePoint) -> Vec8 {
    a.apply(z.coords())
}

/// The full tensor of adapted structure constants at a point,
/// `b[i][j][k] = <[X_{i+1}, X_{j+1}](z), X_{k+1}(z)> = -2 <A_i A_j z, A_k z>`
/// for all seven frame indices (0-based here).
///
/// Only the block `i, j < 4`, `k >= 4` carries the vertical bracket data of
/// the rank-4 distribution; the remaining entries feed the chart expansion
/// of the frame.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    b: [[[f64; 7]; 7]; 7],
}

impl StructureConstants {
    pub fn at(sys: &CliffordSystem, z: &SpherePoint) -> Self {
        let fields: Vec<Vec8> = sys.generators.iter().map(|a| a.apply(z.coords())).collect();
        let mut b = [[[0.0; 7]; 7]; 7];
        for i in 0..7 {
            for j in (i + 1)..7 {
                // [X_i, X_j] = -2 X(A_i A_j); evaluate A_i (A_j z) directly.
                let w = sys.generators[i].apply(&fields[j]) * -2.0;
                for k in 0..7 {
                    let v = w.dot(&fields[k]);
                    b[i][j][k] = v;
                    b[j][i][k] = -v;
                }
            }
        }
        StructureConstants { b }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.b[i][j][k]
    }

    /// Vertical component (`k` in `0..3` indexing `X_5..X_7`) of the bracket
    /// of two horizontal frame fields (`i, j` in `0..4`).
    pub fn vertical(&self, i: usize, j: usize, k: usize) -> f64 {
        self.b[i][j][k + 4]
    }
}

/// Rank of the 10x8 matrix stacking the four horizontal fields and their six
/// brackets; 7 everywhere (bracket generating of step two).
pub fn bracket_generating_rank(sys: &CliffordSystem, z: &SpherePoint) -> usize {
    let mut rows: Vec<Vec8> = sys.horizontal().iter().map(|a| a.apply(z.coords())).collect();
    for i in 0..4 {
        for j in (i + 1)..4 {
            let v = sys.generators[i].apply(&sys.generators[j].apply(z.coords()));
            rows.push(v);
        }
    }
    rank_with_cutoff(&rows, 1e-10)
}

fn rank_with_cutoff(rows: &[Vec8], rel_cutoff: f64) -> usize {
    let m = nalgebra::DMatrix::<f64>::from_fn(rows.len(), 8, |r, c| rows[r][c]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_cutoff * max).count()
}

/// The 3x3 Popp matrix `B_T(z)` with entries
/// `sum_{i,j<4} b_ij^k b_ij^l`; equals `16 (1 - 2 |x|^2 |y|^2) Id`.
pub fn popp_matrix_t(sys: &CliffordSystem, z: &SpherePoint) -> Mat3 {
    let b = StructureConstants::at(sys, z);
    Mat3::from_fn(|k, l| {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += b.vertical(i, j, k) * b.vertical(i, j, l);
            }
        }
        s
    })
}

/// Popp density of the trivializable structure against the standard volume,
/// `g(z) = [16 (1 - 2 |x|^2 |y|^2)]^{-3/2}`.
pub fn popp_density_t(z: &SpherePoint) -> f64 {
    let s = 16.0 * (1.0 - 2.0 * z.x_norm_sq() * z.y_norm_sq());
    s.powf(-1.5)
}

/// Popp density of the quaternionic Hopf structure: the constant `16^{-3/2}`.
pub fn popp_density_q() -> f64 {
    0.015625
}

/// Horizontality test for the Hopf structure with both characterizations:
/// vanishing of the quaternionic pairing `<z, v>_H` and orthogonality to the
/// three vertical fields together with `z`. The two routes compute the same
/// four numbers through different arithmetic and must agree.
pub fn is_hopf_horizontal(
    sys: &CliffordSystem,
    z: &SpherePoint,
    v: &Vec8,
    tol: f64,
) -> Result<bool, SrError> {
    let zc = z.coords();
    let radial = zc.dot(v);
    if radial.abs() > tol {
        return Err(SrError::NotTangent(radial));
    }
    let pairing = quaternionic_pairing(zc, v);
    let by_pairing = pairing.max_abs() <= tol;

    let mut worst = radial.abs();
    for vert in &sys.vertical {
        worst = worst.max(vert.apply(zc).dot(v).abs());
    }
    let by_orthogonality = worst <= tol;
    assert_eq!(
        by_pairing, by_orthogonality,
        "quaternionic pairing and vertical-orthogonality characterizations disagree"
    );
    Ok(by_pairing)
}

/// The drift coefficients `X_i(h)` of the intrinsic sublaplacian, with
/// `h = -(3/2) log(1 - 2 |x|^2 |y|^2)`:
/// `X_i h = 3 X_i(|x|^2 |y|^2) / (1 - 2 |x|^2 |y|^2)`.
pub fn intrinsic_drift_t(sys: &CliffordSystem, z: &SpherePoint) -> [f64; 4] {
    let x2 = z.x_norm_sq();
    let y2 = z.y_norm_sq();
    let denom = 1.0 - 2.0 * x2 * y2;
    let x = z.x_block();
    let y = z.y_block();
    let mut out = [0.0; 4];
    for (i, a) in sys.horizontal().iter().enumerate() {
        let az = a.apply(z.coords());
        // X_i(|x|^2 |y|^2) by the product rule on the two block norms.
        let dx = 2.0 * (x[0] * az[0] + x[1] * az[1] + x[2] * az[2] + x[3] * az[3]);
        let dy = 2.0 * (y[0] * az[4] + y[1] * az[5] + y[2] * az[6] + y[3] * az[7]);
        let dp = y2 * dx + x2 * dy;
        out[i] = 3.0 * dp / denom;
    }
    out
}

fn second_derivative_value(m: &[[i64; 8]; 8], f: &Polynomial8, z: &[f64; 8]) -> f64 {
    f.derive_linear_field(m).derive_linear_field(m).eval(z)
}

/// Pointwise application of a sublaplacian (or one of its tensor factors) to
/// a polynomial, with exact differentiation and float evaluation at the end.
///
/// The sphere Laplacian is applied through the full frame of 28 coordinate
/// rotations, so every operator kind is evaluable on any polynomial without
/// harmonic decomposition.
pub fn apply_sublaplacian(
    sys: &CliffordSystem,
    op: &OperatorSpec,
    f: &Polynomial8,
    z: &SpherePoint,
) -> f64 {
    let zc: [f64; 8] = std::array::from_fn(|i| z.coords()[i]);
    match op {
        OperatorSpec::SphereLaplacian => sphere_laplacian_value(f, &zc),
        OperatorSpec::TrivializableSumSquares => {
            let mut acc = 0.0;
            for a in sys.horizontal() {
                acc -= second_derivative_value(a.entries(), f, &zc);
            }
            acc
        }
        OperatorSpec::TrivializableIntrinsic => {
            let drift = intrinsic_drift_t(sys, z);
            let mut acc = 0.0;
            for (i, a) in sys.horizontal().iter().enumerate() {
                acc -= second_derivative_value(a.entries(), f, &zc);
                acc -= drift[i] * f.derive_linear_field(a.entries()).eval(&zc);
            }
            acc
        }
        OperatorSpec::QuaternionicSublaplacian => {
            let mut acc = sphere_laplacian_value(f, &zc);
            for v in &sys.vertical {
                acc += second_derivative_value(v.entries(), f, &zc);
            }
            acc
        }
        OperatorSpec::S3LeftBlock => {
            let mut acc = 0.0;
            for m in crate::clifford::s3_block_fields(crate::clifford::BlockSide::X) {
                acc -= second_derivative_value(&m, f, &zc);
            }
            acc
        }
        OperatorSpec::S3RightBlock => {
            let mut acc = 0.0;
            for m in crate::clifford::s3_block_fields(crate::clifford::BlockSide::Y) {
                acc -= second_derivative_value(&m, f, &zc);
            }
            acc
        }
        OperatorSpec::MixedB(chir) => {
            let mut acc = 0.0;
            for (wx, wy) in crate::clifford::mixed_field_pairs(*chir) {
                acc += f.derive_linear_field(&wy).derive_linear_field(&wx).eval(&zc);
            }
            acc
        }
    }
}

fn sphere_laplacian_value(f: &Polynomial8, z: &[f64; 8]) -> f64 {
    let mut acc = 0.0;
    for p in 0..8 {
        for q in (p + 1)..8 {
            let e = crate::clifford::rotation_generator(p, q);
            acc -= second_derivative_value(&e, f, z);
        }
    }
    acc
}
