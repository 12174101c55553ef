//! The matrix data defining both subriemannian structures on the 7-sphere.
//!
//! Seven anti-commuting skew-symmetric 8x8 matrices `A_1..A_7` span the
//! orthonormal global frame of the trivializable structure; the vertical
//! generators of the quaternionic Hopf fibration are simultaneous right
//! multiplication by `i, j, k` on both quaternion blocks of `R^8 = H^2`.
//! Every defining matrix is a signed permutation with entries in
//! `{-1, 0, 1}`, and all identities of this module are checked in exact
//! integer arithmetic.

use crate::quaternion::{self, Quaternion};
use crate::report::CheckReport;
use crate::{Mat4, Mat8, Vec8};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliffordError {
    #[error("conjugating matrix is not orthogonal: max |C^T C - Id| = {0:.3e}")]
    NonOrthogonal(f64),
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("matrix is not a signed permutation")]
    NotSignedPermutation,
}

/// A skew-symmetric signed-permutation matrix with integer entries.
///
/// All matrices defining the two structures (the generators `A_i`, the
/// quaternion blocks embedded in `R^8`, the Hopf vertical generators) are of
/// this form, which is what makes exact verification possible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkewMatrix8 {
    entries: [[i64; 8]; 8],
}

impl SkewMatrix8 {
    /// Validates skew-symmetry and the signed-permutation shape.
    pub fn new(entries: [[i64; 8]; 8]) -> Result<Self, CliffordError> {
        for i in 0..8 {
            for j in 0..8 {
                if entries[i][j] != -entries[j][i] {
                    return Err(CliffordError::NotSkew);
                }
            }
        }
        for i in 0..8 {
            let row_nonzero = entries[i].iter().filter(|v| **v != 0).count();
            let col_nonzero = (0..8).filter(|&r| entries[r][i] != 0).count();
            let unit = entries[i].iter().all(|v| v.abs() <= 1);
            if row_nonzero != 1 || col_nonzero != 1 || !unit {
                return Err(CliffordError::NotSignedPermutation);
            }
        }
        Ok(SkewMatrix8 { entries })
    }

    pub fn entries(&self) -> &[[i64; 8]; 8] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn to_f64(&self) -> Mat8 {
        Mat8::from_fn(|r, c| self.entries[r][c] as f64)
    }

    /// Apply to a vector; the result is exact for integer inputs.
    pub fn apply(&self, v: &Vec8) -> Vec8 {
        let mut out = Vec8::zeros();
        for (i, row) in self.entries.iter().enumerate() {
            let mut s = 0.0;
            for (j, &e) in row.iter().enumerate() {
                if e != 0 {
                    s += e as f64 * v[j];
                }
            }
            out[i] = s;
        }
        out
    }
}

/// Exact product of integer 8x8 matrices.
pub fn int_mul(a: &[[i64; 8]; 8], b: &[[i64; 8]; 8]) -> [[i64; 8]; 8] {
    let mut out = [[0i64; 8]; 8];
    for i in 0..8 {
        for k in 0..8 {
            let aik = a[i][k];
            if aik == 0 {
                continue;
            }
            for j in 0..8 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn int_transpose(a: &[[i64; 8]; 8]) -> [[i64; 8]; 8] {
    let mut out = [[0i64; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            out[i][j] = a[j][i];
        }
    }
    out
}

fn embed_blocks(tl: &[[i64; 4]; 4], tr: &[[i64; 4]; 4], bl: &[[i64; 4]; 4], br: &[[i64; 4]; 4]) -> [[i64; 8]; 8] {
    let mut out = [[0i64; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = tl[i][j];
            out[i][j + 4] = tr[i][j];
            out[i + 4][j] = bl[i][j];
            out[i + 4][j + 4] = br[i][j];
        }
    }
    out
}

const Z4: [[i64; 4]; 4] = [[0; 4]; 4];
const ID4: [[i64; 4]; 4] = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];

fn neg4(m: &[[i64; 4]; 4]) -> [[i64; 4]; 4] {
    let mut out = *m;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v = -*v;
        }
    }
    out
}

/// The seven generators, the three 4x4 quaternion blocks they are built
/// from, and the three Hopf vertical generators.
#[derive(Debug, Clone)]
pub struct CliffordSystem {
    /// `A_1 .. A_7`, pairwise anti-commuting, each squaring to `-Id`.
    pub generators: Vec<SkewMatrix8>,
    /// `B_1 = R_k`, `B_2 = R_j`, `B_3 = R_{-i}`: right quaternion
    /// multiplications commuting with all left multiplications.
    pub blocks: Vec<Mat4>,
    /// Matrices of the Hopf vertical fields `V_i, V_j, V_k`
    /// (right multiplication applied to both blocks simultaneously).
    pub vertical: Vec<SkewMatrix8>,
}

impl CliffordSystem {
    pub fn horizontal(&self) -> &[SkewMatrix8] {
        &self.generators[..4]
    }

    /// Exact anti-commutation check over all 49 generator pairs.
    pub fn verify_anticommutation(&self) -> CheckReport {
        let mut report = CheckReport::new("anticommutation A_i A_j + A_j A_i = -2 delta Id");
        for i in 0..7 {
            for j in 0..7 {
                let mut r = int_mul(self.generators[i].entries(), self.generators[j].entries());
                let other = int_mul(self.generators[j].entries(), self.generators[i].entries());
                let mut worst = 0i64;
                for a in 0..8 {
                    for b in 0..8 {
                        r[a][b] += other[a][b];
                        if i == j && a == b {
                            r[a][b] += 2;
                        }
                        worst = worst.max(r[a][b].abs());
                    }
                }
                if worst != 0 {
                    report.passed = false;
                    report.max_residual = report.max_residual.max(worst as f64);
                    report.details.push(format!("pair ({}, {}) violates by {}", i + 1, j + 1, worst));
                }
            }
        }
        report
    }
}

/// Builds the canonical system.
///
/// `A_4 .. A_7` come from the quaternionic 2x2 blocks (`A_4` the off-diagonal
/// identity pair, `A_5..A_7` block-diagonal left multiplication by `i, j, k`
/// with opposite signs on the two blocks); `A_1..A_3 = [[0, B_i], [B_i, 0]]`.
pub fn build_canonical_system() -> CliffordSystem {
    let b1 = quaternion::right_mult_int(quaternion::K);
    let b2 = quaternion::right_mult_int(quaternion::J);
    let b3 = quaternion::right_mult_int(Quaternion::new(0.0, -1.0, 0.0, 0.0));

    let li = quaternion::left_mult_int(quaternion::I);
    let lj = quaternion::left_mult_int(quaternion::J);
    let lk = quaternion::left_mult_int(quaternion::K);

    let mut generators = Vec::with_capacity(7);
    for b in [&b1, &b2, &b3] {
        generators.push(SkewMatrix8::new(embed_blocks(&Z4, b, b, &Z4)).expect("A_1..A_3"));
    }
    generators.push(SkewMatrix8::new(embed_blocks(&Z4, &ID4, &neg4(&ID4), &Z4)).expect("A_4"));
    for l in [&li, &lj, &lk] {
        generators.push(SkewMatrix8::new(embed_blocks(l, &Z4, &Z4, &neg4(l))).expect("A_5..A_7"));
    }

    let vertical = [quaternion::I, quaternion::J, quaternion::K]
        .iter()
        .map(|&l| {
            let r = quaternion::right_mult_int(l);
            SkewMatrix8::new(embed_blocks(&r, &Z4, &Z4, &r)).expect("vertical")
        })
        .collect();

    let blocks = [b1, b2, b3]
        .iter()
        .map(|b| Mat4::from_fn(|r, c| b[r][c] as f64))
        .collect();

    CliffordSystem { generators, blocks, vertical }
}

/// A generator family conjugated by an orthogonal matrix; entries are floats
/// in general, exact integers when the conjugator is a signed permutation.
#[derive(Debug, Clone)]
pub struct ConjugatedSystem {
    pub generators: Vec<Mat8>,
}

impl ConjugatedSystem {
    /// Anti-commutation within tolerance (0.0 demands exactness).
    pub fn verify_anticommutation(&self, tol: f64) -> CheckReport {
        verify_anticommutation_f64(&self.generators, tol)
    }
}

/// Anti-commutation check for float generator families.
pub fn verify_anticommutation_f64(gens: &[Mat8], tol: f64) -> CheckReport {
    let mut report = CheckReport::new("anticommutation (float)");
    for (i, a) in gens.iter().enumerate() {
        for (j, b) in gens.iter().enumerate() {
            let mut r = a * b + b * a;
            if i == j {
                r += 2.0 * Mat8::identity();
            }
            let worst = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            report.record(worst, tol, format!("pair ({}, {})", i + 1, j + 1));
        }
    }
    report
}

/// Conjugates every generator: `A_i -> C^{-1} A_i C = C^T A_i C`.
///
/// Fails with `NonOrthogonal` if `C^T C` deviates from the identity by more
/// than `1e-12`; anti-commutation is preserved by any orthogonal conjugation.
pub fn conjugate_system(sys: &CliffordSystem, c: &Mat8) -> Result<ConjugatedSystem, CliffordError> {
    let dev = (c.transpose() * c - Mat8::identity())
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if dev > 1e-12 {
        return Err(CliffordError::NonOrthogonal(dev));
    }
    let ct = c.transpose();
    let generators = sys
        .generators
        .iter()
        .map(|a| ct * a.to_f64() * c)
        .collect();
    Ok(ConjugatedSystem { generators })
}

/// Which `R^4` block of `R^8 = R^4 x R^4` a block field acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockSide {
    X,
    Y,
}

/// Left or right quaternion multiplication for block fields. The 3-sphere
/// Laplacian built from either frame is the same operator; the mixed tensor
/// term `B` is the one place the choice matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Left,
    Right,
}

fn embed_block4(side: BlockSide, m: &[[i64; 4]; 4]) -> [[i64; 8]; 8] {
    match side {
        BlockSide::X => embed_blocks(m, &Z4, &Z4, &Z4),
        BlockSide::Y => embed_blocks(&Z4, &Z4, &Z4, m),
    }
}

fn quaternion_units() -> [Quaternion; 3] {
    [quaternion::I, quaternion::J, quaternion::K]
}

/// The three multiplication fields of one block for a given chirality.
pub fn block_fields(side: BlockSide, chir: Chirality) -> [[[i64; 8]; 8]; 3] {
    let units = quaternion_units();
    std::array::from_fn(|k| {
        let m = match chir {
            Chirality::Left => quaternion::left_mult_int(units[k]),
            Chirality::Right => quaternion::right_mult_int(units[k]),
        };
        embed_block4(side, &m)
    })
}

/// Fields whose squared sum gives the 3-sphere Laplacian acting on one
/// block (chirality-independent; right multiplication is used).
pub fn s3_block_fields(side: BlockSide) -> [[[i64; 8]; 8]; 3] {
    block_fields(side, Chirality::Right)
}

/// The (x-block, y-block) field pairs whose mixed products assemble the
/// tensor cross term `B = sum_l W_l (x) W_l`.
pub fn mixed_field_pairs(chir: Chirality) -> [([[i64; 8]; 8], [[i64; 8]; 8]); 3] {
    let wx = block_fields(BlockSide::X, chir);
    let wy = block_fields(BlockSide::Y, chir);
    std::array::from_fn(|k| (wx[k], wy[k]))
}

/// Elementary rotation generator in the `(p, q)` coordinate plane; the 28 of
/// them give the round sphere Laplacian as a sum of squares.
pub fn rotation_generator(p: usize, q: usize) -> [[i64; 8]; 8] {
    let mut m = [[0i64; 8]; 8];
    m[p][q] = 1;
    m[q][p] = -1;
    m
}

/// The quaternionic hermitian pairing of two points of `R^8 = H^2`,
/// `<p, q>_H = conj(p_0) q_0 + conj(p_1) q_1`.
///
/// Its four real components equal `<p,q>, <p i, q>, <p j, q>, <p k, q>`
/// where the products act blockwise on the right.
pub fn quaternionic_pairing(p: &Vec8, q: &Vec8) -> Quaternion {
    let block = |v: &Vec8, lo: usize| Quaternion::new(v[lo], v[lo + 1], v[lo + 2], v[lo + 3]);
    let p0 = block(p, 0).conj();
    let p1 = block(p, 4).conj();
    p0.mul(block(q, 0)).add(p1.mul(block(q, 4)))
}

/// The explicit one-parameter family of isometries of the trivializable
/// structure: for `x` on the 3-sphere, `C(x)` intertwines the quaternion
/// blocks and `U = [[0, C], [C B_1, 0]]` permutes the first four generators.
pub fn isometry_c_matrix(x: &[f64; 4]) -> Mat4 {
    let [x0, x1, x2, x3] = *x;
    Mat4::new(
        x0, x1, x2, x3, //
        x3, -x2, x1, -x0, //
        -x2, -x3, x0, x1, //
        -x1, x0, x3, -x2,
    )
}

/// Assembles `U = [[0, C], [C B_1, 0]]` for the given `C`.
pub fn isometry_u_matrix(c: &Mat4, b1: &Mat4) -> Mat8 {
    let cb1 = c * b1;
    let mut u = Mat8::zeros();
    for i in 0..4 {
        for j in 0..4 {
            u[(i, j + 4)] = c[(i, j)];
            u[(i + 4, j)] = cb1[(i, j)];
        }
    }
    u
}

fn max_abs4(m: &Mat4) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

fn max_abs8(m: &Mat8) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

fn isometry_relations_residual(sys: &CliffordSystem, x: &[f64; 4]) -> f64 {
    let c = isometry_c_matrix(x);
    let (b1, b2, b3) = (&sys.blocks[0], &sys.blocks[1], &sys.blocks[2]);
    let u = isometry_u_matrix(&c, b1);
    let a = |i: usize| sys.generators[i - 1].to_f64();
    let mut worst = max_abs4(&(c.transpose() * c - Mat4::identity()));
    worst = worst.max(max_abs4(&(b3 * c - c * b1)));
    worst = worst.max(max_abs4(&(c * b3 + b1 * c)));
    worst = worst.max(max_abs4(&(c * b2 - b2 * c)));
    worst = worst.max(max_abs8(&(u * a(1) - a(4) * u)));
    for j in [2usize, 3, 4] {
        worst = worst.max(max_abs8(&(u * a(j) - a(j - 1) * u)));
    }
    worst
}

/// Verifies the isometry relations exactly at the four integer points of the
/// 3-sphere and within `1e-12` at 100 seeded random points.
pub fn check_isometry_example(sys: &CliffordSystem) -> CheckReport {
    let mut report = CheckReport::new("isometry example U = [[0,C],[C B_1,0]]");
    for k in 0..4 {
        let mut x = [0.0; 4];
        x[k] = 1.0;
        let r = isometry_relations_residual(sys, &x);
        if r != 0.0 {
            report.passed = false;
            report.max_residual = report.max_residual.max(r);
            report.details.push(format!("integer point e_{} residual {:.3e} (expected exact)", k + 1, r));
        }
    }
    let mut rng = crate::sample::seeded_rng(0x15031);
    for _ in 0..100 {
        let x = crate::sample::unit_vector::<4>(&mut rng);
        report.record(isometry_relations_residual(sys, &[x[0], x[1], x[2], x[3]]), 1e-12, "random x");
    }
    report
}
