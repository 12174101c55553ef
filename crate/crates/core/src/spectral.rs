//! Sublaplacian spectra on harmonic polynomial spaces.
//!
//! Operator matrices are assembled in exact rational arithmetic in the
//! echelon harmonic basis; orthonormalization uses the exact LDL^T of the
//! Gram matrix, and floating point enters only in the final diagonal
//! scaling and the symmetric eigensolve.
//!
//! Both tensor-product identities relating the sublaplacians to the
//! 3-sphere Laplacians and the mixed term `B` are checked exactly. They
//! hold with opposite signs of `2B`, with one subtlety: the trivializable
//! identity requires `B` built from left-multiplication block fields, the
//! quaternionic one from right-multiplication block fields (the two mixed
//! operators differ, although either `B` vanishes on functions of a single
//! block, which is all the spectral-inclusion argument uses).

use crate::clifford::{block_fields, BlockSide, Chirality, CliffordSystem, SkewMatrix8};
use crate::exact::{rat, rat_to_f64, solve_right_unit_lower_transpose, Rat, RatMat};
use crate::harmonic::{HarmonicSpace, OrthoFactors, DEFAULT_K_MAX};
use crate::poly::Polynomial8;
use crate::report::CheckReport;
use crate::sphere::SpherePoint;
use nalgebra::DMatrix;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("degree {degree} exceeds the configured maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("operator has no matrix on harmonic spaces: {0}")]
    UnsupportedOperator(String),
}

/// The degree-preserving operators of the spectral pipeline, plus the
/// intrinsic sublaplacian (pointwise-evaluable only; its drift is not
/// polynomial and does not preserve harmonic spaces).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorSpec {
    SphereLaplacian,
    TrivializableSumSquares,
    TrivializableIntrinsic,
    QuaternionicSublaplacian,
    /// `Delta_{S^3}` acting on the first quaternion block.
    S3LeftBlock,
    /// `Delta_{S^3}` acting on the second quaternion block.
    S3RightBlock,
    /// The mixed term `B = sum_l W_l (x) W_l` for the given multiplication
    /// chirality of the block fields.
    MixedB(Chirality),
}

/// Eigenvalue `k (k + 6)` of the sphere Laplacian on degree-`k` harmonics.
pub fn sphere_eigenvalue(k: usize) -> i64 {
    (k * (k + 6)) as i64
}

fn check_degree(k: usize) -> Result<(), SpectralError> {
    if k > DEFAULT_K_MAX {
        return Err(SpectralError::DegreeTooLarge { degree: k, max: DEFAULT_K_MAX });
    }
    Ok(())
}

/// Harmonic basis of degree `k` (bounded by the configured maximum).
pub fn harmonic_basis(k: usize) -> Result<HarmonicSpace, SpectralError> {
    check_degree(k)?;
    Ok(HarmonicSpace::new(k))
}

fn expand_exact(space: &HarmonicSpace, p: &Polynomial8, what: &str) -> Vec<Rat> {
    if cfg!(debug_assertions) {
        space
            .expand_checked(p)
            .unwrap_or_else(|| panic!("{what}: image left the harmonic space"))
    } else {
        space.expand(p)
    }
}

/// Exact matrix of the derivation `sum M_ij x_j d_i` on the harmonic basis
/// (coefficient-vector convention: column `j` is the expansion of the image
/// of basis element `j`; on degree-one harmonics this is `M^T`).
pub fn field_action_matrix(m: &SkewMatrix8, space: &HarmonicSpace) -> RatMat {
    derivation_matrix(m.entries(), space)
}

fn derivation_matrix(m: &[[i64; 8]; 8], space: &HarmonicSpace) -> RatMat {
    let n = space.dimension();
    let mut out = RatMat::zeros(n, n);
    for (j, b) in space.basis().iter().enumerate() {
        let img = b.derive_linear_field(m);
        for (i, c) in expand_exact(space, &img, "derivation").into_iter().enumerate() {
            out[(i, j)] = c;
        }
    }
    out
}

/// `sign * sum_m D(m)^2` on the harmonic basis.
fn squares_matrix(mats: &[[[i64; 8]; 8]], sign: i64, space: &HarmonicSpace) -> RatMat {
    let n = space.dimension();
    let mut out = RatMat::zeros(n, n);
    let s = rat(sign);
    for m in mats {
        for (j, b) in space.basis().iter().enumerate() {
            let img = b.derive_linear_field(m).derive_linear_field(m);
            for (i, c) in expand_exact(space, &img, "squared derivation").into_iter().enumerate() {
                if !c.is_zero() {
                    let v = &c * &s;
                    out[(i, j)] += v;
                }
            }
        }
    }
    out
}

fn mixed_b_matrix(chir: Chirality, space: &HarmonicSpace) -> RatMat {
    let n = space.dimension();
    let mut out = RatMat::zeros(n, n);
    for (wx, wy) in crate::clifford::mixed_field_pairs(chir) {
        for (j, b) in space.basis().iter().enumerate() {
            let img = b.derive_linear_field(&wy).derive_linear_field(&wx);
            for (i, c) in expand_exact(space, &img, "mixed term").into_iter().enumerate() {
                out[(i, j)] += c;
            }
        }
    }
    out
}

/// Exact operator matrix on the degree-`k` harmonic basis.
///
/// The sphere Laplacian enters as the scalar `k(k+6)`; both sublaplacians
/// are that scalar plus the squares of their three vertical fields.
pub fn operator_matrix(
    sys: &CliffordSystem,
    op: &OperatorSpec,
    k: usize,
) -> Result<RatMat, SpectralError> {
    let space = harmonic_basis(k)?;
    operator_matrix_on(sys, op, &space)
}

fn operator_matrix_on(
    sys: &CliffordSystem,
    op: &OperatorSpec,
    space: &HarmonicSpace,
) -> Result<RatMat, SpectralError> {
    let k = space.degree();
    let n = space.dimension();
    let scalar = RatMat::scalar(n, rat(sphere_eigenvalue(k)));
    let gens = |range: std::ops::Range<usize>| -> Vec<[[i64; 8]; 8]> {
        range.map(|i| *sys.generators[i].entries()).collect()
    };
    Ok(match op {
        OperatorSpec::SphereLaplacian => scalar,
        OperatorSpec::TrivializableSumSquares => {
            let mut m = squares_matrix(&gens(4..7), 1, space);
            for i in 0..n {
                m[(i, i)] += rat(sphere_eigenvalue(k));
            }
            m
        }
        OperatorSpec::QuaternionicSublaplacian => {
            let verts: Vec<[[i64; 8]; 8]> = sys.vertical.iter().map(|v| *v.entries()).collect();
            let mut m = squares_matrix(&verts, 1, space);
            for i in 0..n {
                m[(i, i)] += rat(sphere_eigenvalue(k));
            }
            m
        }
        OperatorSpec::S3LeftBlock => {
            squares_matrix(&block_fields(BlockSide::X, Chirality::Right), -1, space)
        }
        OperatorSpec::S3RightBlock => {
            squares_matrix(&block_fields(BlockSide::Y, Chirality::Right), -1, space)
        }
        OperatorSpec::MixedB(chir) => mixed_b_matrix(*chir, space),
        OperatorSpec::TrivializableIntrinsic => {
            return Err(SpectralError::UnsupportedOperator(
                "the intrinsic sublaplacian's drift does not preserve harmonic spaces".into(),
            ))
        }
    })
}

/// `-sum_i D(A_i)^2` for an arbitrary integer generator quadruple; used for
/// conjugated systems.
pub fn sum_of_squares_matrix(
    generators: &[SkewMatrix8],
    k: usize,
) -> Result<RatMat, SpectralError> {
    let space = harmonic_basis(k)?;
    let mats: Vec<[[i64; 8]; 8]> = generators.iter().map(|g| *g.entries()).collect();
    Ok(squares_matrix(&mats, -1, &space))
}

/// Exact check of both tensor-product identities on degree-`k` harmonics:
///
/// * trivializable: `Delta~ = Delta_{S^7} - Dx - Dy - 2 B_left`
/// * quaternionic:  `Delta_Q = Delta_{S^7} - Dx - Dy + 2 B_right`
pub fn verify_tensor_identity(sys: &CliffordSystem, k: usize) -> Result<CheckReport, SpectralError> {
    let space = harmonic_basis(k)?;
    let mut report = CheckReport::new(format!("tensor identities on H_{k}"));
    let dx = operator_matrix_on(sys, &OperatorSpec::S3LeftBlock, &space)?;
    let dy = operator_matrix_on(sys, &OperatorSpec::S3RightBlock, &space)?;
    let n = space.dimension();
    let lam = RatMat::scalar(n, rat(sphere_eigenvalue(k)));

    let mut rhs_t = lam.clone().sub(&dx).sub(&dy);
    rhs_t.add_assign_scaled(&mixed_b_matrix(Chirality::Left, &space), &rat(-2));
    let lhs_t = operator_matrix_on(sys, &OperatorSpec::TrivializableSumSquares, &space)?;
    let resid_t = lhs_t.sub(&rhs_t).max_abs_f64();
    report.record(resid_t, 1e-12, "trivializable identity (left-chirality B)");

    let mut rhs_q = lam.sub(&dx).sub(&dy);
    rhs_q.add_assign_scaled(&mixed_b_matrix(Chirality::Right, &space), &rat(2));
    let lhs_q = operator_matrix_on(sys, &OperatorSpec::QuaternionicSublaplacian, &space)?;
    let resid_q = lhs_q.sub(&rhs_q).max_abs_f64();
    report.record(resid_q, 1e-12, "quaternionic identity (right-chirality B)");
    Ok(report)
}

/// Eigenvalues with multiplicities after clustering.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub degree: usize,
    pub dimension: usize,
    pub eigenvalues: Vec<(f64, usize)>,
    pub cluster_tol: f64,
}

/// Default eigenvalue clustering tolerance.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Eigendecomposition in the exact-basis coordinates: `values[i]` sorted
/// ascending, `basis_vectors` columns are eigenvectors expressed against the
/// echelon harmonic basis, orthonormal for the averaged sphere inner
/// product.
pub struct Eigendecomposition {
    pub space: HarmonicSpace,
    pub values: Vec<f64>,
    pub basis_vectors: DMatrix<f64>,
}

fn block_ranges(factors: &OrthoFactors, space: &HarmonicSpace) -> Vec<(usize, usize)> {
    space
        .classes()
        .iter()
        .zip(&factors.l_blocks)
        .map(|(cb, l)| {
            assert_eq!(cb.len, l.rows);
            (cb.start, cb.len)
        })
        .collect()
}

/// Similarity transform to the orthonormal basis:
/// `S = D^{1/2} L^T M L^{-T} D^{-1/2}`, with everything but the final
/// diagonal scaling exact. Asymmetry beyond a few ulps would indicate a
/// non-self-adjoint operator and is rejected.
fn orthonormal_symmetric_matrix(
    space: &HarmonicSpace,
    factors: &OrthoFactors,
    m: &RatMat,
) -> DMatrix<f64> {
    let n = space.dimension();
    let ranges = block_ranges(factors, space);
    // T1 = L^T M (block rows, ascending in-place update)
    let mut t1 = m.clone();
    for ((start, len), l) in ranges.iter().zip(&factors.l_blocks) {
        for i in 0..*len {
            for jj in (i + 1)..*len {
                let f = l[(jj, i)].clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let v = &t1[(start + jj, c)] * &f;
                    t1[(start + i, c)] += v;
                }
            }
        }
    }
    // T2 = T1 L^{-T} (block columns)
    let mut t2 = t1;
    for ((start, len), l) in ranges.iter().zip(&factors.l_blocks) {
        let mut sub = RatMat::zeros(n, *len);
        for r in 0..n {
            for c in 0..*len {
                sub[(r, c)] = t2[(r, start + c)].clone();
            }
        }
        let solved = solve_right_unit_lower_transpose(&sub, l);
        for r in 0..n {
            for c in 0..*len {
                t2[(r, start + c)] = solved[(r, c)].clone();
            }
        }
    }
    let u: Vec<f64> = factors.d.iter().map(|d| rat_to_f64(d).sqrt()).collect();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = u[i] * rat_to_f64(&t2[(i, j)]) / u[j];
        }
    }
    let asym = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .fold(0.0f64, |acc, (i, j)| acc.max((s[(i, j)] - s[(j, i)]).abs()));
    assert!(asym < 1e-12, "operator not symmetric in the orthonormal basis: {asym:.3e}");
    // average away the scaling roundoff
    let st = s.transpose();
    (s + st) * 0.5
}

/// Full eigendecomposition of an operator on degree-`k` harmonics.
pub fn eigendecomposition(
    sys: &CliffordSystem,
    op: &OperatorSpec,
    k: usize,
) -> Result<Eigendecomposition, SpectralError> {
    let space = harmonic_basis(k)?;
    let m = operator_matrix_on(sys, op, &space)?;
    Ok(eigendecomposition_of_matrix(space, &m))
}

/// Eigendecomposition of an exact operator matrix given in the echelon
/// basis of `space`.
pub fn eigendecomposition_of_matrix(space: HarmonicSpace, m: &RatMat) -> Eigendecomposition {
    let factors = space.gram_ldl();
    let s = orthonormal_symmetric_matrix(&space, &factors, m);
    let se = s.symmetric_eigen();
    let n = space.dimension();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    // back to basis coordinates: C = L^{-T} D^{-1/2} V
    let ranges = block_ranges(&factors, &space);
    let u: Vec<f64> = factors.d.iter().map(|d| rat_to_f64(d).sqrt()).collect();
    let mut c = DMatrix::<f64>::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            c[(i, col)] = se.eigenvectors[(i, src)] / u[i];
        }
    }
    for ((start, len), l) in ranges.iter().zip(&factors.l_blocks) {
        let lf: Vec<Vec<f64>> = (0..*len)
            .map(|i| (0..*len).map(|j| rat_to_f64(&l[(i, j)])).collect())
            .collect();
        for col in 0..n {
            // solve L^T c = y by back substitution within the block
            for i in (0..*len).rev() {
                let mut v = c[(start + i, col)];
                for j in (i + 1)..*len {
                    v -= lf[j][i] * c[(start + j, col)];
                }
                c[(start + i, col)] = v;
            }
        }
    }
    Eigendecomposition { space, values, basis_vectors: c }
}

/// Groups sorted eigenvalues into clusters separated by more than the
/// tolerance.
pub fn cluster_eigenvalues(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some((mean, count)) if (v - *mean).abs() <= tol * (1.0 + v.abs()) => {
                *mean = (*mean * *count as f64 + v) / (*count as f64 + 1.0);
                *count += 1;
            }
            _ => out.push((v, 1)),
        }
    }
    out
}

/// Clustered spectrum of an operator on degree-`k` harmonics.
pub fn spectrum(
    sys: &CliffordSystem,
    op: &OperatorSpec,
    k: usize,
    cluster_tol: f64,
) -> Result<SpectrumReport, SpectralError> {
    let dec = eigendecomposition(sys, op, k)?;
    let eigenvalues = cluster_eigenvalues(&dec.values, cluster_tol);
    debug_assert_eq!(eigenvalues.iter().map(|(_, m)| m).sum::<usize>(), dec.space.dimension());
    Ok(SpectrumReport { degree: k, dimension: dec.space.dimension(), eigenvalues, cluster_tol })
}

/// One unmatched quaternionic eigenvalue in the per-degree comparison. If
/// its eigenspace vanishes at the north pole the global inclusion statement
/// is silent about it, and the report distinguishes that case.
#[derive(Debug, Clone)]
pub struct UnmatchedEigenvalue {
    pub value: f64,
    pub multiplicity: usize,
    pub eigenspace_vanishes_at_np: bool,
}

#[derive(Debug, Clone)]
pub struct DegreeInclusion {
    pub degree: usize,
    /// (quaternionic value, multiplicity, matched trivializable value,
    /// trivializable multiplicity)
    pub matched: Vec<(f64, usize, f64, usize)>,
    pub unmatched: Vec<UnmatchedEigenvalue>,
    pub spectra_differ: bool,
}

#[derive(Debug, Clone)]
pub struct InclusionReport {
    pub per_degree: Vec<DegreeInclusion>,
    pub tol: f64,
    /// Every quaternionic eigenvalue on every degree matched one of the
    /// trivializable sum-of-squares operator.
    pub holds: bool,
    /// The operators are distinguishable: some degree has differing
    /// eigenvalue sets or multiplicities.
    pub distinguishable: bool,
}

/// Per-degree spectral inclusion of the quaternionic sublaplacian in the
/// trivializable sum-of-squares operator, for all degrees up to `k_max`.
pub fn spectra_inclusion(
    sys: &CliffordSystem,
    k_max: usize,
    tol: f64,
) -> Result<InclusionReport, SpectralError> {
    check_degree(k_max)?;
    let mut per_degree = Vec::new();
    let mut holds = true;
    let mut distinguishable = false;
    for k in 0..=k_max {
        let dec_q = eigendecomposition(sys, &OperatorSpec::QuaternionicSublaplacian, k)?;
        let clusters_q = cluster_eigenvalues(&dec_q.values, DEFAULT_CLUSTER_TOL);
        let spec_t = spectrum(sys, &OperatorSpec::TrivializableSumSquares, k, DEFAULT_CLUSTER_TOL)?;
        let mut matched = Vec::new();
        let mut unmatched = Vec::new();
        let mut cursor = 0usize;
        for &(vq, mq) in &clusters_q {
            match spec_t
                .eigenvalues
                .iter()
                .find(|(vt, _)| (vq - vt).abs() <= tol * (1.0 + vq.abs()))
            {
                Some(&(vt, mt)) => matched.push((vq, mq, vt, mt)),
                None => {
                    let np = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
                    let sum = eigenspace_value_sum(&dec_q, cursor, mq, &np);
                    unmatched.push(UnmatchedEigenvalue {
                        value: vq,
                        multiplicity: mq,
                        eigenspace_vanishes_at_np: sum < 1e-10,
                    });
                }
            }
            cursor += mq;
        }
        // strict unmatched values (eigenspace visible at np) break inclusion
        if unmatched.iter().any(|u| !u.eigenspace_vanishes_at_np) {
            holds = false;
        }
        let same = clusters_q.len() == spec_t.eigenvalues.len()
            && clusters_q.iter().zip(&spec_t.eigenvalues).all(|((vq, mq), (vt, mt))| {
                (vq - vt).abs() <= tol * (1.0 + vq.abs()) && mq == mt
            });
        if !same {
            distinguishable = true;
        }
        per_degree.push(DegreeInclusion {
            degree: k,
            matched,
            unmatched,
            spectra_differ: !same,
        });
    }
    Ok(InclusionReport { per_degree, tol, holds, distinguishable })
}

/// `sum_j |psi_j(z)|^2` over eigenvectors `first..first+count` of a
/// decomposition (averaged-inner-product normalization, so a full
/// eigenspace sum equals its multiplicity at every point of the sphere).
pub fn eigenspace_value_sum(
    dec: &Eigendecomposition,
    first: usize,
    count: usize,
    z: &[f64; 8],
) -> f64 {
    let bv = dec.space.eval_basis(z);
    let mut acc = 0.0;
    for col in first..first + count {
        let mut v = 0.0;
        for i in 0..dec.space.dimension() {
            v += dec.basis_vectors[(i, col)] * bv[i];
        }
        acc += v * v;
    }
    acc
}

/// Constancy of the eigenspace pointwise sums of the quaternionic
/// sublaplacian on degree-`k` harmonics: for each eigenvalue cluster,
/// `sum_j |psi_j|^2` is constant over the sphere and the multiplicity
/// equals `vol(S^7)` times the constant (for unit-`L^2(d sigma)`
/// eigenfunctions).
pub fn eigenspace_pointwise_sum(
    sys: &CliffordSystem,
    k: usize,
    samples: &[SpherePoint],
) -> Result<CheckReport, SpectralError> {
    let dec = eigendecomposition(sys, &OperatorSpec::QuaternionicSublaplacian, k)?;
    let clusters = cluster_eigenvalues(&dec.values, DEFAULT_CLUSTER_TOL);
    let mut report = CheckReport::new(format!("eigenspace pointwise sums, degree {k}"));
    let mut first = 0usize;
    for (value, mult) in clusters {
        let sums: Vec<f64> = samples
            .iter()
            .map(|z| {
                let c: [f64; 8] = std::array::from_fn(|i| z.coords()[i]);
                eigenspace_value_sum(&dec, first, mult, &c)
            })
            .collect();
        let mean: f64 = sums.iter().sum::<f64>() / sums.len() as f64;
        for s in &sums {
            report.record((s - mean) / mean, 1e-6, format!("constancy at eigenvalue {value:.6}"));
        }
        // multiplicity = vol(S^7) * constant, with the constant in true
        // L^2(d sigma) normalization = mean / vol
        report.record(
            (mean - mult as f64) / mult as f64,
            1e-6,
            format!("multiplicity match at eigenvalue {value:.6}"),
        );
        first += mult;
    }
    Ok(report)
}
