//! Exact bases of harmonic polynomials in eight variables.
//!
//! The flat Laplacian preserves the parity signature of an exponent vector,
//! and so does the sphere inner product (odd moments vanish), so both the
//! kernel computation and the Gram factorization split into blocks indexed
//! by parity class. Blocks never exceed a few dozen rows through degree 5,
//! which keeps all rational arithmetic cheap.
//!
//! Kernel bases are kept in reduced echelon form: each basis element owns
//! one "free" monomial where it has coefficient 1 and every other basis
//! element has coefficient 0. Expanding any polynomial of the space in the
//! basis is then a coefficient read, no solving involved.

use crate::exact::{ldl, rat, rref, Rat, RatMat};
use crate::poly::{monomials_of_degree, parity_mask, Exponents, Polynomial8};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Largest degree the exact pipeline is sized for.
pub const DEFAULT_K_MAX: usize = 5;

/// `dim H_k = C(k+7, 7) - C(k+5, 7)`.
pub fn harmonic_dimension(k: usize) -> usize {
    fn binom(n: usize, r: usize) -> usize {
        if n < r {
            return 0;
        }
        let mut v = 1usize;
        for i in 0..r {
            v = v * (n - i) / (i + 1);
        }
        v
    }
    binom(k + 7, 7) - if k >= 2 { binom(k + 5, 7) } else { 0 }
}

#[derive(Debug, Clone)]
pub struct ClassBlock {
    pub start: usize,
    pub len: usize,
}

/// An exact-coefficient basis of the degree-`k` harmonic polynomials.
#[derive(Debug, Clone)]
pub struct HarmonicSpace {
    degree: usize,
    basis: Vec<Polynomial8>,
    free_monomials: Vec<Exponents>,
    free_index: BTreeMap<Exponents, usize>,
    classes: Vec<ClassBlock>,
}

impl HarmonicSpace {
    /// Builds the kernel of the flat Laplacian on homogeneous degree-`k`
    /// polynomials, class by class.
    pub fn new(k: usize) -> Self {
        let mons = monomials_of_degree(k);
        let mut by_class: BTreeMap<u8, Vec<Exponents>> = BTreeMap::new();
        for m in mons {
            by_class.entry(parity_mask(&m)).or_default().push(m);
        }
        let lower: BTreeMap<u8, Vec<Exponents>> = if k >= 2 {
            let mut map: BTreeMap<u8, Vec<Exponents>> = BTreeMap::new();
            for m in monomials_of_degree(k - 2) {
                map.entry(parity_mask(&m)).or_default().push(m);
            }
            map
        } else {
            BTreeMap::new()
        };

        let mut basis = Vec::new();
        let mut free_monomials = Vec::new();
        let mut classes = Vec::new();
        for (mask, cols) in &by_class {
            let start = basis.len();
            let rows = lower.get(mask).cloned().unwrap_or_default();
            let row_index: BTreeMap<Exponents, usize> =
                rows.iter().enumerate().map(|(i, e)| (*e, i)).collect();
            let mut lap = RatMat::zeros(rows.len(), cols.len());
            for (j, e) in cols.iter().enumerate() {
                for i in 0..8 {
                    if e[i] >= 2 {
                        let mut e2 = *e;
                        e2[i] -= 2;
                        let r = row_index[&e2];
                        lap[(r, j)] += rat(i64::from(e[i]) * i64::from(e[i] - 1));
                    }
                }
            }
            let pivots = rref(&mut lap);
            let pivot_set: Vec<usize> = pivots.clone();
            let mut is_pivot = vec![false; cols.len()];
            for &p in &pivot_set {
                is_pivot[p] = true;
            }
            for (j, col) in cols.iter().enumerate() {
                if is_pivot[j] {
                    continue;
                }
                // kernel vector: 1 at the free column, minus the reduced
                // column entries at the pivot columns
                let mut p = Polynomial8::monomial(*col, rat(1));
                for (r, &pc) in pivot_set.iter().enumerate() {
                    let v = &lap[(r, j)];
                    if !v.is_zero() {
                        p.add_term(cols[pc], -v.clone());
                    }
                }
                basis.push(p);
                free_monomials.push(*col);
            }
            classes.push(ClassBlock { start, len: basis.len() - start });
        }
        let free_index = free_monomials
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, i))
            .collect();
        let space = HarmonicSpace { degree: k, basis, free_monomials, free_index, classes };
        debug_assert_eq!(space.dimension(), harmonic_dimension(k));
        space
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Polynomial8] {
        &self.basis
    }

    pub fn classes(&self) -> &[ClassBlock] {
        &self.classes
    }

    /// The free (pivot-read) monomial owned by each basis element.
    pub fn free_monomials(&self) -> &[Exponents] {
        &self.free_monomials
    }

    /// Expansion of a polynomial of the space in the echelon basis: the
    /// coefficient on basis element `i` is the coefficient of the input at
    /// that element's free monomial.
    pub fn expand(&self, p: &Polynomial8) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dimension()];
        for (e, c) in p.terms() {
            if let Some(&i) = self.free_index.get(e) {
                out[i] = c.clone();
            }
        }
        out
    }

    /// Expansion with an exactness check: reconstructs and compares.
    pub fn expand_checked(&self, p: &Polynomial8) -> Option<Vec<Rat>> {
        let coeffs = self.expand(p);
        let mut rec = Polynomial8::zero();
        for (c, b) in coeffs.iter().zip(&self.basis) {
            rec.add_assign_scaled(b, c);
        }
        if rec == *p {
            Some(coeffs)
        } else {
            None
        }
    }

    /// Values of every basis element at a point.
    pub fn eval_basis(&self, z: &[f64; 8]) -> Vec<f64> {
        self.basis.iter().map(|p| p.eval(z)).collect()
    }

    /// Averaged sphere moment of an all-even exponent vector:
    /// `avg(z^e) = prod (e_i - 1)!! / prod_{j<|e|/2} (8 + 2j)`.
    fn moment(e: &Exponents) -> Rat {
        let mut num = Rat::one();
        let mut half = 0u32;
        for &g in e {
            debug_assert_eq!(g % 2, 0);
            half += u32::from(g) / 2;
            let mut df = 1i64;
            let mut v = i64::from(g) - 1;
            while v > 1 {
                df *= v;
                v -= 2;
            }
            num *= rat(df.max(1));
        }
        let mut den = Rat::one();
        for j in 0..half {
            den *= rat(8 + 2 * i64::from(j));
        }
        num / den
    }

    /// Gram matrix of the basis for the averaged sphere inner product
    /// (`<1, 1> = 1`); block diagonal over parity classes, exact.
    pub fn gram(&self) -> Vec<RatMat> {
        self.classes
            .iter()
            .map(|cb| {
                let mut g = RatMat::zeros(cb.len, cb.len);
                for i in 0..cb.len {
                    let pi = &self.basis[cb.start + i];
                    for j in i..cb.len {
                        let pj = &self.basis[cb.start + j];
                        let mut acc = Rat::zero();
                        for (e1, c1) in pi.terms() {
                            for (e2, c2) in pj.terms() {
                                let mut e = [0u8; 8];
                                for t in 0..8 {
                                    e[t] = e1[t] + e2[t];
                                }
                                acc += c1 * c2 * Self::moment(&e);
                            }
                        }
                        g[(i, j)] = acc.clone();
                        g[(j, i)] = acc;
                    }
                }
                g
            })
            .collect()
    }

    /// LDL^T factors of the Gram blocks; positive pivots certify positive
    /// definiteness of the inner product on the basis.
    pub fn gram_ldl(&self) -> OrthoFactors {
        let mut l_blocks = Vec::new();
        let mut d = Vec::new();
        for g in self.gram() {
            let (l, dg) = ldl(&g).expect("Gram matrix is positive definite");
            l_blocks.push(l);
            d.extend(dg);
        }
        OrthoFactors { l_blocks, d }
    }
}

/// Unit-lower-triangular blocks and positive diagonal of the Gram LDL^T.
#[derive(Debug, Clone)]
pub struct OrthoFactors {
    pub l_blocks: Vec<RatMat>,
    pub d: Vec<Rat>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_to_f64;

    #[test]
    fn dimensions_match_formula() {
        for (k, want) in [(0usize, 1usize), (1, 8), (2, 35), (3, 112), (4, 294), (5, 672)] {
            assert_eq!(harmonic_dimension(k), want);
            if k <= 4 {
                assert_eq!(HarmonicSpace::new(k).dimension(), want);
            }
        }
    }

    #[test]
    fn basis_is_harmonic_and_expansion_reads_back() {
        for k in [2usize, 3] {
            let space = HarmonicSpace::new(k);
            for b in space.basis() {
                assert!(b.laplacian().is_zero());
                assert_eq!(b.degree(), k);
            }
            // random rational combination expands exactly
            let mut p = Polynomial8::zero();
            for (i, b) in space.basis().iter().enumerate().take(7) {
                p.add_assign_scaled(b, &crate::exact::rat_frac(i as i64 + 1, 3));
            }
            let coeffs = space.expand_checked(&p).expect("in span");
            assert_eq!(coeffs[0], crate::exact::rat_frac(1, 3));
        }
    }

    #[test]
    fn moments() {
        // avg(z_0^2) = 1/8; avg(z_0^4) = 3/80; avg(z_0^2 z_1^2) = 1/80
        let e2 = [2, 0, 0, 0, 0, 0, 0, 0];
        assert_eq!(HarmonicSpace::moment(&e2), crate::exact::rat_frac(1, 8));
        let e4 = [4, 0, 0, 0, 0, 0, 0, 0];
        assert_eq!(HarmonicSpace::moment(&e4), crate::exact::rat_frac(3, 80));
        let e22 = [2, 2, 0, 0, 0, 0, 0, 0];
        assert_eq!(HarmonicSpace::moment(&e22), crate::exact::rat_frac(1, 80));
    }

    #[test]
    fn gram_positive_definite() {
        for k in [1usize, 2, 3] {
            let space = HarmonicSpace::new(k);
            let f = space.gram_ldl();
            assert_eq!(f.d.len(), space.dimension());
            for d in &f.d {
                assert!(rat_to_f64(d) > 0.0);
            }
        }
    }

    #[test]
    fn degree_one_gram_is_scaled_identity() {
        let space = HarmonicSpace::new(1);
        let blocks = space.gram();
        assert_eq!(blocks.len(), 8);
        for b in &blocks {
            assert_eq!(b.rows, 1);
            assert_eq!(b[(0, 0)], crate::exact::rat_frac(1, 8));
        }
    }
}
