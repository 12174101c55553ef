//! Polynomials in eight variables with exact rational coefficients.
//!
//! The representation is a sparse exponent-vector map. These carry the
//! harmonic eigenfunctions and make every differential-operator application
//! exact; floats appear only at point evaluation.

use crate::exact::{rat, Rat};
use num_traits::Zero;
use std::collections::BTreeMap;

pub type Exponents = [u8; 8];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial8 {
    terms: BTreeMap<Exponents, Rat>,
}

impl Polynomial8 {
    pub fn zero() -> Self {
        Polynomial8::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Polynomial8::zero();
        p.add_term([0; 8], c);
        p
    }

    /// The coordinate function `z_i` (0-based).
    pub fn coordinate(i: usize) -> Self {
        let mut e = [0u8; 8];
        e[i] = 1;
        Polynomial8::monomial(e, rat(1))
    }

    pub fn monomial(e: Exponents, c: Rat) -> Self {
        let mut p = Polynomial8::zero();
        p.add_term(e, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exponents, Rat)>) -> Self {
        let mut p = Polynomial8::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Exponents, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &Exponents) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    /// Total degree (maximum over terms); zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| usize::from(x)).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add_assign_scaled(&mut self, other: &Polynomial8, s: &Rat) {
        if s.is_zero() {
            return;
        }
        for (e, c) in &other.terms {
            self.add_term(*e, c * s);
        }
    }

    pub fn sub(&self, other: &Polynomial8) -> Polynomial8 {
        let mut out = self.clone();
        out.add_assign_scaled(other, &rat(-1));
        out
    }

    pub fn scale(&self, s: &Rat) -> Polynomial8 {
        let mut out = Polynomial8::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, c * s);
        }
        out
    }

    /// The derivation `sum_{i,j} M_ij x_j d/dx_i` applied to `self`.
    ///
    /// For a skew `M` this is the linear vector field of `M` acting on the
    /// polynomial; it commutes with the flat Laplacian and preserves degree.
    pub fn derive_linear_field(&self, m: &[[i64; 8]; 8]) -> Polynomial8 {
        let mut out = Polynomial8::zero();
        for (e, c) in &self.terms {
            for i in 0..8 {
                if e[i] == 0 {
                    continue;
                }
                for j in 0..8 {
                    let mij = m[i][j];
                    if mij == 0 {
                        continue;
                    }
                    let mut e2 = *e;
                    e2[i] -= 1;
                    e2[j] += 1;
                    out.add_term(e2, c * rat(i64::from(e[i]) * mij));
                }
            }
        }
        out
    }

    /// The flat Laplacian on `R^8`.
    pub fn laplacian(&self) -> Polynomial8 {
        let mut out = Polynomial8::zero();
        for (e, c) in &self.terms {
            for i in 0..8 {
                if e[i] >= 2 {
                    let mut e2 = *e;
                    e2[i] -= 2;
                    out.add_term(e2, c * rat(i64::from(e[i]) * i64::from(e[i] - 1)));
                }
            }
        }
        out
    }

    pub fn eval(&self, z: &[f64; 8]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = crate::exact::rat_to_f64(c);
            for (i, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    t *= z[i];
                }
            }
            acc += t;
        }
        acc
    }
}

/// All exponent vectors of total degree `k`, lexicographically ordered.
pub fn monomials_of_degree(k: usize) -> Vec<Exponents> {
    let mut out = Vec::new();
    let mut cur = [0u8; 8];
    fn rec(pos: usize, left: usize, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if pos == 7 {
            cur[7] = left as u8;
            out.push(*cur);
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e as u8;
            rec(pos + 1, left - e, cur, out);
        }
    }
    rec(0, k, &mut cur, &mut out);
    out
}

/// Parity signature of an exponent vector (one bit per odd exponent). The
/// flat Laplacian and the sphere Gram matrix are block diagonal across
/// parity classes, which keeps all exact linear algebra small.
pub fn parity_mask(e: &Exponents) -> u8 {
    let mut m = 0u8;
    for (i, &x) in e.iter().enumerate() {
        if x % 2 == 1 {
            m |= 1 << i;
        }
    }
    m
}
