//! Exact rational scalars and the small dense rational matrix kit used by
//! the spectral pipeline (kernel computation, Gram factorization, operator
//! assembly). Matrices here are at most a few hundred rows, so simple dense
//! algorithms in `BigRational` are entirely adequate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

/// Dense rational matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn scalar(n: usize, v: Rat) -> Self {
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn max_abs_f64(&self) -> f64 {
        self.data
            .iter()
            .map(|r| rat_to_f64(&r.abs()))
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &RatMat) -> RatMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        RatMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn add_assign_scaled(&mut self, other: &RatMat, s: &Rat) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += b * s;
            }
        }
    }

    pub fn matmul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let entry = &mut out[(i, j)];
                        *entry += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }
}

impl std::ops::Index<(usize, usize)> for RatMat {
    type Output = Rat;
    fn index(&self, (r, c): (usize, usize)) -> &Rat {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rat {
        &mut self.data[r * self.cols + c]
    }
}

/// Reduced row echelon form in place; returns the pivot column per row.
pub fn rref(m: &mut RatMat) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row >= m.rows {
            break;
        }
        let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
            continue;
        };
        if p != row {
            for c in 0..m.cols {
                let tmp = m[(p, c)].clone();
                m[(p, c)] = m[(row, c)].clone();
                m[(row, c)] = tmp;
            }
        }
        let inv = m[(row, col)].recip();
        for c in col..m.cols {
            let v = &m[(row, c)] * &inv;
            m[(row, c)] = v;
        }
        for r in 0..m.rows {
            if r != row && !m[(r, col)].is_zero() {
                let f = m[(r, col)].clone();
                for c in col..m.cols {
                    let v = &m[(row, c)] * &f;
                    m[(r, c)] -= v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// LDL^T factorization of a symmetric positive definite rational matrix:
/// returns unit lower triangular `L` and the positive diagonal `d`.
/// Fails (None) if any pivot is non-positive.
pub fn ldl(g: &RatMat) -> Option<(RatMat, Vec<Rat>)> {
    assert_eq!(g.rows, g.cols);
    let n = g.rows;
    let mut l = RatMat::identity(n);
    let mut d = vec![Rat::zero(); n];
    for j in 0..n {
        let mut dj = g[(j, j)].clone();
        for k in 0..j {
            dj -= &l[(j, k)] * &l[(j, k)] * &d[k];
        }
        if !dj.is_positive() {
            return None;
        }
        d[j] = dj;
        for i in (j + 1)..n {
            let mut v = g[(i, j)].clone();
            for k in 0..j {
                v -= &l[(i, k)] * &l[(j, k)] * &d[k];
            }
            l[(i, j)] = v / &d[j];
        }
    }
    Some((l, d))
}

/// Solves `X L^T = B` for `X`, with `L` unit lower triangular (so `L^T` is
/// unit upper). Processes each row of `B` by forward substitution.
pub fn solve_right_unit_lower_transpose(b: &RatMat, l: &RatMat) -> RatMat {
    assert_eq!(b.cols, l.rows);
    let n = l.rows;
    let mut x = b.clone();
    for i in 0..x.rows {
        for j in 0..n {
            // x[i][j] = b[i][j] - sum_{k<j} x[i][k] * (L^T)[k][j]
            //         = b[i][j] - sum_{k<j} x[i][k] * L[j][k]
            let mut v = x[(i, j)].clone();
            for k in 0..j {
                if !l[(j, k)].is_zero() {
                    v -= &x[(i, k)] * &l[(j, k)];
                }
            }
            x[(i, j)] = v;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_kernel_shape() {
        // x + y = 0 over three unknowns: rank 1, two free columns.
        let mut m = RatMat::zeros(1, 3);
        m[(0, 0)] = rat(1);
        m[(0, 1)] = rat(1);
        let piv = rref(&mut m);
        assert_eq!(piv, vec![0]);
        assert_eq!(m[(0, 1)], rat(1));
    }

    #[test]
    fn ldl_roundtrip() {
        let mut g = RatMat::zeros(3, 3);
        let vals = [[4, 2, 2], [2, 5, 1], [2, 1, 6]];
        for i in 0..3 {
            for j in 0..3 {
                g[(i, j)] = rat(vals[i][j]);
            }
        }
        let (l, d) = ldl(&g).unwrap();
        // reconstruct L D L^T
        let mut ld = l.clone();
        for i in 0..3 {
            for j in 0..3 {
                let v = &ld[(i, j)] * &d[j];
                ld[(i, j)] = v;
            }
        }
        let mut lt = RatMat::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                lt[(i, j)] = l[(j, i)].clone();
            }
        }
        assert_eq!(ld.matmul(&lt), g);
    }

    #[test]
    fn right_transpose_solve() {
        let mut l = RatMat::identity(3);
        l[(1, 0)] = rat(2);
        l[(2, 0)] = rat(-1);
        l[(2, 1)] = rat(3);
        let mut b = RatMat::zeros(2, 3);
        for i in 0..2 {
            for j in 0..3 {
                b[(i, j)] = rat((i * 3 + j + 1) as i64);
            }
        }
        let x = solve_right_unit_lower_transpose(&b, &l);
        // verify X L^T == B
        let mut lt = RatMat::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                lt[(i, j)] = l[(j, i)].clone();
            }
        }
        assert_eq!(x.matmul(&lt), b);
    }
}
