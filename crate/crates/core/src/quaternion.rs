//! Quaternion arithmetic and the 4x4 matrices of left/right multiplication.
//!
//! The identification of a quaternion with `R^4` is fixed once and for all as
//! `(w, x, y, z) <-> w + x i + y j + z k`, with `ij = k`, `jk = i`, `ki = j`.

use crate::{Mat4, Vec4};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

impl Quaternion {
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub const fn zero() -> Self {
        Quaternion::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn from_vec(v: &Vec4) -> Self {
        Quaternion::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_vec(self) -> Vec4 {
        Vec4::new(self.w, self.x, self.y, self.z)
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sq(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }

    pub fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn max_abs(self) -> f64 {
        self.w.abs().max(self.x.abs()).max(self.y.abs()).max(self.z.abs())
    }
}

/// Matrix of `q -> q * l` (right multiplication) on `R^4`.
pub fn right_mult_matrix(l: Quaternion) -> Mat4 {
    columns(|c| c.mul(l))
}

/// Matrix of `q -> l * q` (left multiplication) on `R^4`.
pub fn left_mult_matrix(l: Quaternion) -> Mat4 {
    columns(|c| l.mul(c))
}

fn columns(f: impl Fn(Quaternion) -> Quaternion) -> Mat4 {
    let basis = [ONE, I, J, K];
    Mat4::from_fn(|r, c| {
        let v = f(basis[c]).to_vec();
        v[r]
    })
}

/// Integer right-multiplication matrix for a unit basis quaternion.
pub fn right_mult_int(l: Quaternion) -> [[i64; 4]; 4] {
    to_int4(&right_mult_matrix(l))
}

/// Integer left-multiplication matrix for a unit basis quaternion.
pub fn left_mult_int(l: Quaternion) -> [[i64; 4]; 4] {
    to_int4(&left_mult_matrix(l))
}

fn to_int4(m: &Mat4) -> [[i64; 4]; 4] {
    let mut out = [[0i64; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let v = m[(r, c)];
            debug_assert_eq!(v, v.round());
            out[r][c] = v as i64;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_products() {
        assert_eq!(I.mul(J), K);
        assert_eq!(J.mul(K), I);
        assert_eq!(K.mul(I), J);
        assert_eq!(J.mul(I), Quaternion::new(0.0, 0.0, 0.0, -1.0));
        assert_eq!(I.mul(I), Quaternion::new(-1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn conjugation_reverses_products() {
        let p = Quaternion::new(0.3, -1.2, 0.7, 2.0);
        let q = Quaternion::new(-0.5, 0.1, 1.4, -0.9);
        let lhs = p.mul(q).conj();
        let rhs = q.conj().mul(p.conj());
        assert!(lhs.add(Quaternion::new(-rhs.w, -rhs.x, -rhs.y, -rhs.z)).max_abs() < 1e-14);
    }

    #[test]
    fn mult_matrices_match_products() {
        let l = K;
        let q = Quaternion::new(2.0, -1.0, 0.5, 3.0);
        let rv = right_mult_matrix(l) * q.to_vec();
        assert_eq!(Quaternion::from_vec(&rv), q.mul(l));
        let lv = left_mult_matrix(l) * q.to_vec();
        assert_eq!(Quaternion::from_vec(&lv), l.mul(q));
    }

    proptest::proptest! {
        #[test]
        fn associativity(a in proptest::array::uniform4(-2.0f64..2.0),
                         b in proptest::array::uniform4(-2.0f64..2.0),
                         c in proptest::array::uniform4(-2.0f64..2.0)) {
            let q = |v: [f64;4]| Quaternion::new(v[0], v[1], v[2], v[3]);
            let (a, b, c) = (q(a), q(b), q(c));
            let lhs = a.mul(b).mul(c);
            let rhs = a.mul(b.mul(c));
            let d = lhs.add(Quaternion::new(-rhs.w, -rhs.x, -rhs.y, -rhs.z));
            proptest::prop_assert!(d.max_abs() < 1e-12);
        }
    }
}
