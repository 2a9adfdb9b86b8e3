//! Exact 2x2 integer matrices, Smith normal form with SL(2,Z) factors,
//! and the column Hermite form used for lattice equality.
//!
//! All products run through i128 and panic on i64 overflow rather than
//! wrapping; at the degrees this library targets they never trigger.

use crate::arith::extended_gcd;
use crate::error::{Error, Result};
use std::fmt;

/// Row-major 2x2 integer matrix [[a, b], [c, d]].
/// The columns (a,c) and (b,d) are the images of the basis vectors e1, e2.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct IntMatrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

fn narrow(v: i128) -> i64 {
    i64::try_from(v).expect("integer overflow in exact 2x2 arithmetic")
}

impl IntMatrix2 {
    pub const IDENTITY: IntMatrix2 = IntMatrix2 { a: 1, b: 0, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMatrix2 { a, b, c, d }
    }

    /// Matrix with the given columns.
    pub fn from_columns(col1: (i64, i64), col2: (i64, i64)) -> Self {
        IntMatrix2 { a: col1.0, b: col2.0, c: col1.1, d: col2.1 }
    }

    pub fn columns(&self) -> ((i64, i64), (i64, i64)) {
        ((self.a, self.c), (self.b, self.d))
    }

    pub fn det(&self) -> i64 {
        narrow(self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128)
    }

    pub fn mul(&self, rhs: &IntMatrix2) -> IntMatrix2 {
        let p = |x: i64, y: i64, z: i64, w: i64| narrow(x as i128 * y as i128 + z as i128 * w as i128);
        IntMatrix2 {
            a: p(self.a, rhs.a, self.b, rhs.c),
            b: p(self.a, rhs.b, self.b, rhs.d),
            c: p(self.c, rhs.a, self.d, rhs.c),
            d: p(self.c, rhs.b, self.d, rhs.d),
        }
    }

    pub fn mul_vec(&self, v: (i64, i64)) -> (i64, i64) {
        let p = |x: i64, y: i64, z: i64, w: i64| narrow(x as i128 * y as i128 + z as i128 * w as i128);
        (p(self.a, v.0, self.b, v.1), p(self.c, v.0, self.d, v.1))
    }

    /// Adjugate: adj(M) * M = det(M) * I.
    pub fn adjugate(&self) -> IntMatrix2 {
        IntMatrix2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Inverse of a matrix with det = ±1.
    pub fn unimodular_inverse(&self) -> Result<IntMatrix2> {
        match self.det() {
            1 => Ok(self.adjugate()),
            -1 => Ok(self.adjugate().neg()),
            d => Err(Error::NotUnimodular(d)),
        }
    }

    pub fn neg(&self) -> IntMatrix2 {
        IntMatrix2 { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Entrywise reduction modulo k > 0 into [0, k).
    pub fn reduced_mod(&self, k: i64) -> IntMatrix2 {
        IntMatrix2 {
            a: self.a.rem_euclid(k),
            b: self.b.rem_euclid(k),
            c: self.c.rem_euclid(k),
            d: self.d.rem_euclid(k),
        }
    }

    pub fn trace(&self) -> i64 {
        narrow(self.a as i128 + self.d as i128)
    }

    /// Canonical representative of {M, -M}: first nonzero entry in
    /// row-major order is positive.
    pub fn sign_normalized(&self) -> IntMatrix2 {
        for e in [self.a, self.b, self.c, self.d] {
            if e != 0 {
                return if e < 0 { self.neg() } else { *self };
            }
        }
        *self
    }

    pub fn pow(&self, n: u32) -> IntMatrix2 {
        let mut out = Self::IDENTITY;
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Determinant ad - bc.
pub fn det2(m: &IntMatrix2) -> i64 {
    m.det()
}

/// Smith factorization A = Q * D * R with Q, R in SL(2,Z) and
/// D = diag(m, n), m, n > 0, n | m.
#[derive(Copy, Clone, Debug)]
pub struct Snf {
    pub q: IntMatrix2,
    pub d: IntMatrix2,
    pub r: IntMatrix2,
}

// Elementary SL(2,Z) factors. ROT swaps rows up to sign; applied on the
// right it swaps columns up to sign.
const ROT: IntMatrix2 = IntMatrix2 { a: 0, b: -1, c: 1, d: 0 };
const ROT_INV: IntMatrix2 = IntMatrix2 { a: 0, b: 1, c: -1, d: 0 };

/// Smith normal form of a positive-determinant integer matrix, with both
/// unimodular factors in SL(2,Z) and the divisors ordered so that the
/// second divides the first.
///
/// Deterministic: the pivot is always the entry of smallest nonzero
/// absolute value, ties broken row-major.
pub fn snf2(a: &IntMatrix2) -> Result<Snf> {
    let det = a.det();
    if det <= 0 {
        return Err(Error::Orientation(det));
    }
    let mut m = *a;
    let mut q = IntMatrix2::IDENTITY;
    let mut r = IntMatrix2::IDENTITY;
    // invariant: q * m * r == a, det q == det r == 1

    let rotate_rows = |m: &mut IntMatrix2, q: &mut IntMatrix2| {
        *m = ROT.mul(m);
        *q = q.mul(&ROT_INV);
    };
    let rotate_cols = |m: &mut IntMatrix2, r: &mut IntMatrix2| {
        *m = m.mul(&ROT);
        *r = ROT_INV.mul(r);
    };
    // row1 -= k * row0
    let shear_row = |m: &mut IntMatrix2, q: &mut IntMatrix2, k: i64| {
        let e = IntMatrix2::new(1, 0, -k, 1);
        let e_inv = IntMatrix2::new(1, 0, k, 1);
        *m = e.mul(m);
        *q = q.mul(&e_inv);
    };
    // col1 -= k * col0
    let shear_col = |m: &mut IntMatrix2, r: &mut IntMatrix2, k: i64| {
        let f = IntMatrix2::new(1, -k, 0, 1);
        let f_inv = IntMatrix2::new(1, k, 0, 1);
        *m = m.mul(&f);
        *r = f_inv.mul(r);
    };

    loop {
        if m.b == 0 && m.c == 0 {
            // diagonal; det > 0 keeps the two signs equal
            if m.a < 0 {
                m = m.neg();
                q = q.neg();
            }
            if m.a % m.d == 0 {
                break; // already diag(m, n) with n | m
            }
            if m.d % m.a == 0 {
                // diag(n, m): swap the entries
                let l = IntMatrix2::new(0, 1, -1, 0);
                let l_inv = IntMatrix2::new(0, -1, 1, 0);
                let rr = IntMatrix2::new(0, -1, 1, 0);
                let rr_inv = IntMatrix2::new(0, 1, -1, 0);
                m = l.mul(&m).mul(&rr);
                q = q.mul(&l_inv);
                r = rr_inv.mul(&r);
                break;
            }
            // neither entry divides the other: mix columns, keep reducing
            let f = IntMatrix2::new(1, 0, 1, 1);
            let f_inv = IntMatrix2::new(1, 0, -1, 1);
            m = m.mul(&f);
            r = f_inv.mul(&r);
            continue;
        }
        // pivot: smallest nonzero |entry|, row-major tie break
        let entries = [(m.a, 0u8, 0u8), (m.b, 0, 1), (m.c, 1, 0), (m.d, 1, 1)];
        let &(_, pi, pj) = entries
            .iter()
            .filter(|(v, _, _)| *v != 0)
            .min_by_key(|(v, i, j)| (v.abs(), *i, *j))
            .expect("nonsingular matrix has a nonzero entry");
        if pi == 1 {
            rotate_rows(&mut m, &mut q);
        }
        if pj == 1 {
            rotate_cols(&mut m, &mut r);
        }
        // one reduction round; exact divisions leave the matrix diagonal,
        // inexact ones leave strictly smaller entries for the next pivot
        let p = m.a;
        shear_row(&mut m, &mut q, m.c / p);
        shear_col(&mut m, &mut r, m.b / p);
    }

    debug_assert_eq!(q.mul(&m).mul(&r), *a);
    debug_assert_eq!(q.det(), 1);
    debug_assert_eq!(r.det(), 1);
    debug_assert!(m.b == 0 && m.c == 0 && m.a > 0 && m.d > 0 && m.a % m.d == 0);
    Ok(Snf { q, d: m, r })
}

/// Column Hermite normal form H = B * U with U in GL(2,Z):
/// lower triangular, positive diagonal, 0 <= h21 < h22.
/// Unique per lattice, so it decides lattice equality.
pub fn column_hermite(b: &IntMatrix2) -> Result<IntMatrix2> {
    if b.det() == 0 {
        return Err(Error::SingularLattice);
    }
    let (g, x, y) = extended_gcd(b.a, b.b);
    // col0' = x*col0 + y*col1, col1' = -(b.b/g)*col0 + (b.a/g)*col1
    let u = IntMatrix2::new(x, -b.b / g, y, b.a / g);
    let mut h = b.mul(&u);
    debug_assert!(h.a == g && h.b == 0 && h.a > 0);
    if h.d < 0 {
        h.b = -h.b;
        h.d = -h.d;
    }
    let k = h.c.div_euclid(h.d);
    h.c -= k * h.d;
    h.a -= k * h.b; // h.b == 0, kept for symmetry
    debug_assert!(h.b == 0 && h.a > 0 && h.d > 0 && (0..h.d).contains(&h.c));
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_examples() {
        assert_eq!(det2(&IntMatrix2::IDENTITY), 1);
        assert_eq!(det2(&IntMatrix2::new(2, 0, -1, 5)), 10);
        assert_eq!(det2(&IntMatrix2::new(4, 1, 0, 1)), 4);
    }

    #[test]
    fn snf_diagonal_already() {
        let snf = snf2(&IntMatrix2::new(2, 0, 0, 2)).unwrap();
        assert_eq!(snf.d, IntMatrix2::new(2, 0, 0, 2));
        // a matrix already in normal form keeps identity factors
        let snf = snf2(&IntMatrix2::new(6, 0, 0, 2)).unwrap();
        assert!(snf.q.is_identity() && snf.r.is_identity());
    }

    #[test]
    fn snf_degree_ten() {
        let a = IntMatrix2::new(2, 0, -1, 5);
        let snf = snf2(&a).unwrap();
        assert_eq!(snf.d, IntMatrix2::new(10, 0, 0, 1));
        assert_eq!(snf.q.mul(&snf.d).mul(&snf.r), a);
        assert_eq!(snf.q.det(), 1);
        assert_eq!(snf.r.det(), 1);
    }

    #[test]
    fn snf_degree_four() {
        let a = IntMatrix2::new(4, 1, 0, 1);
        let snf = snf2(&a).unwrap();
        assert_eq!(snf.d, IntMatrix2::new(4, 0, 0, 1));
        assert_eq!(snf.q.mul(&snf.d).mul(&snf.r), a);
    }

    #[test]
    fn snf_rejects_nonpositive() {
        assert!(matches!(snf2(&IntMatrix2::new(0, 1, 1, 0)), Err(Error::Orientation(-1))));
        assert!(matches!(snf2(&IntMatrix2::new(1, 0, 1, 0)), Err(Error::Orientation(0))));
    }

    #[test]
    fn hermite_triangular() {
        let h = column_hermite(&IntMatrix2::new(6, 0, 0, 1)).unwrap();
        assert_eq!(h, IntMatrix2::new(6, 0, 0, 1));
        // basis change leaves the Hermite form alone
        let b = IntMatrix2::new(6, 0, 0, 1).mul(&IntMatrix2::new(3, 1, 2, 1));
        assert_eq!(column_hermite(&b).unwrap(), IntMatrix2::new(6, 0, 0, 1));
    }
}
