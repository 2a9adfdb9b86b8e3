//! Sublattices of Z^2, elementary divisors, and coordinates in the
//! standardized quotient group (Z/2m) + (Z/2n).

use crate::error::{Error, Result};
use crate::matrix::{column_hermite, snf2, IntMatrix2, Snf};
use std::fmt;

/// Full-rank sublattice of Z^2 spanned by the columns of `basis`.
#[derive(Copy, Clone, Debug)]
pub struct Lattice {
    basis: IntMatrix2,
}

impl Lattice {
    pub fn new(basis: IntMatrix2) -> Result<Self> {
        if basis.det() == 0 {
            return Err(Error::SingularLattice);
        }
        Ok(Lattice { basis })
    }

    pub fn basis(&self) -> IntMatrix2 {
        self.basis
    }

    /// Integer coordinates of v in this basis, if v lies in the lattice.
    pub fn contains(&self, v: (i64, i64)) -> Option<(i64, i64)> {
        let det = self.basis.det();
        let w = self.basis.adjugate().mul_vec(v);
        if w.0 % det == 0 && w.1 % det == 0 {
            Some((w.0 / det, w.1 / det))
        } else {
            None
        }
    }

    /// The lattice 2L.
    pub fn doubled(&self) -> Lattice {
        Lattice { basis: IntMatrix2::new(2 * self.basis.a, 2 * self.basis.b, 2 * self.basis.c, 2 * self.basis.d) }
    }

    /// Unique column Hermite representative; equal lattices share it.
    pub fn hermite(&self) -> IntMatrix2 {
        column_hermite(&self.basis).expect("nonsingular by construction")
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.hermite() == other.hermite()
    }
}
impl Eq for Lattice {}

/// Elementary divisors (m, n) with n | m; the quotient Z^2 / L is
/// (Z/m) + (Z/n) and the group A = Z^2 / 2L is (Z/2m) + (Z/2n).
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ElementaryDivisors {
    pub m: i64,
    pub n: i64,
}

impl ElementaryDivisors {
    pub fn new(m: i64, n: i64) -> Result<Self> {
        if m < 1 || n < 1 || m % n != 0 {
            return Err(Error::InvalidDivisors { m, n });
        }
        Ok(ElementaryDivisors { m, n })
    }

    pub fn degree(&self) -> i64 {
        self.m * self.n
    }

    /// Reduce a vector into standardized coordinates mod (2m, 2n).
    pub fn reduce(&self, v: (i64, i64)) -> AElement {
        AElement { x: v.0.rem_euclid(2 * self.m), y: v.1.rem_euclid(2 * self.n) }
    }

    pub fn neg(&self, e: AElement) -> AElement {
        self.reduce((-e.x, -e.y))
    }

    pub fn add(&self, e: AElement, f: AElement) -> AElement {
        self.reduce((e.x + f.x, e.y + f.y))
    }

    /// All 4mn elements, lexicographic.
    pub fn elements(&self) -> Vec<AElement> {
        let mut out = Vec::with_capacity((4 * self.m * self.n) as usize);
        for x in 0..2 * self.m {
            for y in 0..2 * self.n {
                out.push(AElement { x, y });
            }
        }
        out
    }

    /// The elements of order at most 2; this subgroup is exactly the image
    /// of the sublattice in A.
    pub fn order_two_elements(&self) -> Vec<AElement> {
        let mut out = vec![AElement { x: 0, y: 0 }];
        out.push(AElement { x: self.m, y: 0 });
        out.push(AElement { x: 0, y: self.n });
        out.push(AElement { x: self.m, y: self.n });
        out.sort();
        out
    }
}

impl fmt::Display for ElementaryDivisors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

/// Element of the standardized group (Z/2m) + (Z/2n): 0 <= x < 2m, 0 <= y < 2n.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AElement {
    pub x: i64,
    pub y: i64,
}

impl fmt::Display for AElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Unordered pair {h, -h} in A, stored by its lexicographically smaller
/// member. A pair with h = -h is a singleton.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PmPair {
    rep: AElement,
}

impl PmPair {
    pub fn new(div: &ElementaryDivisors, e: AElement) -> PmPair {
        let e = div.reduce((e.x, e.y));
        let n = div.neg(e);
        PmPair { rep: e.min(n) }
    }

    pub fn rep(&self) -> AElement {
        self.rep
    }

    pub fn is_singleton(&self, div: &ElementaryDivisors) -> bool {
        div.neg(self.rep) == self.rep
    }

    pub fn members(&self, div: &ElementaryDivisors) -> Vec<AElement> {
        let n = div.neg(self.rep);
        if n == self.rep {
            vec![self.rep]
        } else {
            vec![self.rep, n]
        }
    }
}

impl fmt::Display for PmPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

/// Elementary divisors of a positive-determinant matrix, read off its
/// Smith form.
pub fn elementary_divisors(a: &IntMatrix2) -> Result<ElementaryDivisors> {
    let snf = snf2(a)?;
    Ok(ElementaryDivisors { m: snf.d.a, n: snf.d.d })
}

/// Standardized coordinates of v in A = Z^2 / 2L where L is spanned by the
/// columns of `a`: with a = Q D R, the map v -> Q^-1 v mod (2m, 2n) is a
/// group isomorphism.
pub fn a_coords(a: &IntMatrix2, v: (i64, i64)) -> Result<AElement> {
    let snf = snf2(a)?;
    Ok(a_coords_with(&snf, v))
}

/// Same as `a_coords` with a precomputed Smith form.
pub fn a_coords_with(snf: &Snf, v: (i64, i64)) -> AElement {
    let w = snf.q.adjugate().mul_vec(v); // Q in SL(2,Z), so adj = inverse
    let div = ElementaryDivisors { m: snf.d.a, n: snf.d.d };
    div.reduce(w)
}

/// Lift an element of A back to the lattice point Q * (x, y); this is a
/// section of `a_coords`.
pub fn a_lift(snf: &Snf, e: AElement) -> (i64, i64) {
    snf.q.mul_vec((e.x, e.y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contains_examples() {
        let l2 = Lattice::new(IntMatrix2::new(2, 0, 0, 2)).unwrap();
        assert_eq!(l2.contains((2, 0)), Some((1, 0)));

        let l = Lattice::new(IntMatrix2::from_columns((6, 0), (0, 1))).unwrap();
        assert_eq!(l.contains((3, 0)), None);

        let l = Lattice::new(IntMatrix2::from_columns((2, -1), (0, 5))).unwrap();
        assert_eq!(l.contains((2, 4)), Some((1, 1)));
    }

    #[test]
    fn lattice_equality_is_basis_free() {
        let a = Lattice::new(IntMatrix2::from_columns((6, 0), (0, 1))).unwrap();
        let b = Lattice::new(IntMatrix2::from_columns((6, 1), (0, 1))).unwrap();
        assert_eq!(a, b);
        let c = Lattice::new(IntMatrix2::from_columns((6, 0), (0, 2))).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn divisors_examples() {
        assert_eq!(elementary_divisors(&IntMatrix2::new(6, 0, 0, 1)).unwrap(), ElementaryDivisors { m: 6, n: 1 });
        assert_eq!(elementary_divisors(&IntMatrix2::new(2, 0, -1, 5)).unwrap(), ElementaryDivisors { m: 10, n: 1 });
        assert_eq!(elementary_divisors(&IntMatrix2::from_columns((6, 0), (0, 1))).unwrap(), ElementaryDivisors { m: 6, n: 1 });
    }

    #[test]
    fn a_coords_diagonal() {
        // Q = identity for diagonal matrices
        let a = IntMatrix2::new(2, 0, 0, 1);
        assert_eq!(a_coords(&a, (5, 3)).unwrap(), AElement { x: 1, y: 1 });
        let m = IntMatrix2::new(3, 0, 0, 1);
        assert_eq!(a_coords(&m, (1, 0)).unwrap(), AElement { x: 1, y: 0 });
    }

    #[test]
    fn a_coords_lambda1_has_order_two() {
        let a = IntMatrix2::new(2, 0, -1, 5);
        let e = a_coords(&a, (2, -1)).unwrap();
        let div = elementary_divisors(&a).unwrap();
        assert_eq!(div.add(e, e), AElement { x: 0, y: 0 });
        assert_ne!(e, AElement { x: 0, y: 0 });
    }

    #[test]
    fn a_coords_is_homomorphism() {
        let a = IntMatrix2::new(4, 1, 0, 1);
        let div = elementary_divisors(&a).unwrap();
        for u in [(1, 2), (-3, 5), (7, 0)] {
            for v in [(0, 1), (2, 2), (-1, -1)] {
                let lhs = a_coords(&a, (u.0 + v.0, u.1 + v.1)).unwrap();
                let rhs = div.add(a_coords(&a, u).unwrap(), a_coords(&a, v).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }
}
