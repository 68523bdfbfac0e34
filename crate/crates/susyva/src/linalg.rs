//! Exact dense linear algebra over an abstract field: reduced row echelon
//! form, incremental span bases, and kernel computation. Deterministic:
//! pivots are chosen left to right, rows processed in insertion order.

use crate::scalars::{Rat, RatFn};
use num_traits::{One, Zero};

/// Field operations needed for row reduction. Implemented for exact
/// rationals and for rational functions in c (symbolic central charge).
pub trait Field: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn recip(&self) -> Self;
}

impl Field for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn recip(&self) -> Self {
        num_rational::BigRational::recip(self)
    }
}

impl Field for RatFn {
    fn zero() -> Self {
        RatFn::zero()
    }
    fn one() -> Self {
        RatFn::one()
    }
    fn is_zero(&self) -> bool {
        RatFn::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        RatFn::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        RatFn::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        RatFn::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        RatFn::neg(self)
    }
    fn recip(&self) -> Self {
        RatFn::recip(self)
    }
}

/// A subspace of F^dim maintained in reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Subspace<F: Field> {
    dim: usize,
    rows: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn new(dim: usize) -> Self {
        Subspace { dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Echelon basis rows (pivot entries 1, eliminated above and below).
    pub fn basis(&self) -> &[Vec<F>] {
        &self.rows
    }

    /// Residual of v after eliminating all pivot coordinates.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.dim, "vector dimension mismatch");
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(self.pivots.iter()) {
            if v[p].is_zero() {
                continue;
            }
            let factor = v[p].clone();
            for (x, r) in v.iter_mut().zip(row.iter()) {
                *x = x.sub(&factor.mul(r));
            }
        }
        v
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(F::is_zero)
    }

    /// Insert v; returns true when the rank grew.
    pub fn insert(&mut self, v: &[F]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        for x in r.iter_mut() {
            *x = x.mul(&inv);
        }
        // eliminate the new pivot from existing rows to keep full reduction
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let factor = row[p].clone();
            for (x, y) in row.iter_mut().zip(r.iter()) {
                *x = x.sub(&factor.mul(y));
            }
        }
        // keep rows sorted by pivot column
        let at = self.pivots.iter().position(|&q| q > p).unwrap_or(self.rows.len());
        self.rows.insert(at, r);
        self.pivots.insert(at, p);
        true
    }

    /// True when other is contained in self.
    pub fn contains_subspace(&self, other: &Subspace<F>) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    pub fn equals(&self, other: &Subspace<F>) -> bool {
        self.rank() == other.rank() && self.contains_subspace(other)
    }
}

/// Kernel basis of the linear map with the given rows (each row one equation
/// over `cols` unknowns). Returns vectors spanning {x : A x = 0}.
pub fn kernel_basis<F: Field>(rows: &[Vec<F>], cols: usize) -> Vec<Vec<F>> {
    let mut sp = Subspace::new(cols);
    for r in rows {
        sp.insert(r);
    }
    let pivot_set: std::collections::BTreeSet<usize> = sp.pivots().iter().copied().collect();
    let mut out = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![F::zero(); cols];
        v[free] = F::one();
        for (row, &p) in sp.basis().iter().zip(sp.pivots().iter()) {
            // pivot value of the solution: x_p = -row[free]
            v[p] = row[free].neg();
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat_int;

    fn v(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn span_and_reduce() {
        let mut sp = Subspace::new(3);
        assert!(sp.insert(&v(&[1, 2, 3])));
        assert!(sp.insert(&v(&[0, 1, 1])));
        assert!(!sp.insert(&v(&[1, 3, 4])));
        assert_eq!(sp.rank(), 2);
        assert!(sp.contains(&v(&[2, 5, 7])));
        assert!(!sp.contains(&v(&[0, 0, 1])));
    }

    #[test]
    fn kernel_of_rank_one() {
        // x + y + z = 0 has kernel dim 2
        let rows = vec![v(&[1, 1, 1])];
        let k = kernel_basis(&rows, 3);
        assert_eq!(k.len(), 2);
        for kv in &k {
            let s = kv.iter().fold(rat_int(0), |a, b| a + b);
            assert_eq!(s, rat_int(0));
        }
    }

    #[test]
    fn kernel_trivial_when_full_rank() {
        let rows = vec![v(&[1, 0]), v(&[1, 1])];
        assert!(kernel_basis(&rows, 2).is_empty());
    }

    #[test]
    fn symbolic_kernel() {
        use crate::scalars::{CPoly, RatFn};
        // [c, 1] x = 0 over Q(c): kernel is span{(1, -c)} -> dim 1.
        let row = vec![RatFn::from_poly(CPoly::c()), RatFn::one()];
        let k = kernel_basis(&[row], 2);
        assert_eq!(k.len(), 1);
        // and [c,1],[1,0] has trivial kernel
        let rows = vec![
            vec![RatFn::from_poly(CPoly::c()), RatFn::one()],
            vec![RatFn::one(), RatFn::zero()],
        ];
        assert!(kernel_basis(&rows, 2).is_empty());
    }
}
