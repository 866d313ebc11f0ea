//! Incrementally maintained integer relation lattice with Q/Z constants.
//!
//! Each row `(lambda, q)` records the multiplicative constraint
//! `prod_i m_i^lambda_i = exp(2 pi i q)`. Rows are kept in echelon form so that
//! membership, reduction and inconsistency checks are cheap.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::snf::frac;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Row {
    pivot: usize,
    coeffs: Vec<BigInt>,
    constant: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationLattice {
    n: usize,
    /// Sorted by pivot column.
    rows: Vec<Row>,
}

/// Insertion contradicted existing relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inconsistent {
    /// Nonzero constant that the trivial monomial was forced to equal.
    pub residue: BigRational,
}

impl RelationLattice {
    pub fn new(n: usize) -> Self {
        RelationLattice {
            n,
            rows: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds variables (zero columns) at the end.
    pub fn grow(&mut self, new_n: usize) {
        assert!(new_n >= self.n);
        for r in &mut self.rows {
            r.coeffs.resize(new_n, BigInt::zero());
        }
        self.n = new_n;
    }

    /// Rows `(lambda, q)` of the lattice.
    pub fn relations(&self) -> Vec<(Vec<BigInt>, BigRational)> {
        self.rows
            .iter()
            .map(|r| (r.coeffs.clone(), r.constant.clone()))
            .collect()
    }

    fn position(&self, pivot: usize) -> Result<usize, usize> {
        self.rows.binary_search_by_key(&pivot, |r| r.pivot)
    }

    /// Adds `m^lambda = exp(2 pi i q)`.
    pub fn insert(&mut self, lambda: &[BigInt], q: &BigRational) -> Result<(), Inconsistent> {
        assert_eq!(lambda.len(), self.n);
        let mut v = lambda.to_vec();
        let mut c = frac(q);
        loop {
            let Some(p) = v.iter().position(|x| !x.is_zero()) else {
                return if c.is_zero() {
                    Ok(())
                } else {
                    Err(Inconsistent { residue: c })
                };
            };
            match self.position(p) {
                Err(at) => {
                    if v[p].is_negative() {
                        v.iter_mut().for_each(|x| *x = -&*x);
                        c = frac(&-c);
                    }
                    self.rows.insert(
                        at,
                        Row {
                            pivot: p,
                            coeffs: v,
                            constant: c,
                        },
                    );
                    return Ok(());
                }
                Ok(at) => {
                    let row = &self.rows[at];
                    let a = row.coeffs[p].clone();
                    if v[p].is_multiple_of(&a) {
                        let f = &v[p] / &a;
                        for (x, y) in v.iter_mut().zip(&row.coeffs) {
                            *x -= &f * y;
                        }
                        c = frac(&(c - &row.constant * BigRational::from_integer(f)));
                        continue;
                    }
                    // Replace the pivot row by a gcd combination and keep inserting the remainder.
                    let b = v[p].clone();
                    let ext = a.extended_gcd(&b);
                    let (g, x, y) = (ext.gcd, ext.x, ext.y);
                    let (ag, bg) = (&a / &g, &b / &g);
                    let new_coeffs: Vec<BigInt> = row
                        .coeffs
                        .iter()
                        .zip(&v)
                        .map(|(r, w)| &x * r + &y * w)
                        .collect();
                    let new_const = frac(
                        &(&row.constant * BigRational::from_integer(x.clone())
                            + &c * BigRational::from_integer(y.clone())),
                    );
                    let rest: Vec<BigInt> = row
                        .coeffs
                        .iter()
                        .zip(&v)
                        .map(|(r, w)| &bg * r - &ag * w)
                        .collect();
                    let rest_const = frac(
                        &(&row.constant * BigRational::from_integer(bg.clone())
                            - &c * BigRational::from_integer(ag.clone())),
                    );
                    let mut nr = Row {
                        pivot: p,
                        coeffs: new_coeffs,
                        constant: new_const,
                    };
                    if nr.coeffs[p].is_negative() {
                        nr.coeffs.iter_mut().for_each(|x| *x = -&*x);
                        nr.constant = frac(&-nr.constant.clone());
                    }
                    self.rows[at] = nr;
                    v = rest;
                    c = rest_const;
                }
            }
        }
    }

    /// If `lambda` lies in the lattice, the value `q` with `m^lambda = exp(2 pi i q)`.
    pub fn value_of(&self, lambda: &[BigInt]) -> Option<BigRational> {
        let (rest, c) = self.reduce(lambda);
        rest.iter().all(Zero::is_zero).then_some(c)
    }

    /// Reduces `lambda` by the lattice; returns the remainder and the constant
    /// such that `m^lambda = m^remainder * exp(2 pi i constant)`.
    pub fn reduce(&self, lambda: &[BigInt]) -> (Vec<BigInt>, BigRational) {
        assert_eq!(lambda.len(), self.n);
        let mut v = lambda.to_vec();
        let mut c = BigRational::zero();
        for row in &self.rows {
            let p = row.pivot;
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].div_floor(&row.coeffs[p]);
            if f.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(&row.coeffs) {
                *x -= &f * y;
            }
            c += &row.constant * BigRational::from_integer(f);
        }
        (v, frac(&c))
    }

    /// Whether `lambda` lies in the Q-span, i.e. some positive multiple is determined.
    pub fn is_torsion_over(&self, lambda: &[BigInt]) -> bool {
        let mut v = lambda.to_vec();
        for row in &self.rows {
            let p = row.pivot;
            if v[p].is_zero() {
                continue;
            }
            let a = &row.coeffs[p];
            let l = v[p].lcm(a);
            let sv = &l / &v[p];
            let sr = &l / a;
            for (x, y) in v.iter_mut().zip(&row.coeffs) {
                *x = &*x * &sv - y * &sr;
            }
        }
        v.iter().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn insertion_and_membership() {
        let mut l = RelationLattice::new(3);
        l.insert(&bv(&[2, 0, 0]), &q(0, 1)).unwrap();
        l.insert(&bv(&[3, 1, 0]), &q(1, 2)).unwrap();
        // lattice now contains (1, -1, 0) + ... check gcd combination
        assert_eq!(l.value_of(&bv(&[2, 0, 0])), Some(q(0, 1)));
        assert_eq!(l.value_of(&bv(&[3, 1, 0])), Some(q(1, 2)));
        assert_eq!(l.value_of(&bv(&[1, 1, 0])), Some(q(1, 2)));
        assert_eq!(l.value_of(&bv(&[1, 0, 0])), None);
        assert_eq!(l.value_of(&bv(&[0, 0, 1])), None);
        assert!(l.is_torsion_over(&bv(&[1, 0, 0])));
        assert!(!l.is_torsion_over(&bv(&[0, 0, 1])));
        assert!(l.insert(&bv(&[1, 1, 0]), &q(1, 2)).is_ok());
        assert_eq!(
            l.insert(&bv(&[1, 1, 0]), &q(0, 1)),
            Err(Inconsistent { residue: q(1, 2) })
        );
    }

    #[test]
    fn gcd_pivot_merge() {
        let mut l = RelationLattice::new(2);
        l.insert(&bv(&[4, 1]), &q(1, 4)).unwrap();
        l.insert(&bv(&[6, 0]), &q(1, 2)).unwrap();
        // 3*(4,1) - 2*(6,0) = (0,3) with constant 3/4 - 1 = 3/4
        assert_eq!(l.value_of(&bv(&[0, 3])), Some(q(3, 4)));
        assert_eq!(l.value_of(&bv(&[2, -1])), Some(q(1, 4)));
    }
}
