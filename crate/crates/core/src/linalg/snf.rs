//! Integer matrices, Smith normal form and finitely generated abelian groups.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_big_rows(
            cols_of(rows),
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    /// `cols` is needed when `rows` is empty.
    pub fn from_big_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in &rows {
            assert_eq!(r.len(), cols, "ragged integer matrix");
            data.extend(r.iter().cloned());
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "integer matrix product dimensions");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * f;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * f;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self.data[r * self.cols + j];
            self.data[r * self.cols + j] = v;
        }
    }
}

fn cols_of(rows: &[Vec<i64>]) -> usize {
    rows.first().map_or(0, Vec::len)
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// `u * a * v == s`, with `u`, `v` unimodular and `s` diagonal with a divisibility chain.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Diagonal entries `s_00, s_11, ...` (length min(rows, cols)).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = &s[(i, j)];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Snf { u, s, v };
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = s[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&s[(i, t)] / &p);
                s.add_row(i, t, &q);
                u.add_row(i, t, &q);
                clean &= s[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&s[(t, j)] / &p);
                s.add_col(j, t, &q);
                v.add_col(j, t, &q);
                clean &= s[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s[(i, j)].is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, s, v }
}

/// Invariant-factor form of a finitely generated abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroupPresentation {
    pub free_rank: usize,
    /// Invariant factors, each at least 2, each dividing the next.
    pub torsion: Vec<u64>,
}

impl AbelianGroupPresentation {
    pub fn trivial() -> Self {
        AbelianGroupPresentation {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    /// Canonical form of `Z^free (+) Z/c_1 (+) ... `; factors 0 count as free, 1 are dropped.
    pub fn from_cyclic_factors(free_rank: usize, factors: &[u64]) -> Self {
        let n = factors.len();
        let mut d = IntMatrix::zeros(n, n);
        for (i, &f) in factors.iter().enumerate() {
            d[(i, i)] = BigInt::from(f);
        }
        let mut out = quotient_group(&d, n);
        out.free_rank += free_rank;
        out
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order, if finite.
    pub fn order(&self) -> Option<u64> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    /// Parses the display form, e.g. `trivial group`, `Z/2 x Z/4`, `Z^2 x Z/3`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "trivial group" || s == "0" || s == "1" {
            return Some(Self::trivial());
        }
        let mut free = 0;
        let mut factors = Vec::new();
        for part in s.split(" x ") {
            let part = part.trim();
            if part == "Z" {
                free += 1;
            } else if let Some(r) = part.strip_prefix("Z^") {
                free += r.parse::<usize>().ok()?;
            } else {
                let d = part.strip_prefix("Z/")?;
                factors.push(d.parse::<u64>().ok().filter(|d| *d > 0)?);
            }
        }
        Some(Self::from_cyclic_factors(free, &factors))
    }
}

impl fmt::Display for AbelianGroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial group");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" x "))
    }
}

/// `Z^n / rowspace(relations)`.
pub fn quotient_group(relations: &IntMatrix, n: usize) -> AbelianGroupPresentation {
    assert!(
        relations.rows == 0 || relations.cols == n,
        "relation width must equal generator count"
    );
    let reduced;
    let relations = if relations.rows > relations.cols {
        reduced = row_lattice_basis(relations);
        &reduced
    } else {
        relations
    };
    if relations.rows == 0 {
        return AbelianGroupPresentation {
            free_rank: n,
            torsion: Vec::new(),
        };
    }
    let snf = smith_normal_form(relations);
    let diag = snf.diagonal();
    let rank = snf.rank();
    let torsion = diag
        .iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .map(|d| d.to_u64().expect("invariant factor fits in u64"))
        .collect();
    AbelianGroupPresentation {
        free_rank: n - rank,
        torsion,
    }
}

/// Representative of `q mod 1` in `[0, 1)`.
pub fn frac(q: &BigRational) -> BigRational {
    q - q.floor()
}

/// Basis (as rows) of `{x in Z^n : a x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let n = a.cols;
    if a.rows == 0 {
        return IntMatrix::identity(n);
    }
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let rows = (r..n).map(|j| snf.v.column(j)).collect();
    IntMatrix::from_big_rows(n, rows)
}

/// Basis (as rows) of `{x in Z^n : a x = 0 mod m}`.
pub fn congruence_kernel(a: &IntMatrix, m: &BigInt) -> IntMatrix {
    let n = a.cols;
    let a = row_lattice_basis(a);
    if a.rows == 0 {
        return IntMatrix::identity(n);
    }
    let snf = smith_normal_form(&a);
    let diag = snf.diagonal();
    let rows = (0..n)
        .map(|j| {
            let scale = match diag.get(j).filter(|d| !d.is_zero()) {
                Some(d) => m / d.gcd(m),
                None => BigInt::one(),
            };
            snf.v.column(j).into_iter().map(|x| x * &scale).collect()
        })
        .collect();
    IntMatrix::from_big_rows(n, rows)
}

/// Echelon basis of the row lattice of `a`.
pub fn row_lattice_basis(a: &IntMatrix) -> IntMatrix {
    let mut lat = super::RelationLattice::new(a.cols);
    let zero = BigRational::zero();
    for i in 0..a.rows {
        lat.insert(a.row(i), &zero)
            .expect("homogeneous relations are consistent");
    }
    IntMatrix::from_big_rows(
        a.cols,
        lat.relations().into_iter().map(|(r, _)| r).collect(),
    )
}

/// Integer coordinates `c` with `c * basis = w` for every row `w` of `vectors`.
pub fn lattice_coordinates(basis: &IntMatrix, vectors: &IntMatrix) -> Option<IntMatrix> {
    let bt = basis.transpose();
    let snf = smith_normal_form(&bt);
    let diag = snf.diagonal();
    let mut out = Vec::with_capacity(vectors.rows);
    for i in 0..vectors.rows {
        let ub = snf.u.mul_vec(vectors.row(i));
        let mut y = vec![BigInt::zero(); bt.cols];
        for (k, c) in ub.iter().enumerate() {
            match diag.get(k).filter(|d| !d.is_zero()) {
                Some(d) => {
                    if !c.is_multiple_of(d) {
                        return None;
                    }
                    y[k] = c / d;
                }
                None if !c.is_zero() => return None,
                None => {}
            }
        }
        out.push(snf.v.mul_vec(&y));
    }
    Some(IntMatrix::from_big_rows(basis.rows, out))
}

/// An integer solution of `a x = b`, or `None`.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len());
    let snf = smith_normal_form(a);
    let ub = snf.u.mul_vec(b);
    let diag = snf.diagonal();
    let mut y = vec![BigInt::zero(); a.cols];
    for (i, c) in ub.iter().enumerate() {
        match diag.get(i).filter(|d| !d.is_zero()) {
            Some(d) => {
                if !c.is_multiple_of(d) {
                    return None;
                }
                y[i] = c / d;
            }
            None if !c.is_zero() => return None,
            None => {}
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// A solution `v in (Q/Z)^n` of `a v = beta mod Z`, or `None` if inconsistent.
pub fn qz_solve(a: &IntMatrix, beta: &[BigRational]) -> Option<Vec<BigRational>> {
    assert_eq!(a.rows, beta.len());
    let snf = smith_normal_form(a);
    let diag = snf.diagonal();
    let mut y = vec![BigRational::zero(); a.cols];
    for i in 0..a.rows {
        let c: BigRational = (0..a.rows)
            .map(|k| BigRational::from_integer(snf.u[(i, k)].clone()) * &beta[k])
            .fold(BigRational::zero(), |x, t| x + t);
        match diag.get(i).filter(|d| !d.is_zero()) {
            Some(d) => y[i] = frac(&(c / BigRational::from_integer(d.clone()))),
            None if !frac(&c).is_zero() => return None,
            None => {}
        }
    }
    Some(
        (0..a.cols)
            .map(|i| {
                let s = (0..a.cols)
                    .map(|j| BigRational::from_integer(snf.v[(i, j)].clone()) * &y[j])
                    .fold(BigRational::zero(), |x, t| x + t);
                frac(&s)
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn check(a: &IntMatrix) -> Snf {
        let snf = smith_normal_form(a);
        assert_eq!(snf.u.mul(a).mul(&snf.v), snf.s);
        assert!(snf.s.is_diagonal());
        assert_eq!(snf.u.determinant().abs(), BigInt::one());
        assert_eq!(snf.v.determinant().abs(), BigInt::one());
        let d = snf.diagonal();
        for w in d.windows(2) {
            assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
        snf
    }

    #[test]
    fn snf_examples() {
        let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(check(&m(&[&[2, 0], &[0, 3]])).diagonal(), big(&[1, 6]));
        assert_eq!(check(&m(&[&[2, 4], &[4, 8]])).diagonal(), big(&[2, 0]));
        assert_eq!(check(&IntMatrix::zeros(2, 3)).diagonal(), big(&[0, 0]));
        assert_eq!(
            check(&m(&[&[6, 4, 2], &[8, 10, 0]])).diagonal(),
            big(&[2, 2])
        );
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(quotient_group(&m(&[&[2]]), 1).to_string(), "Z/2");
        assert_eq!(quotient_group(&m(&[&[1, 0]]), 2).to_string(), "Z");
        assert_eq!(
            quotient_group(&m(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2]]), 3).to_string(),
            "Z/2 x Z/2 x Z/2"
        );
        assert_eq!(
            quotient_group(&m(&[&[1, 0], &[0, 1]]), 2).to_string(),
            "trivial group"
        );
        assert_eq!(
            AbelianGroupPresentation::from_cyclic_factors(0, &[2, 3]).to_string(),
            "Z/6"
        );
        let g = AbelianGroupPresentation::parse("Z^2 x Z/4 x Z/2").unwrap();
        assert_eq!(
            g,
            AbelianGroupPresentation {
                free_rank: 2,
                torsion: vec![2, 4]
            }
        );
        assert_eq!(
            AbelianGroupPresentation::parse("trivial group"),
            Some(AbelianGroupPresentation::trivial())
        );
    }

    #[test]
    fn kernels_and_solutions() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = integer_kernel(&a);
        assert_eq!(k.rows(), 2);
        for i in 0..k.rows() {
            assert!(a.mul_vec(k.row(i)).iter().all(Zero::is_zero));
        }
        let b = vec![BigInt::from(5), BigInt::from(10)];
        let x = solve_integer(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        assert!(solve_integer(&m(&[&[2]]), &[BigInt::from(1)]).is_none());
    }

    #[test]
    fn congruence_and_coordinates() {
        // 2x = 0 mod 4  =>  x in 2Z
        let k = congruence_kernel(&m(&[&[2]]), &BigInt::from(4));
        assert_eq!(k.row_vecs(), vec![vec![BigInt::from(2)]]);
        let k = congruence_kernel(&m(&[&[1, 1]]), &BigInt::from(3));
        for i in 0..k.rows() {
            let s: BigInt = k.row(i).iter().sum();
            assert!(s.is_multiple_of(&BigInt::from(3)));
        }
        assert_eq!(k.rows(), 2);
        let basis = m(&[&[2, 0], &[1, 1]]);
        let c = lattice_coordinates(&basis, &m(&[&[3, 1], &[0, 2]])).unwrap();
        assert_eq!(c.mul(&basis), m(&[&[3, 1], &[0, 2]]));
        assert!(lattice_coordinates(&basis, &m(&[&[1, 0]])).is_none());
        let r = row_lattice_basis(&m(&[&[2, 4], &[3, 6], &[0, 0]]));
        assert_eq!(r.row_vecs(), vec![vec![BigInt::from(1), BigInt::from(2)]]);
    }

    #[test]
    fn qz_examples() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        let sol = qz_solve(&m(&[&[2]]), &[q(1, 2)]).unwrap();
        assert_eq!(sol, vec![q(1, 4)]);
        // 0 * v = 1/2 has no solution
        assert!(qz_solve(&m(&[&[0]]), &[q(1, 2)]).is_none());
        // v1 - v2 = 1/3, 2 v2 = 0
        let a = m(&[&[1, -1], &[0, 2]]);
        let beta = [q(1, 3), q(0, 1)];
        let v = qz_solve(&a, &beta).unwrap();
        let lhs0 = frac(&(&v[0] - &v[1]));
        assert_eq!(lhs0, q(1, 3));
        assert!(frac(&(&v[1] * BigRational::from_integer(2.into()))).is_zero());
    }
}
